#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wordbias/corpus.hpp"
#include "wordbias/glove.hpp"
#include "wordbias/influence.hpp"
#include "wordbias/metrics.hpp"
#include "wordbias/stats.hpp"

namespace wordbias {

/// Models differ only in seed: hyper.seed, hyper.seed + 1, ...
std::vector<GloveModel> train_baselines(const CoocMatrix& x, const Hyperparams& hyper, std::size_t n_seeds,
                                        unsigned threads = 1);

enum class SetKind { kIncrease, kRandom, kDecrease };
std::string to_string(SetKind kind);
SetKind parse_set_kind(std::string_view s);

struct PerturbationSet {
  /// `kind-size`, with a `.k` suffix when several random sets share a size.
  std::string name;
  SetKind kind = SetKind::kRandom;
  std::vector<std::uint32_t> doc_ids;
  std::uint64_t seed = 0;
};

/// For each size s: decrease-s holds the s largest Δ (removal lowers bias),
/// increase-s the s most negative, ties by doc_id ascending; plus n_random
/// uniform draws per size. Errored records never enter targeted sets.
std::vector<PerturbationSet> make_perturbation_sets(std::span<const DiffBiasRecord> records,
                                                    std::span<const std::size_t> sizes, std::size_t n_random,
                                                    std::uint64_t seed);

nlohmann::json to_json(const PerturbationSet& set);
PerturbationSet perturbation_set_from_json(const nlohmann::json& j);
void save_perturbation_set(const std::filesystem::path& path, const PerturbationSet& set);
PerturbationSet load_perturbation_set(const std::filesystem::path& path);

struct SampleSummary {
  std::vector<double> values;
  double mean = 0.0;
  std::optional<double> std;

  static SampleSummary of(std::vector<double> values);
};

/// Effect sizes of one WEAT across models.
SampleSummary bias_summary(std::span<const GloveModel> models, const ResolvedWeat& spec);

/// Retrains from scratch on the corpus without the set: co-occurrences are
/// re-extracted under the frozen vocabulary and n_seeds models are trained
/// with seeds seed_base, seed_base + 1, ...
SampleSummary ground_truth(const Corpus& corpus, const Vocabulary& vocab, std::span<const std::uint32_t> removed,
                           const ResolvedWeat& spec, const Hyperparams& hyper, std::size_t n_seeds,
                           std::uint64_t seed_base, unsigned threads = 1);

struct SetResult {
  PerturbationSet set;
  /// Approximated Δ over baseline models.
  SampleSummary approx_delta;
  /// Approximated effect size after removal, baseline mean minus mean Δ.
  double approx_bias = 0.0;
  bool large_perturbation = false;
  std::optional<SampleSummary> truth;
  std::optional<WelchResult> welch;
};

struct ExperimentReport {
  std::string weat;
  SampleSummary baseline;
  std::vector<SetResult> sets;
  /// Over non-random sets carrying both an approximation and a ground truth.
  std::optional<double> r2;
  nlohmann::json config;
};

/// Fills Welch tests against the baseline and r^2. Throws if a targeted set
/// lacks its ground truth.
void finalize_report(ExperimentReport& report);

nlohmann::json to_json(const ExperimentReport& report);

struct ProtocolConfig {
  Hyperparams hyper;
  std::size_t n_baselines = 5;
  std::size_t n_retrain = 3;
  std::vector<std::size_t> sizes{10, 30, 60, 100};
  std::size_t n_random = 1;
  std::uint64_t set_seed = 7;
  /// Retrain seeds start here, away from the baseline seeds.
  std::uint64_t retrain_seed = 1000;
  double damping = 0.0;
  unsigned threads = 1;

  nlohmann::json to_json() const;
};

struct ProtocolRun {
  std::vector<GloveModel> baselines;
  std::vector<DiffBiasRecord> scan;
  ExperimentReport report;
};

/// Baselines, scan, perturbation sets, approximations, ground truths and
/// statistics for one WEAT.
ProtocolRun run_protocol(const Corpus& corpus, const Vocabulary& vocab, const CoocMatrix& x,
                         const ResolvedWeat& spec, const ProtocolConfig& config);

struct AnalogyResult {
  std::size_t correct = 0;
  std::size_t attempted = 0;
  std::size_t skipped = 0;
  double accuracy = 0.0;
};

/// `a b c d` questions; lines starting with ':' are section headers. The
/// answer is the nearest normalized vector to b - a + c, excluding a, b, c.
AnalogyResult analogy_eval(const Matrix& w, const Vocabulary& vocab, std::istream& questions);

}  // namespace wordbias
