#include "wordbias/harness.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>

#include "wordbias/error.hpp"
#include "wordbias/parallel.hpp"

namespace wordbias {
namespace {

std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Uniform k-subset of [0, n) by a partial Fisher-Yates shuffle, sorted.
std::vector<std::uint32_t> sample_without_replacement(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  std::mt19937_64 rng(seed);
  for (std::size_t m = 0; m < k; ++m) std::swap(ids[m], ids[m + bounded(rng, n - m)]);
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const SampleSummary& s) {
  return {{"values", s.values}, {"mean", s.mean}, {"std", optional_json(s.std)}};
}

}  // namespace

std::vector<GloveModel> train_baselines(const CoocMatrix& x, const Hyperparams& hyper, std::size_t n_seeds,
                                        unsigned threads) {
  if (n_seeds < 1) throw Error("need at least one baseline seed");
  std::vector<GloveModel> models(n_seeds);
  parallel_for(n_seeds, threads, [&](std::size_t k) {
    Hyperparams h = hyper;
    h.seed = hyper.seed + k;
    models[k] = train(x, h);
  });
  return models;
}

std::string to_string(SetKind kind) {
  switch (kind) {
    case SetKind::kIncrease:
      return "increase";
    case SetKind::kRandom:
      return "random";
    case SetKind::kDecrease:
      return "decrease";
  }
  return "?";
}

SetKind parse_set_kind(std::string_view s) {
  if (s == "increase") return SetKind::kIncrease;
  if (s == "random") return SetKind::kRandom;
  if (s == "decrease") return SetKind::kDecrease;
  throw Error("unknown perturbation set kind '" + std::string(s) + "'");
}

std::vector<PerturbationSet> make_perturbation_sets(std::span<const DiffBiasRecord> records,
                                                    std::span<const std::size_t> sizes, std::size_t n_random,
                                                    std::uint64_t seed) {
  std::vector<const DiffBiasRecord*> ranked;
  for (const auto& r : records) {
    if (r.ok()) ranked.push_back(&r);
  }
  std::sort(ranked.begin(), ranked.end(), [](const DiffBiasRecord* a, const DiffBiasRecord* b) {
    if (a->delta_b != b->delta_b) return a->delta_b > b->delta_b;
    return a->doc_id < b->doc_id;
  });
  // Increase sets read the ranking from the other end with the same tie rule.
  std::vector<const DiffBiasRecord*> ascending = ranked;
  std::stable_sort(ascending.begin(), ascending.end(), [](const DiffBiasRecord* a, const DiffBiasRecord* b) {
    if (a->delta_b != b->delta_b) return a->delta_b < b->delta_b;
    return a->doc_id < b->doc_id;
  });

  std::vector<PerturbationSet> sets;
  for (const std::size_t size : sizes) {
    if (size > records.size()) {
      throw Error("perturbation set size " + std::to_string(size) + " exceeds corpus size " +
                  std::to_string(records.size()));
    }
    if (size == records.size()) std::clog << "warning: perturbation set of size " << size << " is the whole corpus\n";
    if (size > ranked.size()) {
      throw Error("perturbation set size " + std::to_string(size) + " exceeds the " + std::to_string(ranked.size()) +
                  " evaluable documents");
    }
    const auto take = [&](const std::vector<const DiffBiasRecord*>& order, SetKind kind) {
      PerturbationSet s;
      s.kind = kind;
      s.name = to_string(kind) + "-" + std::to_string(size);
      for (std::size_t k = 0; k < size; ++k) s.doc_ids.push_back(order[k]->doc_id);
      return s;
    };
    sets.push_back(take(ascending, SetKind::kIncrease));
    for (std::size_t k = 0; k < n_random; ++k) {
      PerturbationSet s;
      s.kind = SetKind::kRandom;
      s.name = "random-" + std::to_string(size) + (n_random > 1 ? "." + std::to_string(k) : "");
      s.seed = seed + 7919 * size + k;
      s.doc_ids = sample_without_replacement(records.size(), size, s.seed);
      for (auto& id : s.doc_ids) id = records[id].doc_id;
      sets.push_back(std::move(s));
    }
    sets.push_back(take(ranked, SetKind::kDecrease));
  }
  return sets;
}

nlohmann::json to_json(const PerturbationSet& set) {
  return {{"name", set.name},
          {"kind", to_string(set.kind)},
          {"size", set.doc_ids.size()},
          {"seed", set.seed},
          {"doc_ids", set.doc_ids}};
}

PerturbationSet perturbation_set_from_json(const nlohmann::json& j) {
  PerturbationSet s;
  try {
    s.name = j.at("name").get<std::string>();
    s.kind = parse_set_kind(j.at("kind").get<std::string>());
    s.seed = j.value("seed", std::uint64_t{0});
    s.doc_ids = j.at("doc_ids").get<std::vector<std::uint32_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed perturbation set: ") + e.what());
  }
  auto sorted = s.doc_ids;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error("perturbation set '" + s.name + "' lists a document twice");
  }
  if (j.contains("size") && j["size"].get<std::size_t>() != s.doc_ids.size()) {
    throw Error("perturbation set '" + s.name + "' declares a size different from its document count");
  }
  return s;
}

void save_perturbation_set(const std::filesystem::path& path, const PerturbationSet& set) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(set).dump(2) << '\n';
}

PerturbationSet load_perturbation_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return perturbation_set_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

SampleSummary SampleSummary::of(std::vector<double> values) {
  SampleSummary s;
  s.mean = wordbias::mean(values);
  s.std = sample_std(values);
  s.values = std::move(values);
  return s;
}

SampleSummary bias_summary(std::span<const GloveModel> models, const ResolvedWeat& spec) {
  std::vector<double> values;
  for (const auto& m : models) values.push_back(weat_effect_size(m.w, spec));
  return SampleSummary::of(std::move(values));
}

SampleSummary ground_truth(const Corpus& corpus, const Vocabulary& vocab, std::span<const std::uint32_t> removed,
                           const ResolvedWeat& spec, const Hyperparams& hyper, std::size_t n_seeds,
                           std::uint64_t seed_base, unsigned threads) {
  if (n_seeds < 1) throw Error("need at least one retraining seed");
  for (const auto id : removed) {
    if (id >= corpus.size()) throw Error("document " + std::to_string(id) + " is outside the corpus");
  }
  const Corpus kept = corpus.without(removed);
  const auto x = extract_cooc(kept, vocab, hyper.window);
  Hyperparams h = hyper;
  h.seed = seed_base;
  const auto models = train_baselines(x, h, n_seeds, threads);
  return bias_summary(models, spec);
}

void finalize_report(ExperimentReport& report) {
  std::vector<double> approx, truth;
  for (auto& s : report.sets) {
    s.welch.reset();
    if (!s.truth) {
      if (s.set.kind != SetKind::kRandom) throw Error("set '" + s.set.name + "' has no ground truth");
      continue;
    }
    try {
      s.welch = welch_t(s.truth->values, report.baseline.values);
    } catch (const Error&) {
      // Too few seeds or no spread: the test is undefined for this set.
    }
    if (s.set.kind != SetKind::kRandom) {
      approx.push_back(s.approx_bias);
      truth.push_back(s.truth->mean);
    }
  }
  report.r2.reset();
  if (approx.size() >= 2) report.r2 = r_squared(approx, truth);
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json sets = nlohmann::json::array();
  for (const auto& s : report.sets) {
    nlohmann::json j{{"name", s.set.name},
                     {"kind", to_string(s.set.kind)},
                     {"size", s.set.doc_ids.size()},
                     {"approx_delta", to_json(s.approx_delta)},
                     {"approx_bias", s.approx_bias},
                     {"large_perturbation", s.large_perturbation}};
    j["truth"] = s.truth ? to_json(*s.truth) : nlohmann::json(nullptr);
    if (s.welch) {
      j["welch"] = {{"t", s.welch->t}, {"df", s.welch->df}, {"p", s.welch->p}};
    } else {
      j["welch"] = nullptr;
    }
    sets.push_back(std::move(j));
  }
  return {{"weat", report.weat},
          {"config", report.config},
          {"baseline", to_json(report.baseline)},
          {"sets", std::move(sets)},
          {"r2", optional_json(report.r2)}};
}

nlohmann::json ProtocolConfig::to_json() const {
  return {{"dim", hyper.dim},
          {"alpha", hyper.alpha},
          {"x_max", hyper.x_max},
          {"epochs", hyper.epochs},
          {"learning_rate", hyper.learning_rate},
          {"seed", hyper.seed},
          {"window", hyper.window},
          {"n_baselines", n_baselines},
          {"n_retrain", n_retrain},
          {"sizes", sizes},
          {"n_random", n_random},
          {"set_seed", set_seed},
          {"retrain_seed", retrain_seed},
          {"damping", damping}};
}

ProtocolRun run_protocol(const Corpus& corpus, const Vocabulary& vocab, const CoocMatrix& x,
                         const ResolvedWeat& spec, const ProtocolConfig& config) {
  ProtocolRun run;
  run.baselines = train_baselines(x, config.hyper, config.n_baselines, config.threads);
  std::vector<WeatInfluence> influence;
  influence.reserve(run.baselines.size());
  for (const auto& m : run.baselines) influence.emplace_back(x, m, spec, config.damping);

  const auto docs = encode(corpus, vocab);
  const ScanOptions scan_options{config.hyper.window, config.damping, config.threads};
  run.scan = differential_bias_scan(docs, influence, scan_options);

  auto& report = run.report;
  report.weat = spec.name;
  report.config = config.to_json();
  report.baseline = bias_summary(run.baselines, spec);
  for (auto& set : make_perturbation_sets(run.scan, config.sizes, config.n_random, config.set_seed)) {
    SetResult r;
    const auto approx = differential_bias_of_set(set.doc_ids, docs, influence, scan_options);
    r.approx_delta = SampleSummary::of(approx.per_seed);
    r.approx_bias = report.baseline.mean - approx.mean;
    r.large_perturbation = approx.large_perturbation;
    r.truth = ground_truth(corpus, vocab, set.doc_ids, spec, config.hyper, config.n_retrain, config.retrain_seed,
                           config.threads);
    r.set = std::move(set);
    report.sets.push_back(std::move(r));
  }
  finalize_report(report);
  return run;
}

AnalogyResult analogy_eval(const Matrix& w, const Vocabulary& vocab, std::istream& questions) {
  if (static_cast<std::size_t>(w.rows()) != vocab.size()) throw Error("embedding and vocabulary sizes differ");
  Matrix normalized = w;
  for (Eigen::Index r = 0; r < normalized.rows(); ++r) {
    const double n = normalized.row(r).norm();
    if (n > 0.0) normalized.row(r) /= n;
  }
  AnalogyResult result;
  std::string line;
  while (std::getline(questions, line)) {
    std::istringstream fields(line);
    std::string words[4];
    if (!(fields >> words[0])) continue;
    if (words[0].front() == ':') continue;
    if (!(fields >> words[1] >> words[2] >> words[3])) throw Error("malformed analogy line: " + line);
    std::int32_t ids[4];
    bool oov = false;
    for (int k = 0; k < 4; ++k) {
      std::transform(words[k].begin(), words[k].end(), words[k].begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      ids[k] = vocab.find(words[k]);
      oov |= ids[k] == kOutOfVocabulary;
    }
    if (oov) {
      ++result.skipped;
      continue;
    }
    const Vector query = normalized.row(ids[1]) - normalized.row(ids[0]) + normalized.row(ids[2]);
    const Vector scores = normalized * query;
    Eigen::Index best = -1;
    for (Eigen::Index r = 0; r < scores.size(); ++r) {
      if (r == ids[0] || r == ids[1] || r == ids[2]) continue;
      if (best < 0 || scores[r] > scores[best]) best = r;
    }
    ++result.attempted;
    result.correct += best == ids[3];
  }
  if (result.attempted == 0) throw Error("no analogy question was answerable (all skipped as out of vocabulary)");
  result.accuracy = static_cast<double>(result.correct) / static_cast<double>(result.attempted);
  return result;
}

}  // namespace wordbias
