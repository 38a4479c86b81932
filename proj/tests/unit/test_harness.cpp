#include <cstring>
#include <filesystem>
#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "wordbias/error.hpp"
#include "wordbias/harness.hpp"
#include "wordbias/synthetic.hpp"

using namespace wordbias;

namespace {

std::vector<DiffBiasRecord> records_from(const std::vector<double>& deltas) {
  std::vector<DiffBiasRecord> records;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    DiffBiasRecord r;
    r.doc_id = static_cast<std::uint32_t>(k);
    r.delta_b = deltas[k];
    r.per_seed = {deltas[k]};
    records.push_back(r);
  }
  return records;
}

const PerturbationSet& find(const std::vector<PerturbationSet>& sets, const std::string& name) {
  for (const auto& s : sets) {
    if (s.name == name) return s;
  }
  FAIL("no set named " << name);
  throw;
}

}  // namespace

TEST_CASE("targeted sets follow the ranking") {
  const auto records = records_from({3, -1, 0, 2, -2});
  const std::vector<std::size_t> sizes{2};
  const auto sets = make_perturbation_sets(records, sizes, 1, 5);
  REQUIRE(sets.size() == 3);
  CHECK(find(sets, "decrease-2").doc_ids == std::vector<std::uint32_t>{0, 3});
  CHECK(find(sets, "increase-2").doc_ids == std::vector<std::uint32_t>{4, 1});
  CHECK(find(sets, "random-2").doc_ids.size() == 2);
}

TEST_CASE("ties break by document id and errored records are skipped") {
  auto records = records_from({1, 1, 5, 1, 1});
  records[2].error = "degenerate";
  const std::vector<std::size_t> sizes{2};
  const auto sets = make_perturbation_sets(records, sizes, 0, 0);
  CHECK(find(sets, "decrease-2").doc_ids == std::vector<std::uint32_t>{0, 1});
  CHECK(find(sets, "increase-2").doc_ids == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("random sets are deterministic, unique and named per size") {
  const auto records = records_from(std::vector<double>(50, 0.0));
  const std::vector<std::size_t> sizes{5, 10};
  const auto a = make_perturbation_sets(records, sizes, 3, 99);
  const auto b = make_perturbation_sets(records, sizes, 3, 99);
  const auto c = make_perturbation_sets(records, sizes, 3, 100);
  CHECK(find(a, "random-10.2").doc_ids == find(b, "random-10.2").doc_ids);
  CHECK(find(a, "random-10.2").doc_ids != find(c, "random-10.2").doc_ids);
  CHECK(find(a, "random-5.0").doc_ids != find(a, "random-5.1").doc_ids);
  for (const auto& s : a) {
    const std::set<std::uint32_t> unique(s.doc_ids.begin(), s.doc_ids.end());
    CHECK(unique.size() == s.doc_ids.size());
    CHECK(*unique.rbegin() < 50);
  }
  CHECK(a.size() == 2 * (2 + 3));
}

TEST_CASE("set sizes are validated") {
  const auto records = records_from({1, 2, 3});
  const std::vector<std::size_t> too_big{4};
  CHECK_THROWS_AS(make_perturbation_sets(records, too_big, 1, 0), Error);
  const std::vector<std::size_t> whole{3};
  const auto sets = make_perturbation_sets(records, whole, 1, 0);
  CHECK(find(sets, "random-3").doc_ids == std::vector<std::uint32_t>{0, 1, 2});
}

TEST_CASE("perturbation set JSON round trip") {
  PerturbationSet s{"random-3", SetKind::kRandom, {4, 9, 1}, 77};
  const auto path = std::filesystem::temp_directory_path() / "wordbias_test_set.json";
  save_perturbation_set(path, s);
  const auto back = load_perturbation_set(path);
  CHECK(back.name == s.name);
  CHECK(back.kind == s.kind);
  CHECK(back.doc_ids == s.doc_ids);
  CHECK(back.seed == 77);
  std::filesystem::remove(path);

  auto j = to_json(s);
  j["doc_ids"] = {1, 1, 2};
  CHECK_THROWS_AS(perturbation_set_from_json(j), Error);
  j = to_json(s);
  j["size"] = 5;
  CHECK_THROWS_AS(perturbation_set_from_json(j), Error);
  j = to_json(s);
  j["kind"] = "sideways";
  CHECK_THROWS_AS(perturbation_set_from_json(j), Error);
}

TEST_CASE("ground truth on an empty set retrains the unperturbed corpus") {
  const auto spec = load_weat_spec(std::string(WORDBIAS_DATA_DIR) + "/weat1.txt");
  SyntheticOptions so;
  so.n_docs = 150;
  so.n_topics = 4;
  so.words_per_topic = 30;
  const auto corpus = parse_corpus(synthetic_corpus(spec, so), {});
  const auto vocab = build_vocabulary(corpus, 1);
  const auto resolved = resolve(spec, vocab);
  Hyperparams h;
  h.dim = 6;
  h.epochs = 3;
  h.seed = 40;
  const auto x = extract_cooc(corpus, vocab, h.window);
  const auto baselines = train_baselines(x, h, 2);
  const auto base = bias_summary(baselines, resolved);
  const auto truth = ground_truth(corpus, vocab, {}, resolved, h, 2, 40);
  CHECK(truth.values == base.values);
  CHECK(base.std.has_value());
  CHECK_FALSE(bias_summary(std::span(baselines).first(1), resolved).std.has_value());

  // Removing documents keeps the vocabulary and still resolves the WEAT.
  const std::vector<std::uint32_t> removed{0, 1, 2, 3, 4};
  CHECK(ground_truth(corpus, vocab, removed, resolved, h, 1, 40).values.size() == 1);
  const std::vector<std::uint32_t> bad{150};
  CHECK_THROWS_AS(ground_truth(corpus, vocab, bad, resolved, h, 1, 40), Error);
}

TEST_CASE("report statistics") {
  ExperimentReport report;
  report.baseline = SampleSummary::of({1.0, 1.1, 0.9, 1.05, 0.95});
  const auto add = [&](SetKind kind, double approx, std::vector<double> truth) {
    SetResult r;
    r.set.kind = kind;
    r.set.name = to_string(kind);
    r.approx_bias = approx;
    r.truth = SampleSummary::of(std::move(truth));
    report.sets.push_back(std::move(r));
  };
  add(SetKind::kDecrease, 0.2, {0.25, 0.3, 0.2});
  add(SetKind::kIncrease, 1.5, {1.45, 1.5, 1.55});
  add(SetKind::kRandom, 3.0, {1.0, 1.02, 0.98});
  add(SetKind::kDecrease, 0.6, {0.6, 0.65, 0.55});
  finalize_report(report);
  REQUIRE(report.r2.has_value());
  CHECK(*report.r2 > 0.99);
  CHECK(report.sets[0].welch->p < 0.05);
  CHECK(report.sets[2].welch->p > 0.05);
  const auto j = to_json(report);
  CHECK(j["sets"].size() == 4);
  CHECK(j["sets"][0]["welch"]["p"].get<double>() < 0.05);

  report.sets[1].truth.reset();
  CHECK_THROWS_AS(finalize_report(report), Error);
}

TEST_CASE("analogy on a constructed embedding") {
  const Vocabulary vocab({"a", "b", "c", "d", "e", "f"}, {6, 5, 4, 3, 2, 1});
  Matrix w = Matrix::Zero(6, 6);
  w(0, 0) = 1;
  w(1, 1) = 2;
  w(2, 2) = 0.5;
  w(3, 1) = 1, w(3, 0) = -1, w(3, 2) = 1;
  w(4, 4) = 1;
  w(5, 5) = 1;
  std::istringstream questions(": section\na b c d\nA B C D\na b c zzz\n");
  const auto r = analogy_eval(w, vocab, questions);
  CHECK(r.attempted == 2);
  CHECK(r.skipped == 1);
  CHECK(r.accuracy == 1.0);

  std::istringstream wrong("a b c e\n");
  CHECK(analogy_eval(w, vocab, wrong).accuracy == 0.0);
  std::istringstream oov("x y z w\n");
  CHECK_THROWS_AS(analogy_eval(w, vocab, oov), Error);
}

TEST_CASE("synthetic corpus is deterministic and plants the WEAT words") {
  const auto spec = load_weat_spec(std::string(WORDBIAS_DATA_DIR) + "/weat1.txt");
  SyntheticOptions so;
  so.n_docs = 200;
  const auto text = synthetic_corpus(spec, so);
  CHECK(text == synthetic_corpus(spec, so));
  so.seed += 1;
  CHECK(text != synthetic_corpus(spec, so));
  const auto corpus = parse_corpus(text, {});
  CHECK(corpus.size() == 200);
  const auto vocab = build_vocabulary(corpus, 1);
  CHECK_NOTHROW(resolve(spec, vocab));
}
