#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "wordbias/error.hpp"
#include "wordbias/ppmi.hpp"

using namespace wordbias;

namespace {

std::vector<EncodedDocument> random_docs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<EncodedDocument> docs(n);
  for (auto& d : docs) {
    const std::size_t len = 10 + rng() % 30;
    // Low ids are frequent so every WEAT row is well populated.
    for (std::size_t k = 0; k < len; ++k) d.push_back(static_cast<std::int32_t>(rng() % 2 ? rng() % 16 : rng() % 30));
  }
  return docs;
}

CoocMatrix scaled(const CoocMatrix& x, double factor) {
  auto entries = x.entries();
  for (auto& e : entries) e.weight *= factor;
  return CoocMatrix::from_entries(x.vocab_size(), std::move(entries));
}

}  // namespace

TEST_CASE("hand-computed 2x2 PPMI") {
  // r = c = (5, 5), N = 10: PMI(0,0) = log(4 * 10 / 25), PMI(0,1) = log(10 / 25) < 0.
  const auto x = CoocMatrix::from_entries(2, {{0, 0, 4}, {0, 1, 1}, {1, 0, 1}, {1, 1, 4}});
  const auto p = build_ppmi(x);
  CHECK(p.at(0, 0) == doctest::Approx(0.47000362924573563).epsilon(1e-15));
  CHECK(p.at(1, 1) == p.at(0, 0));
  CHECK(p.at(0, 1) == 0.0);
  CHECK(p.row(0).size() == 1);
  CHECK(p.total() == 10.0);
  CHECK(p.row_sums()[1] == 5.0);
}

TEST_CASE("trivial PPMI cases") {
  CHECK(build_ppmi(CoocMatrix::from_entries(1, {{0, 0, 3.0}})).row(0).empty());
  std::vector<CoocEntry> uniform;
  for (WordId i = 0; i < 4; ++i) {
    for (WordId j = 0; j < 4; ++j) uniform.push_back({i, j, 2.5});
  }
  const auto p = build_ppmi(CoocMatrix::from_entries(4, uniform));
  for (WordId i = 0; i < 4; ++i) CHECK(p.row(i).empty());
  CHECK_THROWS_AS(build_ppmi(CoocMatrix(3)), Error);
}

TEST_CASE("PPMI is exactly scale invariant") {
  const auto x = testing::random_cooc(25, 0.4, 12);
  CHECK(build_ppmi(x).row(3).size() > 0);
  const auto a = build_ppmi(x);
  const auto b = build_ppmi(scaled(x, 2.0));
  for (WordId i = 0; i < 25; ++i) {
    const auto ra = a.row(i), rb = b.row(i);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t k = 0; k < ra.size(); ++k) CHECK(ra.weights[k] == rb.weights[k]);
  }
}

TEST_CASE("positive entries only where X is stored") {
  const auto x = testing::random_cooc(25, 0.3, 13);
  const auto p = build_ppmi(x);
  for (WordId i = 0; i < 25; ++i) {
    const auto r = p.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      CHECK(r.weights[k] > 0.0);
      CHECK(x.at(i, r.cols[k]) > 0.0);
    }
  }
}

TEST_CASE("context smoothing with exponent 1 is plain PPMI") {
  const auto x = testing::random_cooc(20, 0.4, 14);
  const auto plain = build_ppmi(x);
  const auto smoothed = build_ppmi(x, {0.75});
  CHECK_FALSE(plain == smoothed);
  CHECK(build_ppmi(x, {1.0}) == plain);
}

TEST_CASE("sparse cosine") {
  const std::vector<WordId> ca{0, 2}, cb{2, 5};
  const std::vector<double> wa{3.0, 4.0}, wb{1.0, 1.0};
  CHECK(sparse_cosine({ca, wa}, {cb, wb}) == doctest::Approx(4.0 / (5.0 * std::sqrt(2.0))));
  CHECK_THROWS_AS(sparse_cosine({ca, wa}, {}), ZeroNormError);
}

TEST_CASE("PPMI WEAT is antisymmetric and names zero-norm words") {
  const auto docs = random_docs(80, 1);
  const auto x = extract_cooc(docs, 30, 3);
  const auto spec = testing::toy_weat();
  const auto p = build_ppmi(x);
  auto swapped = spec;
  std::swap(swapped.s, swapped.t);
  CHECK(ppmi_weat(p, swapped) == doctest::Approx(-ppmi_weat(p, spec)).epsilon(1e-12));

  // Word 0 only ever appears next to itself in a single-document corpus.
  const std::vector<EncodedDocument> one{{0, 0}};
  const auto lonely = build_ppmi(extract_cooc(one, 16, 2));
  CHECK_THROWS_WITH_AS(ppmi_weat(lonely, spec), doctest::Contains("w"), ZeroNormError);
}

TEST_CASE("diff scan equals rebuilding PPMI from X minus the document") {
  const auto docs = random_docs(60, 2);
  const auto x = extract_cooc(docs, 30, 3);
  const auto spec = testing::toy_weat();
  const double base = ppmi_weat(build_ppmi(x), spec);
  for (const double alpha : {1.0, 0.75}) {
    const PpmiOptions opts{alpha};
    const double base_opt = ppmi_weat(build_ppmi(x, opts), spec);
    const auto records = ppmi_diff_scan(docs, x, spec, 3, opts, 2);
    REQUIRE(records.size() == docs.size());
    for (std::size_t k = 0; k < docs.size(); k += 7) {
      const auto removed = apply_removal(x, doc_cooc_rows(docs[k], 3, RowFilter::all(30)));
      const double expected = base_opt - ppmi_weat(build_ppmi(removed, opts), spec);
      REQUIRE(records[k].ok());
      CHECK(records[k].delta_b == doctest::Approx(expected).epsilon(1e-9).scale(1e-12));
    }
  }
  CHECK(base != 0.0);
}

TEST_CASE("diff scan edge cases") {
  const auto spec = testing::toy_weat();
  const auto docs = random_docs(40, 3);
  auto with_empty = docs;
  with_empty.push_back({});
  const auto x = extract_cooc(with_empty, 30, 3);
  const auto records = ppmi_diff_scan(with_empty, x, spec, 3);
  CHECK(records.back().delta_b == 0.0);
  CHECK(records.back().ok());

  // Removing the only document empties the matrix: recorded, not thrown.
  std::vector<EncodedDocument> single{{}};
  for (std::int32_t k = 0; k < 16; ++k) single[0].push_back(k), single[0].push_back(16 + k % 4);
  const auto xs = extract_cooc(single, 30, 3);
  const auto rec = ppmi_diff_scan(single, xs, spec, 3);
  REQUIRE(rec.size() == 1);
  CHECK_FALSE(rec[0].ok());
}

TEST_CASE("removing then re-adding a document restores PPMI bit-for-bit") {
  const auto docs = random_docs(30, 4);
  const auto x = extract_cooc(docs, 30, 3);
  const auto p = build_ppmi(x);
  for (std::size_t k = 0; k < docs.size(); k += 5) {
    const auto d = doc_cooc_rows(docs[k], 3, RowFilter::all(30));
    CHECK(build_ppmi(apply_addition(apply_removal(x, d), d)) == p);
  }
}
