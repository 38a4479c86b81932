#include "wordbias/cooc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "binary_io.hpp"
#include "wordbias/error.hpp"

namespace wordbias {
namespace {

bool entry_less(const CoocEntry& a, const CoocEntry& b) {
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

// Sorts and sums duplicate coordinates in place.
void sort_and_merge(std::vector<CoocEntry>& entries) {
  std::sort(entries.begin(), entries.end(), entry_less);
  std::size_t out = 0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (out > 0 && entries[out - 1].i == entries[k].i && entries[out - 1].j == entries[k].j) {
      entries[out - 1].weight += entries[k].weight;
    } else {
      entries[out++] = entries[k];
    }
  }
  entries.resize(out);
}

std::string coord(WordId i, WordId j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

template <typename Emit>
void for_each_pair(const EncodedDocument& doc, std::uint32_t window, Emit&& emit) {
  const std::size_t n = doc.size();
  for (std::size_t p = 0; p < n; ++p) {
    const std::int32_t a = doc[p];
    if (a < 0) continue;
    const std::size_t last = std::min<std::size_t>(n - 1, p + window);
    for (std::size_t q = p + 1; q <= last; ++q) {
      const std::int32_t b = doc[q];
      if (b < 0) continue;
      emit(static_cast<WordId>(a), static_cast<WordId>(b), harmonic_weight(static_cast<std::uint32_t>(q - p)));
    }
  }
}

}  // namespace

double harmonic_weight(std::uint32_t distance) {
  return std::ldexp(std::nearbyint(std::ldexp(1.0 / distance, 24)), -24);
}

CoocMatrix::CoocMatrix(std::size_t vocab_size) : vocab_size_(vocab_size), row_ptr_(vocab_size + 1, 0) {}

CoocMatrix CoocMatrix::from_entries(std::size_t vocab_size, std::vector<CoocEntry> entries) {
  for (const auto& e : entries) {
    if (e.i >= vocab_size || e.j >= vocab_size) {
      throw Error("co-occurrence entry " + coord(e.i, e.j) + " outside vocabulary of size " +
                  std::to_string(vocab_size));
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw Error("co-occurrence entry " + coord(e.i, e.j) + " has invalid weight");
    }
  }
  sort_and_merge(entries);
  std::erase_if(entries, [](const CoocEntry& e) { return e.weight == 0.0; });

  CoocMatrix x(vocab_size);
  x.cols_.reserve(entries.size());
  x.weights_.reserve(entries.size());
  for (const auto& e : entries) {
    ++x.row_ptr_[e.i + 1];
    x.cols_.push_back(e.j);
    x.weights_.push_back(e.weight);
    x.total_weight_ += e.weight;
  }
  for (std::size_t i = 0; i < vocab_size; ++i) x.row_ptr_[i + 1] += x.row_ptr_[i];

  for (const auto& e : entries) {
    if (x.at(e.j, e.i) != e.weight) {
      throw Error("co-occurrence matrix is not symmetric at " + coord(e.i, e.j));
    }
  }
  return x;
}

SparseRow CoocMatrix::row(WordId i) const {
  const std::size_t begin = row_ptr_[i];
  const std::size_t len = row_ptr_[i + 1] - begin;
  return {std::span(cols_).subspan(begin, len), std::span(weights_).subspan(begin, len)};
}

double CoocMatrix::row_sum(WordId i) const {
  double sum = 0.0;
  for (const double w : row(i).weights) sum += w;
  return sum;
}

double CoocMatrix::at(WordId i, WordId j) const {
  const auto r = row(i);
  const auto it = std::lower_bound(r.cols.begin(), r.cols.end(), j);
  if (it == r.cols.end() || *it != j) return 0.0;
  return r.weights[static_cast<std::size_t>(it - r.cols.begin())];
}

std::vector<CoocEntry> CoocMatrix::entries() const {
  std::vector<CoocEntry> out;
  out.reserve(nnz());
  for (WordId i = 0; i < vocab_size_; ++i) {
    const auto r = row(i);
    for (std::size_t k = 0; k < r.size(); ++k) out.push_back({i, r.cols[k], r.weights[k]});
  }
  return out;
}

CoocDelta CoocDelta::from_entries(std::vector<CoocEntry> entries) {
  sort_and_merge(entries);
  std::erase_if(entries, [](const CoocEntry& e) { return e.weight == 0.0; });
  CoocDelta d;
  d.entries = std::move(entries);
  return d;
}

double CoocDelta::total_weight() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.weight;
  return sum;
}

std::span<const CoocEntry> CoocDelta::row(WordId i) const {
  const auto lo = std::lower_bound(entries.begin(), entries.end(), i,
                                   [](const CoocEntry& e, WordId id) { return e.i < id; });
  auto hi = lo;
  while (hi != entries.end() && hi->i == i) ++hi;
  return {lo, hi};
}

std::vector<WordId> CoocDelta::rows() const {
  std::vector<WordId> out;
  for (const auto& e : entries) {
    if (out.empty() || out.back() != e.i) out.push_back(e.i);
  }
  return out;
}

CoocDelta CoocDelta::scaled(double factor) const {
  CoocDelta d = *this;
  for (auto& e : d.entries) e.weight *= factor;
  return d;
}

CoocDelta merge(const CoocDelta& a, const CoocDelta& b) {
  std::vector<CoocEntry> all;
  all.reserve(a.entries.size() + b.entries.size());
  all.insert(all.end(), a.entries.begin(), a.entries.end());
  all.insert(all.end(), b.entries.begin(), b.entries.end());
  CoocDelta d = CoocDelta::from_entries(std::move(all));
  d.docs = a.docs;
  d.docs.insert(d.docs.end(), b.docs.begin(), b.docs.end());
  return d;
}

RowFilter RowFilter::all(std::size_t vocab_size) {
  RowFilter f;
  f.all_ = true;
  f.mask_.assign(vocab_size, 1);
  return f;
}

RowFilter RowFilter::of(std::size_t vocab_size, std::span<const WordId> ids) {
  RowFilter f;
  f.mask_.assign(vocab_size, 0);
  for (const auto id : ids) {
    if (id >= vocab_size) throw Error("row filter id " + std::to_string(id) + " outside vocabulary");
    f.mask_[id] = 1;
  }
  return f;
}

CoocMatrix extract_cooc(std::span<const EncodedDocument> docs, std::size_t vocab_size, std::uint32_t window) {
  if (window < 1) throw Error("co-occurrence window must be at least 1");
  std::unordered_map<std::uint64_t, double> acc;
  acc.reserve(1 << 16);
  const auto add = [&acc](WordId a, WordId b, double w) {
    acc[(std::uint64_t{a} << 32) | b] += w;
    acc[(std::uint64_t{b} << 32) | a] += w;
  };
  for (const auto& doc : docs) {
    for (const auto id : doc) {
      if (id >= static_cast<std::int64_t>(vocab_size)) throw Error("encoded token outside vocabulary");
    }
    for_each_pair(doc, window, add);
  }
  std::vector<CoocEntry> entries;
  entries.reserve(acc.size());
  for (const auto& [key, w] : acc) {
    entries.push_back({static_cast<WordId>(key >> 32), static_cast<WordId>(key & 0xFFFFFFFFu), w});
  }
  return CoocMatrix::from_entries(vocab_size, std::move(entries));
}

CoocMatrix extract_cooc(const Corpus& corpus, const Vocabulary& vocab, std::uint32_t window) {
  const auto encoded = encode(corpus, vocab);
  return extract_cooc(encoded, vocab.size(), window);
}

CoocDelta doc_cooc_rows(const EncodedDocument& doc, std::uint32_t window, const RowFilter& rows) {
  std::vector<CoocEntry> entries;
  for_each_pair(doc, window, [&](WordId a, WordId b, double w) {
    if (!rows.contains(static_cast<std::int32_t>(a)) && !rows.contains(static_cast<std::int32_t>(b))) return;
    entries.push_back({a, b, w});
    entries.push_back({b, a, w});
  });
  return CoocDelta::from_entries(std::move(entries));
}

CoocMatrix apply_removal(const CoocMatrix& x, const CoocDelta& delta) {
  std::vector<CoocEntry> out;
  out.reserve(x.nnz());
  std::size_t d = 0;
  const auto& de = delta.entries;
  for (WordId i = 0; i < x.vocab_size(); ++i) {
    const auto r = x.row(i);
    std::size_t k = 0;
    while (d < de.size() && de[d].i < i) {
      if (de[d].weight > kZeroTolerance) {
        throw Error("removal exceeds co-occurrence weight at " + coord(de[d].i, de[d].j));
      }
      ++d;
    }
    for (; k < r.size(); ++k) {
      const WordId j = r.cols[k];
      double w = r.weights[k];
      while (d < de.size() && de[d].i == i && de[d].j < j) {
        if (de[d].weight > kZeroTolerance) {
          throw Error("removal exceeds co-occurrence weight at " + coord(de[d].i, de[d].j));
        }
        ++d;
      }
      if (d < de.size() && de[d].i == i && de[d].j == j) {
        if (de[d].weight > w + kZeroTolerance) {
          throw Error("removal exceeds co-occurrence weight at " + coord(i, j));
        }
        w -= de[d].weight;
        ++d;
      }
      if (w > kZeroTolerance) out.push_back({i, j, w});
    }
    while (d < de.size() && de[d].i == i) {
      if (de[d].weight > kZeroTolerance) {
        throw Error("removal exceeds co-occurrence weight at " + coord(de[d].i, de[d].j));
      }
      ++d;
    }
  }
  if (d < de.size()) {
    throw Error("removal delta entry " + coord(de[d].i, de[d].j) + " outside vocabulary");
  }
  return CoocMatrix::from_entries(x.vocab_size(), std::move(out));
}

CoocMatrix apply_addition(const CoocMatrix& x, const CoocDelta& delta) {
  auto entries = x.entries();
  entries.insert(entries.end(), delta.entries.begin(), delta.entries.end());
  return CoocMatrix::from_entries(x.vocab_size(), std::move(entries));
}

void write_cooc(std::ostream& out, const CoocMatrix& x) {
  std::string buf;
  buf.reserve(16 + 16 * x.nnz());
  buf.append("COOC", 4);
  detail::put_u32(buf, kCoocFormatVersion);
  detail::put_u32(buf, static_cast<std::uint32_t>(x.vocab_size()));
  detail::put_u32(buf, static_cast<std::uint32_t>(x.nnz()));
  for (const auto& e : x.entries()) {
    detail::put_u32(buf, e.i);
    detail::put_u32(buf, e.j);
    detail::put_f64(buf, e.weight);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("failed to write co-occurrence data");
}

CoocMatrix read_cooc(std::istream& in) {
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  detail::ByteReader reader(data, "co-occurrence file");
  if (data.size() < 16) reader.fail("truncated header (" + std::to_string(data.size()) + " bytes)", data.size());
  if (reader.bytes(4) != "COOC") reader.fail("bad magic", 0);
  const std::uint32_t version = reader.u32();
  if (version != kCoocFormatVersion) reader.fail("unsupported version " + std::to_string(version), 4);
  const std::uint32_t vocab_size = reader.u32();
  const std::uint32_t count = reader.u32();
  const std::size_t body = data.size() - 16;
  if (body % 16 != 0) reader.fail("record framing error: trailing partial record", 16 + body - body % 16);
  if (body / 16 != count) {
    reader.fail("header declares " + std::to_string(count) + " records but file holds " +
                    std::to_string(body / 16),
                16 + std::min<std::size_t>(body, std::size_t{count} * 16));
  }
  std::vector<CoocEntry> entries;
  entries.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::size_t at = reader.offset();
    CoocEntry e{reader.u32(), reader.u32(), reader.f64()};
    if (e.i >= vocab_size || e.j >= vocab_size) reader.fail("record id outside vocabulary", at);
    if (!std::isfinite(e.weight) || e.weight <= 0.0) reader.fail("record weight not positive and finite", at);
    if (!entries.empty() && !entry_less(entries.back(), e)) reader.fail("records not sorted by (i, j)", at);
    entries.push_back(e);
  }
  return CoocMatrix::from_entries(vocab_size, std::move(entries));
}

void save_cooc(const std::filesystem::path& path, const CoocMatrix& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write co-occurrence file: " + path.string());
  write_cooc(out, x);
}

CoocMatrix load_cooc(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read co-occurrence file: " + path.string());
  try {
    return read_cooc(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace wordbias
