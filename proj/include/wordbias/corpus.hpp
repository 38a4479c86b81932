#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wordbias {

using WordId = std::uint32_t;
inline constexpr std::int32_t kOutOfVocabulary = -1;

/// Token emitted for every standalone run of digits.
inline constexpr std::string_view kNumberToken = "<num>";

/// Splits raw text into lowercase alphabetic tokens. Digit runs become
/// `<num>`, punctuation and invalid UTF-8 act as separators. Non-ASCII
/// letters are kept verbatim inside tokens.
std::vector<std::string> tokenize(std::string_view text);

struct Document {
  std::uint32_t doc_id = 0;
  std::vector<std::string> tokens;
  std::uint64_t byte_start = 0;
  std::uint64_t byte_len = 0;
  std::string metadata;
};

enum class RecordSeparator { kBlankLine, kLine };

struct CorpusOptions {
  std::size_t min_len = 1;
  std::size_t max_len = SIZE_MAX;
  RecordSeparator separator = RecordSeparator::kBlankLine;
};

/// An ordered, densely indexed document collection. Immutable once loaded.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Document> docs);

  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }
  const Document& operator[](std::size_t k) const { return docs_[k]; }
  std::span<const Document> documents() const { return docs_; }
  std::uint64_t token_count() const { return token_count_; }

  /// A new corpus without the listed documents, re-indexed densely.
  /// Byte spans still point into the original source.
  Corpus without(std::span<const std::uint32_t> removed) const;

 private:
  std::vector<Document> docs_;
  std::uint64_t token_count_ = 0;
};

/// Splits `text` into records, tokenizes and length-filters them. Throws if
/// nothing survives.
Corpus parse_corpus(std::string_view text, const CorpusOptions& options);

/// parse_corpus over a file's contents. Throws naming the path when the file
/// cannot be read.
Corpus load_corpus(const std::filesystem::path& path, const CorpusOptions& options);

class Vocabulary {
 public:
  Vocabulary() = default;
  /// `words` must already be in frequency-descending, lexicographic-tie order.
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts);

  std::size_t size() const { return words_.size(); }
  const std::string& word(WordId id) const { return words_[id]; }
  std::uint64_t count(WordId id) const { return counts_[id]; }
  std::span<const std::string> words() const { return words_; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  /// Id of `word`, or kOutOfVocabulary.
  std::int32_t find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word) != kOutOfVocabulary; }

  /// FNV-1a over the ordered word list; binds models to a vocabulary.
  std::uint64_t hash() const;

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, WordId> index_;
};

/// Throws if no token reaches `min_count`.
Vocabulary build_vocabulary(const Corpus& corpus, std::uint64_t min_count);

/// Document tokens resolved to vocabulary ids; OOV tokens are
/// kOutOfVocabulary but keep their position.
using EncodedDocument = std::vector<std::int32_t>;
EncodedDocument encode(const Document& doc, const Vocabulary& vocab);
std::vector<EncodedDocument> encode(const Corpus& corpus, const Vocabulary& vocab);

// Text interfaces.
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary(std::istream& in);
void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary load_vocabulary(const std::filesystem::path& path);

/// `doc_id<TAB>byte_start<TAB>byte_len<TAB>token_count` per document.
void write_document_index(std::ostream& out, const Corpus& corpus);

struct DocumentIndexEntry {
  std::uint32_t doc_id;
  std::uint64_t byte_start;
  std::uint64_t byte_len;
  std::uint64_t token_count;
};
std::vector<DocumentIndexEntry> read_document_index(std::istream& in);

}  // namespace wordbias
