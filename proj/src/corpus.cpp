#include "wordbias/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "wordbias/error.hpp"

namespace wordbias {
namespace {

// Decodes one UTF-8 code point starting at `pos`. Returns the number of bytes
// consumed, or 0 for an invalid sequence.
std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& cp) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[pos + k]); };
  const unsigned char lead = byte(0);
  std::size_t len = 0;
  char32_t min_cp = 0;
  if (lead < 0x80) {
    cp = lead;
    return 1;
  } else if ((lead & 0xE0) == 0xC0) {
    len = 2, cp = lead & 0x1F, min_cp = 0x80;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3, cp = lead & 0x0F, min_cp = 0x800;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4, cp = lead & 0x07, min_cp = 0x10000;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    if ((byte(k) & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (byte(k) & 0x3F);
  }
  if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

bool is_non_ascii_separator(char32_t cp) {
  return (cp >= 0x80 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 ||
         (cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F) ||
         cp == 0xFEFF || cp == 0xFFFD;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f' || ch == '\v'; });
}

struct Record {
  std::size_t start;
  std::size_t len;
  std::string metadata;
};

constexpr std::string_view kMetadataPrefix = "@@ ";

std::vector<Record> split_records(std::string_view text, RecordSeparator separator) {
  std::vector<Record> records;
  std::size_t pos = 0;
  bool open = false;
  Record current{};
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    if (separator == RecordSeparator::kLine) {
      if (!is_blank(line)) records.push_back({pos, line.size(), {}});
    } else if (is_blank(line)) {
      if (open) records.push_back(current);
      open = false;
    } else if (!open) {
      open = true;
      if (line.starts_with(kMetadataPrefix)) {
        std::string meta(line.substr(kMetadataPrefix.size()));
        if (!meta.empty() && meta.back() == '\r') meta.pop_back();
        current = {eol + 1, 0, std::move(meta)};
      } else {
        current = {pos, eol - pos, {}};
      }
    } else {
      current.len = eol - current.start;
    }
    pos = eol + 1;
  }
  if (open) records.push_back(current);
  // A metadata line with no body leaves start past the record; clamp it.
  for (auto& r : records) r.start = std::min(r.start, text.size());
  return records;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string word;
  bool in_number = false;
  const auto flush = [&] {
    if (in_number) {
      tokens.emplace_back(kNumberToken);
      in_number = false;
    } else if (!word.empty()) {
      tokens.push_back(std::move(word));
      word.clear();
    }
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    const char ch = text[pos];
    if (ch >= 'A' && ch <= 'Z') {
      if (in_number) flush();
      word.push_back(static_cast<char>(ch - 'A' + 'a'));
      ++pos;
    } else if (ch >= 'a' && ch <= 'z') {
      if (in_number) flush();
      word.push_back(ch);
      ++pos;
    } else if (ch >= '0' && ch <= '9') {
      if (!in_number) flush();
      in_number = true;
      ++pos;
    } else if (ch == '<' && text.substr(pos, kNumberToken.size()) == kNumberToken) {
      flush();
      tokens.emplace_back(kNumberToken);
      pos += kNumberToken.size();
    } else if (static_cast<unsigned char>(ch) < 0x80) {
      flush();
      ++pos;
    } else {
      char32_t cp = 0;
      const std::size_t len = decode_utf8(text, pos, cp);
      if (len == 0) {
        // Invalid byte: replaced by a separator.
        flush();
        ++pos;
      } else if (is_non_ascii_separator(cp)) {
        flush();
        pos += len;
      } else {
        if (in_number) flush();
        word.append(text.substr(pos, len));
        pos += len;
      }
    }
  }
  flush();
  return tokens;
}

Corpus::Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
  for (std::size_t k = 0; k < docs_.size(); ++k) {
    docs_[k].doc_id = static_cast<std::uint32_t>(k);
    token_count_ += docs_[k].tokens.size();
  }
}

Corpus Corpus::without(std::span<const std::uint32_t> removed) const {
  std::vector<bool> drop(docs_.size(), false);
  for (const auto id : removed) {
    if (id >= docs_.size()) {
      throw Error("document id " + std::to_string(id) + " out of range (corpus has " +
                  std::to_string(docs_.size()) + " documents)");
    }
    drop[id] = true;
  }
  std::vector<Document> kept;
  kept.reserve(docs_.size());
  for (std::size_t k = 0; k < docs_.size(); ++k) {
    if (!drop[k]) kept.push_back(docs_[k]);
  }
  return Corpus(std::move(kept));
}

Corpus parse_corpus(std::string_view text, const CorpusOptions& options) {
  std::vector<Document> docs;
  for (auto& record : split_records(text, options.separator)) {
    auto tokens = tokenize(text.substr(record.start, record.len));
    if (tokens.size() < options.min_len || tokens.size() > options.max_len) continue;
    Document doc;
    doc.tokens = std::move(tokens);
    doc.byte_start = record.start;
    doc.byte_len = record.len;
    doc.metadata = std::move(record.metadata);
    docs.push_back(std::move(doc));
  }
  if (docs.empty()) {
    throw Error("no documents within length bounds [" + std::to_string(options.min_len) + ", " +
                std::to_string(options.max_len) + "]");
  }
  return Corpus(std::move(docs));
}

Corpus load_corpus(const std::filesystem::path& path, const CorpusOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read corpus file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error("error while reading corpus file: " + path.string());
  try {
    return parse_corpus(buffer.str(), options);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  if (words_.size() != counts_.size()) throw Error("vocabulary words/counts size mismatch");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
      throw Error("duplicate vocabulary word: " + words_[i]);
    }
  }
}

std::int32_t Vocabulary::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? kOutOfVocabulary : static_cast<std::int32_t>(it->second);
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  for (const auto& w : words_) {
    for (const char ch : w) mix(static_cast<unsigned char>(ch));
    mix(0);
  }
  return h;
}

Vocabulary build_vocabulary(const Corpus& corpus, std::uint64_t min_count) {
  if (corpus.empty()) throw Error("cannot build a vocabulary from an empty corpus");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& doc : corpus.documents()) {
    for (const auto& token : doc.tokens) ++counts[token];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [word, count] : counts) {
    if (count >= min_count) kept.emplace_back(word, count);
  }
  if (kept.empty()) {
    throw Error("empty vocabulary: no token occurs at least " + std::to_string(min_count) + " times");
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words;
  std::vector<std::uint64_t> word_counts;
  words.reserve(kept.size());
  word_counts.reserve(kept.size());
  for (auto& [word, count] : kept) {
    words.push_back(std::move(word));
    word_counts.push_back(count);
  }
  return Vocabulary(std::move(words), std::move(word_counts));
}

EncodedDocument encode(const Document& doc, const Vocabulary& vocab) {
  EncodedDocument ids;
  ids.reserve(doc.tokens.size());
  for (const auto& token : doc.tokens) ids.push_back(vocab.find(token));
  return ids;
}

std::vector<EncodedDocument> encode(const Corpus& corpus, const Vocabulary& vocab) {
  std::vector<EncodedDocument> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus.documents()) out.push_back(encode(doc, vocab));
  return out;
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.word(static_cast<WordId>(i)) << ' ' << vocab.count(static_cast<WordId>(i)) << '\n';
  }
}

Vocabulary read_vocabulary(std::istream& in) {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto space = line.rfind(' ');
    if (space == std::string::npos || space == 0) {
      throw Error("vocabulary line " + std::to_string(line_no) + ": expected 'word count'");
    }
    words.push_back(line.substr(0, space));
    try {
      counts.push_back(std::stoull(line.substr(space + 1)));
    } catch (const std::exception&) {
      throw Error("vocabulary line " + std::to_string(line_no) + ": bad count");
    }
  }
  if (words.empty()) throw Error("empty vocabulary file");
  return Vocabulary(std::move(words), std::move(counts));
}

void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write vocabulary file: " + path.string());
  write_vocabulary(out, vocab);
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read vocabulary file: " + path.string());
  return read_vocabulary(in);
}

void write_document_index(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus.documents()) {
    out << doc.doc_id << '\t' << doc.byte_start << '\t' << doc.byte_len << '\t' << doc.tokens.size()
        << '\n';
  }
}

std::vector<DocumentIndexEntry> read_document_index(std::istream& in) {
  std::vector<DocumentIndexEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    DocumentIndexEntry e{};
    if (!(fields >> e.doc_id >> e.byte_start >> e.byte_len >> e.token_count)) {
      throw Error("malformed document index line: " + line);
    }
    entries.push_back(e);
  }
  return entries;
}

}  // namespace wordbias
