#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "wordbias/corpus.hpp"
#include "wordbias/error.hpp"

using namespace wordbias;
using Tokens = std::vector<std::string>;

TEST_CASE("tokenize lowercases, splits on punctuation and collapses digit runs") {
  CHECK(tokenize("Hello, World! 42 apples") == Tokens{"hello", "world", "<num>", "apples"});
  CHECK(tokenize("rock'n'roll") == Tokens{"rock", "n", "roll"});
  CHECK(tokenize("abc123def") == Tokens{"abc", "<num>", "def"});
  CHECK(tokenize("1999-2004") == Tokens{"<num>", "<num>"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  \t\n ...").empty());
}

TEST_CASE("tokenize keeps non-ASCII letters and drops invalid bytes") {
  CHECK(tokenize("caf\xc3\xa9 au lait") == Tokens{"caf\xc3\xa9", "au", "lait"});
  CHECK(tokenize("one\xe2\x80\x94two") == Tokens{"one", "two"});
  CHECK(tokenize("bad\xff\xfe" "bytes") == Tokens{"bad", "bytes"});
}

TEST_CASE("tokenize is idempotent on its own output") {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcXYZ019 ,.;'!<>num\xc3\xa9\xff";
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const std::size_t len = rng() % 60;
    for (std::size_t k = 0; k < len; ++k) text += alphabet[rng() % alphabet.size()];
    const auto once = tokenize(text);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    CHECK(tokenize(joined) == once);
  }
}

TEST_CASE("blank-line records carry byte spans and metadata") {
  const std::string text = "first doc here\nstill first\n\n\n@@ source=b\nsecond one\n\nthird";
  const auto corpus = parse_corpus(text, {});
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0].tokens == Tokens{"first", "doc", "here", "still", "first"});
  CHECK(text.substr(corpus[0].byte_start, corpus[0].byte_len) == "first doc here\nstill first");
  CHECK(corpus[1].metadata == "source=b");
  CHECK(text.substr(corpus[1].byte_start, corpus[1].byte_len) == "second one");
  CHECK(corpus[2].doc_id == 2);
  CHECK(corpus.token_count() == 8);
}

TEST_CASE("line records and length filters") {
  CorpusOptions opts;
  opts.separator = RecordSeparator::kLine;
  opts.min_len = 2;
  opts.max_len = 3;
  const auto corpus = parse_corpus("a b\nc\nd e f g\nh i j\n", opts);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].tokens == Tokens{"a", "b"});
  CHECK(corpus[1].tokens == Tokens{"h", "i", "j"});
  CHECK(corpus[1].doc_id == 1);
}

TEST_CASE("corpus errors") {
  CHECK_THROWS_AS(parse_corpus("  \n\n ... \n", {}), Error);
  CHECK_THROWS_WITH_AS(load_corpus("/nonexistent/corpus.txt", {}), doctest::Contains("/nonexistent/corpus.txt"),
                       Error);
}

TEST_CASE("without re-indexes densely and keeps spans") {
  const auto corpus = parse_corpus("a\n\nb b\n\nc c c\n\nd", {});
  const std::vector<std::uint32_t> removed{1, 3};
  const auto kept = corpus.without(removed);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].tokens == Tokens{"a"});
  CHECK(kept[1].tokens == Tokens{"c", "c", "c"});
  CHECK(kept[1].doc_id == 1);
  CHECK(kept[1].byte_start == corpus[2].byte_start);
  CHECK(kept.token_count() == 4);
}

TEST_CASE("vocabulary orders by count then lexicographically") {
  const auto corpus = parse_corpus("b a c a\n\nb d a\n\ne", {});
  const auto vocab = build_vocabulary(corpus, 1);
  REQUIRE(vocab.size() == 5);
  CHECK(vocab.word(0) == "a");
  CHECK(vocab.count(0) == 3);
  CHECK(vocab.word(1) == "b");
  CHECK(vocab.word(2) == "c");
  CHECK(vocab.word(3) == "d");
  CHECK(vocab.word(4) == "e");
  CHECK(build_vocabulary(corpus, 2).size() == 2);
  CHECK_THROWS_AS(build_vocabulary(corpus, 4), Error);
  CHECK(vocab.find("zzz") == kOutOfVocabulary);
}

TEST_CASE("encode keeps OOV positions") {
  const auto corpus = parse_corpus("x y x\n\nx z", {});
  const auto vocab = build_vocabulary(corpus, 2);
  const auto docs = encode(corpus, vocab);
  CHECK(docs[0] == EncodedDocument{0, kOutOfVocabulary, 0});
  CHECK(docs[1] == EncodedDocument{0, kOutOfVocabulary});
}

TEST_CASE("vocabulary and document index round trip") {
  const auto corpus = parse_corpus("alpha beta beta\n\ngamma alpha beta", {});
  const auto vocab = build_vocabulary(corpus, 1);
  std::stringstream buf;
  write_vocabulary(buf, vocab);
  const auto back = read_vocabulary(buf);
  CHECK(back.hash() == vocab.hash());
  REQUIRE(back.size() == vocab.size());
  for (WordId i = 0; i < vocab.size(); ++i) CHECK(back.count(i) == vocab.count(i));

  std::stringstream idx;
  write_document_index(idx, corpus);
  const auto entries = read_document_index(idx);
  REQUIRE(entries.size() == 2);
  CHECK(entries[1].doc_id == 1);
  CHECK(entries[1].byte_start == corpus[1].byte_start);
  CHECK(entries[1].token_count == 3);
}

TEST_CASE("vocabulary hash depends on order") {
  const Vocabulary a({"x", "y"}, {2, 1});
  const Vocabulary b({"y", "x"}, {2, 1});
  CHECK(a.hash() != b.hash());
}
