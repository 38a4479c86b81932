#include "wordbias/synthetic.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "wordbias/error.hpp"

namespace wordbias {
namespace {

constexpr const char* kFunctionWords[] = {
    "the",   "of",    "and",   "to",    "a",     "in",    "is",    "that",  "for",   "it",    "as",    "was",
    "with",  "be",    "by",    "on",    "not",   "this",  "are",   "at",    "from",  "or",    "an",    "they",
    "which", "one",   "you",   "were",  "all",   "we",    "there", "been",  "if",    "has",   "when",  "who",
    "will",  "more",  "no",    "out",   "so",    "said",  "what",  "up",    "its",   "about", "into",  "than",
    "them",  "can",   "only",  "other", "new",   "some",  "could", "time",  "these", "two",   "may",   "then",
    "do",    "first", "any",   "my",    "now",   "such",  "like",  "our",   "over",  "me",    "even",  "most",
    "made",  "after", "also",  "did",   "many",  "before", "must", "through", "back", "years", "where", "much",
    "your",  "way",   "well",  "down",  "should", "because", "each", "just", "those", "people", "how", "too",
    "little", "state", "good", "very",  "make",  "world", "still", "own",   "see",   "men",   "work",  "long",
};

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Cumulative Zipf(1) weights over n ranks.
std::vector<double> zipf_table(std::size_t n) {
  std::vector<double> cdf(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    total += 1.0 / static_cast<double>(k + 1);
    cdf[k] = total;
  }
  for (auto& c : cdf) c /= total;
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, std::mt19937_64& rng) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), uniform01(rng));
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

// Pronounceable letter-only words that cannot collide with `taken`.
std::vector<std::string> pseudo_words(std::size_t n, std::set<std::string>& taken, std::mt19937_64& rng) {
  static constexpr char kConsonants[] = "bdfgklmnprstvz";
  static constexpr char kVowels[] = "aeiou";
  std::vector<std::string> out;
  while (out.size() < n) {
    const std::size_t syllables = 2 + rng() % 2;
    std::string w;
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kConsonants[rng() % (sizeof(kConsonants) - 1)];
      w += kVowels[rng() % (sizeof(kVowels) - 1)];
    }
    if (taken.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

std::string synthetic_corpus(const WeatSpec& spec, const SyntheticOptions& options) {
  spec.validate();
  if (options.n_docs == 0) throw Error("synthetic corpus needs at least one document");
  if (options.n_topics == 0) throw Error("synthetic corpus needs at least one topic");
  std::mt19937_64 rng(options.seed);
  std::set<std::string> taken(std::begin(kFunctionWords), std::end(kFunctionWords));
  for (const auto* set : {&spec.s, &spec.t, &spec.a, &spec.b}) taken.insert(set->begin(), set->end());

  std::vector<std::vector<std::string>> topics;
  for (std::size_t t = 0; t < options.n_topics; ++t) topics.push_back(pseudo_words(options.words_per_topic, taken, rng));

  const std::vector<std::string> function_words(std::begin(kFunctionWords), std::end(kFunctionWords));
  const auto function_cdf = zipf_table(function_words.size());
  const auto topic_cdf = zipf_table(options.words_per_topic);
  const auto target_cdf = zipf_table(spec.s.size());
  const auto attribute_cdf = zipf_table(spec.a.size());

  std::string text;
  for (std::size_t d = 0; d < options.n_docs; ++d) {
    const std::size_t topic = rng() % options.n_topics;
    // 0: none, 1: S or A, 2: T or B.
    int target = 0;
    if (uniform01(rng) >= options.p_untargeted) target = 1 + static_cast<int>(rng() % 2);

    int attribute = 0;
    const double u = uniform01(rng);
    if (target != 0) {
      if (u < options.p_stereotype) {
        attribute = target;
      } else if (u < options.p_stereotype + options.p_counter) {
        attribute = 3 - target;
      }
    } else if (u < 0.3) {
      attribute = 1;
    } else if (u < 0.6) {
      attribute = 2;
    }

    const std::size_t len = options.min_len + rng() % (options.max_len - options.min_len + 1);
    for (std::size_t k = 0; k < len; ++k) {
      const double v = uniform01(rng);
      const std::string* word;
      if (attribute != 0 && v < options.p_attribute) {
        word = &(attribute == 1 ? spec.a : spec.b)[draw(attribute_cdf, rng)];
      } else if (target != 0 && v < options.p_attribute + options.p_target) {
        word = &(target == 1 ? spec.s : spec.t)[draw(target_cdf, rng)];
      } else if (v < options.p_attribute + options.p_target + options.p_function) {
        word = &function_words[draw(function_cdf, rng)];
      } else {
        word = &topics[topic][draw(topic_cdf, rng)];
      }
      if (k > 0) text += ' ';
      text += *word;
    }
    text += "\n\n";
  }
  return text;
}

}  // namespace wordbias
