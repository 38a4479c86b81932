#pragma once

#include <cstdint>
#include <string>

#include "wordbias/metrics.hpp"

namespace wordbias {

/// A small generated corpus with a planted WEAT association. Each document
/// leans towards S or T words (or neither) and towards A or B words (or
/// neither); S-leaning documents favour A, T-leaning ones favour B.
/// Everything else is topical pseudo-word filler and common function words.
struct SyntheticOptions {
  std::size_t n_docs = 2000;
  std::size_t n_topics = 20;
  std::size_t words_per_topic = 120;
  std::size_t min_len = 80;
  std::size_t max_len = 240;
  double p_function = 0.4;
  double p_target = 0.03;
  double p_attribute = 0.03;
  /// Documents that use no target words.
  double p_untargeted = 0.2;
  /// Attribute lean of a targeted document: stereotypical, counter, or none.
  double p_stereotype = 0.4;
  double p_counter = 0.25;
  std::uint64_t seed = 2024;
};

/// Blank-line separated documents, deterministic for a fixed seed.
std::string synthetic_corpus(const WeatSpec& spec, const SyntheticOptions& options = {});

}  // namespace wordbias
