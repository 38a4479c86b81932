#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wordbias/corpus.hpp"
#include "wordbias/glove.hpp"

namespace wordbias {

/// Two equal-sized target sets (S, T) and two equal-sized attribute sets (A, B).
struct WeatSpec {
  std::string name;
  std::vector<std::string> s;
  std::vector<std::string> t;
  std::vector<std::string> a;
  std::vector<std::string> b;

  /// Checks set sizes and disjointness.
  void validate() const;
};

/// Text format, one field per line:
///   name: WEAT1
///   S: science, technology, ...
/// with keys name, S, T, A, B. Blank lines and `#` comments are ignored.
WeatSpec parse_weat_spec(std::istream& in);
WeatSpec load_weat_spec(const std::filesystem::path& path);
void write_weat_spec(std::ostream& out, const WeatSpec& spec);

/// A WeatSpec bound to vocabulary ids. `words` holds the distinct ids of
/// S u T u A u B (sorted); s/t/a/b index into it.
struct ResolvedWeat {
  std::string name;
  std::vector<WordId> words;
  std::vector<std::string> labels;
  std::vector<std::size_t> s;
  std::vector<std::size_t> t;
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;

  std::optional<std::size_t> position(WordId id) const;
  std::vector<std::size_t> targets() const;
};

/// Throws listing every word missing from the vocabulary.
ResolvedWeat resolve(const WeatSpec& spec, const Vocabulary& vocab);

enum class StdDev { kSample, kPopulation };

struct WeatOptions {
  StdDev std_dev = StdDev::kSample;
};

/// The |U| x D matrix of WEAT word vectors, row k = w[words[k]].
Matrix gather(const Matrix& w, const ResolvedWeat& spec);

/// a.b / (|a||b|). Throws ZeroNormError.
double cosine(const Vector& a, const Vector& b);

/// g(c, A, B): mean cosine with A minus mean cosine with B. `local` is
/// gather()'s output.
double weat_assoc(const Vector& wc, const Matrix& local, const ResolvedWeat& spec);

/// Effect size from an arbitrary similarity between positions of `words`,
/// sim(target_position, attribute_position).
double effect_size_from(const ResolvedWeat& spec, const std::function<double(std::size_t, std::size_t)>& sim,
                        const WeatOptions& options = {});

/// Effect size on the gathered WEAT vectors.
double effect_size(const Matrix& local, const ResolvedWeat& spec, const WeatOptions& options = {});

/// Effect size on a full V x D embedding.
double weat_effect_size(const Matrix& w, const ResolvedWeat& spec, const WeatOptions& options = {});

/// Gradient of effect_size with respect to each gathered row (|U| x D).
Matrix effect_size_gradient(const Matrix& local, const ResolvedWeat& spec, const WeatOptions& options = {});

/// Gradient with respect to every involved word vector; other words have a
/// zero gradient and are omitted.
std::map<WordId, Vector> weat_gradient(const Matrix& w, const ResolvedWeat& spec, const WeatOptions& options = {});

/// Cosine of each target with the attribute axis
/// normalize(mean normalized A - mean normalized B).
std::vector<double> projection_bias(const Matrix& w, const ResolvedWeat& spec, std::span<const WordId> targets);

}  // namespace wordbias
