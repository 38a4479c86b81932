#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "wordbias/cooc.hpp"
#include "wordbias/corpus.hpp"

namespace wordbias {

/// Row-major so each word's vector is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct Hyperparams {
  int dim = 50;
  double alpha = 0.75;
  double x_max = 100.0;
  int epochs = 25;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  /// Recorded for provenance; training itself only sees X.
  std::uint32_t window = 8;

  void validate() const;
};

/// min((x / x_max)^alpha, 1), with f(0) = 0.
double weight_f(double x, const Hyperparams& hyper);

/// Derivative of weight_f. Zero on the clamped side, including x = x_max.
double weight_f_derivative(double x, const Hyperparams& hyper);

/// Everything influence computations need beyond the word vectors.
struct ContextParams {
  Matrix u;
  Vector b;
  Vector c;
};

struct GloveModel {
  Matrix w;
  std::optional<ContextParams> ctx;
  Hyperparams hyper;
  std::uint64_t vocab_hash = 0;

  std::size_t vocab_size() const { return static_cast<std::size_t>(w.rows()); }
  int dim() const { return static_cast<int>(w.cols()); }

  /// Throws "context parameters unavailable" when only w was loaded.
  const ContextParams& context() const;
};

/// Sum over stored entries of f(X_ij) (w_i.u_j + b_i + c_j - log X_ij)^2.
double loss(const CoocMatrix& x, const GloveModel& model);

/// Analytic gradient of `loss` with respect to every parameter block.
struct LossGradient {
  Matrix w;
  Matrix u;
  Vector b;
  Vector c;
};
LossGradient loss_gradient(const CoocMatrix& x, const GloveModel& model);

struct TrainOptions {
  /// Called after each epoch with the summed pre-update loss of that epoch.
  std::function<void(int epoch, double loss)> on_epoch;
};

/// AdaGrad over shuffled stored entries, serial and bit-reproducible for a
/// fixed seed. Throws on a non-finite loss.
GloveModel train(const CoocMatrix& x, const Hyperparams& hyper, const TrainOptions& options = {});

/// Writes `word v1 ... vD` lines for w and, when the model carries context
/// parameters, a binary sidecar at sidecar_path(path).
void save_embeddings(const std::filesystem::path& path, const GloveModel& model, const Vocabulary& vocab);

struct LoadedEmbeddings {
  Vocabulary vocab;
  GloveModel model;
};

/// Reads the text file and, when present, its sidecar. The vocabulary is
/// reconstructed from the text file (counts are zero).
LoadedEmbeddings load_embeddings(const std::filesystem::path& path);

/// As above, additionally requiring the model to be bound to `expected`.
GloveModel load_embeddings(const std::filesystem::path& path, const Vocabulary& expected);

/// FNV-1a over the raw bytes of every parameter block.
std::uint64_t checksum(const GloveModel& model);

std::filesystem::path sidecar_path(const std::filesystem::path& embeddings);

}  // namespace wordbias
