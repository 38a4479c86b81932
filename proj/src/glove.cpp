#include "wordbias/glove.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "binary_io.hpp"
#include "wordbias/error.hpp"

namespace wordbias {
namespace {

constexpr std::uint32_t kSidecarVersion = 1;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

double residual(const GloveModel& model, const ContextParams& ctx, WordId i, WordId j, double x) {
  return model.w.row(i).dot(ctx.u.row(j)) + ctx.b[i] + ctx.c[j] - std::log(x);
}

}  // namespace

void Hyperparams::validate() const {
  if (dim < 1) throw Error("embedding dimension must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("alpha must lie in (0, 1]");
  if (!(x_max > 0.0)) throw Error("x_max must be positive");
  if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (epochs < 0) throw Error("epochs must be non-negative");
}

double weight_f(double x, const Hyperparams& hyper) {
  if (x <= 0.0) return 0.0;
  if (x >= hyper.x_max) return 1.0;
  return std::pow(x / hyper.x_max, hyper.alpha);
}

double weight_f_derivative(double x, const Hyperparams& hyper) {
  if (x <= 0.0 || x >= hyper.x_max) return 0.0;
  return hyper.alpha / hyper.x_max * std::pow(x / hyper.x_max, hyper.alpha - 1.0);
}

const ContextParams& GloveModel::context() const {
  if (!ctx) throw Error("context parameters unavailable (model loaded without its sidecar)");
  return *ctx;
}

double loss(const CoocMatrix& x, const GloveModel& model) {
  const auto& ctx = model.context();
  double total = 0.0;
  for (WordId i = 0; i < x.vocab_size(); ++i) {
    const auto row = x.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double r = residual(model, ctx, i, row.cols[k], row.weights[k]);
      total += weight_f(row.weights[k], model.hyper) * r * r;
    }
  }
  return total;
}

LossGradient loss_gradient(const CoocMatrix& x, const GloveModel& model) {
  const auto& ctx = model.context();
  LossGradient g{Matrix::Zero(model.w.rows(), model.w.cols()), Matrix::Zero(ctx.u.rows(), ctx.u.cols()),
                 Vector::Zero(ctx.b.size()), Vector::Zero(ctx.c.size())};
  for (WordId i = 0; i < x.vocab_size(); ++i) {
    const auto row = x.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const WordId j = row.cols[k];
      const double s = 2.0 * weight_f(row.weights[k], model.hyper) * residual(model, ctx, i, j, row.weights[k]);
      g.w.row(i) += s * ctx.u.row(j);
      g.u.row(j) += s * model.w.row(i);
      g.b[i] += s;
      g.c[j] += s;
    }
  }
  return g;
}

GloveModel train(const CoocMatrix& x, const Hyperparams& hyper, const TrainOptions& options) {
  hyper.validate();
  if (x.empty()) throw Error("cannot train on an empty co-occurrence matrix");
  const auto vocab_size = static_cast<Eigen::Index>(x.vocab_size());
  const int dim = hyper.dim;

  std::mt19937_64 rng(hyper.seed);
  const double scale = 1.0 / dim;
  const auto init = [&](auto& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = (uniform01(rng) - 0.5) * scale;
  };
  GloveModel model;
  model.hyper = hyper;
  model.w.resize(vocab_size, dim);
  ContextParams ctx{Matrix(vocab_size, dim), Vector(vocab_size), Vector(vocab_size)};
  init(model.w);
  init(ctx.u);
  init(ctx.b);
  init(ctx.c);

  Matrix gsq_w = Matrix::Ones(vocab_size, dim);
  Matrix gsq_u = Matrix::Ones(vocab_size, dim);
  Vector gsq_b = Vector::Ones(vocab_size);
  Vector gsq_c = Vector::Ones(vocab_size);

  struct Item {
    WordId i;
    WordId j;
    double log_x;
    double fx;
  };
  std::vector<Item> items;
  items.reserve(x.nnz());
  for (const auto& e : x.entries()) items.push_back({e.i, e.j, std::log(e.weight), weight_f(e.weight, hyper)});

  const double eta = hyper.learning_rate;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t k = items.size(); k > 1; --k) std::swap(items[k - 1], items[bounded(rng, k)]);

    double epoch_loss = 0.0;
    for (const auto& item : items) {
      double* wi = model.w.row(item.i).data();
      double* uj = ctx.u.row(item.j).data();
      double* gw = gsq_w.row(item.i).data();
      double* gu = gsq_u.row(item.j).data();
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += wi[d] * uj[d];
      const double diff = dot + ctx.b[item.i] + ctx.c[item.j] - item.log_x;
      double fdiff = item.fx * diff;
      epoch_loss += fdiff * diff;
      if (!std::isfinite(fdiff)) {
        throw Error("non-finite loss in epoch " + std::to_string(epoch + 1) + " at entry (" +
                    std::to_string(item.i) + ", " + std::to_string(item.j) + ")");
      }
      fdiff *= eta;
      for (int d = 0; d < dim; ++d) {
        const double tw = fdiff * uj[d];
        const double tu = fdiff * wi[d];
        wi[d] -= tw / std::sqrt(gw[d]);
        uj[d] -= tu / std::sqrt(gu[d]);
        gw[d] += tw * tw;
        gu[d] += tu * tu;
      }
      ctx.b[item.i] -= fdiff / std::sqrt(gsq_b[item.i]);
      ctx.c[item.j] -= fdiff / std::sqrt(gsq_c[item.j]);
      gsq_b[item.i] += fdiff * fdiff;
      gsq_c[item.j] += fdiff * fdiff;
    }
    if (!std::isfinite(epoch_loss)) {
      throw Error("non-finite loss at the end of epoch " + std::to_string(epoch + 1));
    }
    if (options.on_epoch) options.on_epoch(epoch + 1, epoch_loss);
  }
  model.ctx = std::move(ctx);
  return model;
}

std::uint64_t checksum(const GloveModel& model) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](const auto& block) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(block.data());
    for (std::size_t k = 0; k < static_cast<std::size_t>(block.size()) * sizeof(double); ++k) {
      h ^= bytes[k];
      h *= 1099511628211ULL;
    }
  };
  mix(model.w);
  if (model.ctx) {
    mix(model.ctx->u);
    mix(model.ctx->b);
    mix(model.ctx->c);
  }
  return h;
}

std::filesystem::path sidecar_path(const std::filesystem::path& embeddings) {
  auto p = embeddings;
  p += ".sidecar";
  return p;
}

void save_embeddings(const std::filesystem::path& path, const GloveModel& model, const Vocabulary& vocab) {
  if (vocab.size() != model.vocab_size()) {
    throw Error("vocabulary has " + std::to_string(vocab.size()) + " words but model has " +
                std::to_string(model.vocab_size()) + " rows");
  }
  if (model.vocab_hash != 0 && model.vocab_hash != vocab.hash()) {
    throw Error("model is bound to a different vocabulary");
  }
  {
    std::ofstream out(path);
    if (!out) throw Error("cannot write embeddings file: " + path.string());
    char num[32];
    for (Eigen::Index i = 0; i < model.w.rows(); ++i) {
      out << vocab.word(static_cast<WordId>(i));
      for (Eigen::Index d = 0; d < model.w.cols(); ++d) {
        std::snprintf(num, sizeof num, " %.17g", model.w(i, d));
        out << num;
      }
      out << '\n';
    }
    if (!out) throw Error("failed writing embeddings file: " + path.string());
  }
  if (!model.ctx) return;

  const auto& ctx = *model.ctx;
  std::string buf;
  buf.append("GLVE", 4);
  detail::put_u32(buf, kSidecarVersion);
  detail::put_u32(buf, static_cast<std::uint32_t>(model.vocab_size()));
  detail::put_u32(buf, static_cast<std::uint32_t>(model.dim()));
  for (Eigen::Index k = 0; k < ctx.u.size(); ++k) detail::put_f64(buf, ctx.u.data()[k]);
  for (Eigen::Index k = 0; k < ctx.b.size(); ++k) detail::put_f64(buf, ctx.b[k]);
  for (Eigen::Index k = 0; k < ctx.c.size(); ++k) detail::put_f64(buf, ctx.c[k]);
  detail::put_f64(buf, model.hyper.alpha);
  detail::put_f64(buf, model.hyper.x_max);
  detail::put_f64(buf, model.hyper.learning_rate);
  detail::put_u32(buf, static_cast<std::uint32_t>(model.hyper.epochs));
  detail::put_u32(buf, model.hyper.window);
  detail::put_u64(buf, model.hyper.seed);
  detail::put_u64(buf, vocab.hash());

  std::ofstream out(sidecar_path(path), std::ios::binary);
  if (!out) throw Error("cannot write sidecar file: " + sidecar_path(path).string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

LoadedEmbeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read embeddings file: " + path.string());
  std::vector<std::string> words;
  std::vector<double> values;
  long dim = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    long n = 0;
    std::string tok;
    while (fields >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        throw Error(path.string() + ": bad number '" + tok + "' on line " + std::to_string(words.size() + 1));
      }
      values.push_back(v);
      ++n;
    }
    if (dim < 0) dim = n;
    if (n != dim || n == 0) {
      throw Error(path.string() + ": dimension mismatch on line " + std::to_string(words.size() + 1) +
                  " (expected " + std::to_string(dim) + ", found " + std::to_string(n) + ")");
    }
    words.push_back(std::move(word));
  }
  if (words.empty()) throw Error(path.string() + ": no embeddings");

  LoadedEmbeddings out{Vocabulary(words, std::vector<std::uint64_t>(words.size(), 0)), {}};
  auto& model = out.model;
  const auto vocab_size = static_cast<Eigen::Index>(words.size());
  model.w = Eigen::Map<const Matrix>(values.data(), vocab_size, dim);
  model.hyper.dim = static_cast<int>(dim);
  model.vocab_hash = out.vocab.hash();

  const auto side = sidecar_path(path);
  if (!std::filesystem::exists(side)) return out;

  std::ifstream sin(side, std::ios::binary);
  const std::string data{std::istreambuf_iterator<char>(sin), std::istreambuf_iterator<char>()};
  detail::ByteReader reader(data, side.string());
  if (reader.bytes(4) != "GLVE") reader.fail("bad magic", 0);
  if (reader.u32() != kSidecarVersion) reader.fail("unsupported version", 4);
  const std::uint32_t v = reader.u32();
  const std::uint32_t d = reader.u32();
  if (v != words.size() || static_cast<long>(d) != dim) {
    throw Error(side.string() + ": dimension mismatch with embeddings (sidecar " + std::to_string(v) + "x" +
                std::to_string(d) + ", text " + std::to_string(words.size()) + "x" + std::to_string(dim) + ")");
  }
  ContextParams ctx{Matrix(vocab_size, dim), Vector(vocab_size), Vector(vocab_size)};
  for (Eigen::Index k = 0; k < ctx.u.size(); ++k) ctx.u.data()[k] = reader.f64();
  for (Eigen::Index k = 0; k < vocab_size; ++k) ctx.b[k] = reader.f64();
  for (Eigen::Index k = 0; k < vocab_size; ++k) ctx.c[k] = reader.f64();
  model.hyper.alpha = reader.f64();
  model.hyper.x_max = reader.f64();
  model.hyper.learning_rate = reader.f64();
  model.hyper.epochs = static_cast<int>(reader.u32());
  model.hyper.window = reader.u32();
  model.hyper.seed = reader.u64();
  const std::uint64_t hash = reader.u64();
  if (reader.remaining() != 0) reader.fail("trailing bytes", reader.offset());
  if (hash != out.vocab.hash()) {
    throw Error(side.string() + ": vocabulary hash mismatch (sidecar was written for a different vocabulary)");
  }
  model.ctx = std::move(ctx);
  return out;
}

GloveModel load_embeddings(const std::filesystem::path& path, const Vocabulary& expected) {
  auto loaded = load_embeddings(path);
  if (loaded.vocab.hash() != expected.hash()) {
    throw Error(path.string() + ": vocabulary hash mismatch with the supplied vocabulary");
  }
  return std::move(loaded.model);
}

}  // namespace wordbias
