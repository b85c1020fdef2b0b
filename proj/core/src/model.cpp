#include "hgcf/model.hpp"

#include <cmath>

#include "hgcf/error.hpp"

namespace hgcf {

void validate(const ModelConfig& cfg) {
  if (cfg.dim < 1) throw InputError("embedding size must be at least 1");
  if (cfg.layers < 0) throw InputError("layer count must be non-negative");
  if (!(cfg.leaky_slope > 0.0 && cfg.leaky_slope < 1.0)) throw InputError("LeakyReLU slope must lie in (0, 1)");
  if (!(cfg.message_dropout >= 0.0 && cfg.message_dropout < 1.0)) throw InputError("dropout must lie in [0, 1)");
  if (cfg.layers == 0 && !cfg.include_layer0) throw InputError("no layers left to concatenate");
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = static_cast<std::size_t>(embeddings.size());
  for (const auto& w : w1) n += static_cast<std::size_t>(w.size());
  for (const auto& w : w2) n += static_cast<std::size_t>(w.size());
  return n;
}

ModelParams init_params(const ModelConfig& cfg, Index n_nodes, std::uint64_t seed) {
  validate(cfg);
  if (n_nodes < 2) throw InputError("need at least two nodes");
  Rng rng(derive_seed(seed, "init"));
  auto glorot = [&rng](Matrix& m, double fan_in, double fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(-bound, bound);
  };
  ModelParams p;
  p.embeddings.resize(n_nodes, cfg.dim);
  glorot(p.embeddings, n_nodes, cfg.dim);
  for (int l = 0; l < cfg.layers; ++l) {
    Matrix w1(cfg.dim, cfg.dim);
    Matrix w2(cfg.dim, cfg.dim);
    glorot(w1, cfg.dim, cfg.dim);
    glorot(w2, cfg.dim, cfg.dim);
    p.w1.push_back(std::move(w1));
    p.w2.push_back(std::move(w2));
  }
  return p;
}

namespace {

void check_shapes(const ModelParams& params, const NormalizedAdjacency& layer1, const NormalizedAdjacency& full,
                  const ModelConfig& cfg) {
  if (params.embeddings.cols() != cfg.dim) throw InputError("embedding width does not match the configuration");
  if (static_cast<int>(params.w1.size()) != cfg.layers || static_cast<int>(params.w2.size()) != cfg.layers)
    throw InputError("weight count does not match the layer count");
  for (int l = 0; l < cfg.layers; ++l) {
    const auto& w1 = params.w1[static_cast<std::size_t>(l)];
    const auto& w2 = params.w2[static_cast<std::size_t>(l)];
    if (w1.rows() != cfg.dim || w1.cols() != cfg.dim || w2.rows() != cfg.dim || w2.cols() != cfg.dim)
      throw InputError("layer weight has the wrong shape");
  }
  if (full.matrix.n_nodes() != params.n_nodes()) throw InputError("adjacency does not match the embedding rows");
  if (cfg.layers > 0 && layer1.matrix.n_nodes() != params.n_nodes())
    throw InputError("layer-1 adjacency does not match the embedding rows");
}

}  // namespace

ForwardTrace propagate(const ModelParams& params, const NormalizedAdjacency& layer1, const NormalizedAdjacency& full,
                       const ModelConfig& cfg, Rng* dropout_rng) {
  validate(cfg);
  check_shapes(params, layer1, full, cfg);
  ForwardTrace trace;
  trace.n_users = full.matrix.n_users();
  trace.embeddings.reserve(static_cast<std::size_t>(cfg.layers) + 1);
  trace.embeddings.push_back(params.embeddings);
  trace.layers.reserve(static_cast<std::size_t>(cfg.layers));

  const double slope = cfg.leaky_slope;
  for (int l = 0; l < cfg.layers; ++l) {
    const NormalizedAdjacency& adj = l == 0 ? layer1 : full;
    const Matrix& h = trace.embeddings.back();
    LayerTrace lt;
    lt.adjacency = &adj;
    adj.matrix.multiply(h, lt.aggregated);
    const auto diag = adj.matrix.diagonal();
    lt.neighbor_sum = lt.aggregated;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      const double w = diag[static_cast<std::size_t>(i)];
      if (w != 0.0) lt.neighbor_sum.row(i) -= w * h.row(i);
    }
    lt.interaction = lt.neighbor_sum.cwiseProduct(h);
    lt.pre_activation.noalias() = lt.aggregated * params.w1[static_cast<std::size_t>(l)];
    lt.pre_activation.noalias() += lt.interaction * params.w2[static_cast<std::size_t>(l)];

    Matrix out = lt.pre_activation.unaryExpr([slope](double z) { return z > 0.0 ? z : slope * z; });
    if (dropout_rng != nullptr && cfg.message_dropout > 0.0) {
      const double keep = 1.0 - cfg.message_dropout;
      lt.dropout_mask.resize(out.rows(), out.cols());
      for (Eigen::Index k = 0; k < out.size(); ++k)
        lt.dropout_mask.data()[k] = dropout_rng->uniform01() < keep ? 1.0 / keep : 0.0;
      out = out.cwiseProduct(lt.dropout_mask);
    }
    trace.layers.push_back(std::move(lt));
    trace.embeddings.push_back(std::move(out));
  }
  return trace;
}

FinalEmbeddings::FinalEmbeddings(const ForwardTrace& trace, bool include_layer0)
    : n_users_(trace.n_users), first_layer_(include_layer0 ? 0 : 1) {
  const auto count = static_cast<Eigen::Index>(trace.embeddings.size()) - first_layer_;
  if (count <= 0) throw InputError("no layers to concatenate");
  const auto& base = trace.embeddings.front();
  const Eigen::Index d = base.cols();
  rows_.resize(base.rows(), d * count);
  for (Eigen::Index k = 0; k < count; ++k)
    rows_.middleCols(k * d, d) = trace.embeddings[static_cast<std::size_t>(first_layer_ + k)];
}

double FinalEmbeddings::score(Index user, Index item) const {
  if (user < 0 || user >= n_users_ || item < 0 || item >= n_items()) throw InputError("score: index out of range");
  return rows_.row(user).dot(rows_.row(n_users_ + item));
}

Vector FinalEmbeddings::score_all_items(Index user) const {
  if (user < 0 || user >= n_users_) throw InputError("score_all_items: user out of range");
  return rows_.bottomRows(n_items()) * rows_.row(user).transpose();
}

}  // namespace hgcf
