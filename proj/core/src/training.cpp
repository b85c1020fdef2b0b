#include "hgcf/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "hgcf/error.hpp"
#include "hgcf/eval.hpp"
#include "hgcf/log.hpp"
#include "text_format.hpp"

namespace hgcf {

const char* l2_norm_name(L2Norm n) { return n == L2Norm::Squared ? "squared" : "plain"; }

L2Norm parse_l2_norm(const std::string& name) {
  if (name == "squared") return L2Norm::Squared;
  if (name == "plain") return L2Norm::Plain;
  throw InputError("unknown l2 norm '" + name + "' (expected squared or plain)");
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.adam.lr > 0.0)) throw InputError("learning rate must be positive");
  if (!(cfg.lambda >= 0.0)) throw InputError("lambda must be non-negative");
  if (cfg.batch_size < 1) throw InputError("batch size must be at least 1");
  if (cfg.epochs < 0) throw InputError("epoch count must be non-negative");
  if (cfg.eval_every < 0 || cfg.patience < 0) throw InputError("eval_every and patience must be non-negative");
  if (!(cfg.adam.beta1 >= 0.0 && cfg.adam.beta1 < 1.0 && cfg.adam.beta2 >= 0.0 && cfg.adam.beta2 < 1.0))
    throw InputError("Adam betas must lie in [0, 1)");
}

namespace {

// -ln sigmoid(x), evaluated without overflow.
double neg_log_sigmoid(double x) { return std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// sigmoid(-x)
double sigmoid_neg(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double penalty(const Matrix& e, Index row, L2Norm norm) {
  const double sq = e.row(row).squaredNorm();
  return norm == L2Norm::Squared ? sq : std::sqrt(sq);
}

void check_batch(std::span<const BprTriple> batch, Index n_users, Index n_nodes) {
  const Index n_items = n_nodes - n_users;
  for (const auto& t : batch) {
    if (t.user < 0 || t.user >= n_users || t.pos < 0 || t.pos >= n_items || t.neg < 0 || t.neg >= n_items)
      throw InputError("triple index out of range");
  }
}

// Sum over the concatenated layers of e*_a . e*_b.
double concat_dot(const ForwardTrace& trace, int first, Index a, Index b) {
  double s = 0.0;
  for (std::size_t l = static_cast<std::size_t>(first); l < trace.embeddings.size(); ++l)
    s += trace.embeddings[l].row(a).dot(trace.embeddings[l].row(b));
  return s;
}

}  // namespace

double bpr_loss(std::span<const double> scores_pos, std::span<const double> scores_neg) {
  if (scores_pos.size() != scores_neg.size()) throw InputError("bpr_loss: length mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < scores_pos.size(); ++i) {
    if (!std::isfinite(scores_pos[i]) || !std::isfinite(scores_neg[i]))
      throw DivergenceError("bpr_loss: non-finite score");
    loss += neg_log_sigmoid(scores_pos[i] - scores_neg[i]);
  }
  return loss;
}

double l2_reg(const ModelParams& params, std::span<const BprTriple> batch, Index n_users, L2Norm norm) {
  check_batch(batch, n_users, params.n_nodes());
  double total = 0.0;
  for (const auto& t : batch) {
    total += penalty(params.embeddings, t.user, norm);
    total += penalty(params.embeddings, n_users + t.pos, norm);
    total += penalty(params.embeddings, n_users + t.neg, norm);
  }
  return total;
}

Gradients Gradients::zeros_like(const ModelParams& params) {
  Gradients g;
  g.embeddings = Matrix::Zero(params.embeddings.rows(), params.embeddings.cols());
  for (const auto& w : params.w1) g.w1.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& w : params.w2) g.w2.push_back(Matrix::Zero(w.rows(), w.cols()));
  return g;
}

bool Gradients::all_finite() const {
  if (!embeddings.allFinite()) return false;
  for (const auto& w : w1)
    if (!w.allFinite()) return false;
  for (const auto& w : w2)
    if (!w.allFinite()) return false;
  return true;
}

LossBreakdown batch_loss(const ForwardTrace& trace, std::span<const BprTriple> batch, const ModelParams& params,
                         const ModelConfig& cfg, double lambda, L2Norm norm) {
  const Index n_users = trace.n_users;
  check_batch(batch, n_users, params.n_nodes());
  const int first = cfg.include_layer0 ? 0 : 1;
  std::vector<double> pos(batch.size());
  std::vector<double> neg(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    pos[k] = concat_dot(trace, first, batch[k].user, n_users + batch[k].pos);
    neg[k] = concat_dot(trace, first, batch[k].user, n_users + batch[k].neg);
  }
  LossBreakdown out;
  out.bpr = bpr_loss(pos, neg);
  out.l2 = l2_reg(params, batch, n_users, norm);
  out.total = out.bpr + lambda * out.l2;
  return out;
}

BackwardResult backward(const ForwardTrace& trace, std::span<const BprTriple> batch, const ModelParams& params,
                        const ModelConfig& cfg, double lambda, L2Norm norm) {
  validate(cfg);
  const int layers = cfg.layers;
  if (static_cast<int>(trace.layers.size()) != layers || trace.embeddings.size() != trace.layers.size() + 1)
    throw InputError("trace does not match the layer count");
  if (trace.embeddings.front().rows() != params.embeddings.rows() ||
      trace.embeddings.front().cols() != params.embeddings.cols())
    throw InputError("trace does not match the parameters");
  const Index n_users = trace.n_users;
  check_batch(batch, n_users, params.n_nodes());
  const int first = cfg.include_layer0 ? 0 : 1;
  const auto n = params.embeddings.rows();
  const auto d = params.embeddings.cols();

  BackwardResult result;
  result.grads = Gradients::zeros_like(params);

  // Gradient of the loss with respect to each layer's output, seeded by the
  // prediction layer.
  std::vector<Matrix> upstream(static_cast<std::size_t>(layers) + 1, Matrix::Zero(n, d));
  std::vector<double> pos(batch.size());
  std::vector<double> neg(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& t = batch[k];
    const Index u = t.user;
    const Index vp = n_users + t.pos;
    const Index vn = n_users + t.neg;
    pos[k] = concat_dot(trace, first, u, vp);
    neg[k] = concat_dot(trace, first, u, vn);
    const double g = -sigmoid_neg(pos[k] - neg[k]);
    for (int l = first; l <= layers; ++l) {
      const Matrix& e = trace.embeddings[static_cast<std::size_t>(l)];
      Matrix& up = upstream[static_cast<std::size_t>(l)];
      up.row(u) += g * (e.row(vp) - e.row(vn));
      up.row(vp) += g * e.row(u);
      up.row(vn) -= g * e.row(u);
    }
  }
  result.loss.bpr = bpr_loss(pos, neg);
  result.loss.l2 = l2_reg(params, batch, n_users, norm);
  result.loss.total = result.loss.bpr + lambda * result.loss.l2;

  const double slope = cfg.leaky_slope;
  Matrix d_agg;
  Matrix d_int;
  Matrix spread;
  for (int l = layers; l >= 1; --l) {
    const auto li = static_cast<std::size_t>(l - 1);
    const LayerTrace& lt = trace.layers[li];
    const Matrix& h = trace.embeddings[li];
    Matrix dz = upstream[static_cast<std::size_t>(l)];
    if (lt.dropout_mask.size() > 0) dz = dz.cwiseProduct(lt.dropout_mask);
    dz = dz.cwiseProduct(lt.pre_activation.unaryExpr([slope](double z) { return z > 0.0 ? 1.0 : slope; }));

    result.grads.w1[li].noalias() = lt.aggregated.transpose() * dz;
    result.grads.w2[li].noalias() = lt.interaction.transpose() * dz;
    d_agg.noalias() = dz * params.w1[li].transpose();
    d_int.noalias() = dz * params.w2[li].transpose();

    // interaction = (Ã H - diag(Ã) H) ⊙ H, aggregated = Ã H. Ã is symmetric,
    // so Ãᵀ G is computed as Ã G.
    Matrix d_neighbor = d_int.cwiseProduct(h);
    Matrix& dh = upstream[li];
    dh += d_int.cwiseProduct(lt.neighbor_sum);
    lt.adjacency->matrix.multiply(d_agg + d_neighbor, spread);
    dh += spread;
    const auto diag = lt.adjacency->matrix.diagonal();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = diag[static_cast<std::size_t>(i)];
      if (w != 0.0) dh.row(i) -= w * d_neighbor.row(i);
    }
  }
  result.grads.embeddings = std::move(upstream.front());

  if (lambda != 0.0) {
    Matrix& de = result.grads.embeddings;
    const Matrix& e = params.embeddings;
    auto add_penalty = [&](Index row) {
      if (norm == L2Norm::Squared) {
        de.row(row) += 2.0 * lambda * e.row(row);
      } else {
        const double len = e.row(row).norm();
        if (len > 0.0) de.row(row) += (lambda / len) * e.row(row);
      }
    };
    for (const auto& t : batch) {
      add_penalty(t.user);
      add_penalty(n_users + t.pos);
      add_penalty(n_users + t.neg);
    }
  }
  return result;
}

AdamState AdamState::for_params(const ModelParams& params) {
  return {Gradients::zeros_like(params), Gradients::zeros_like(params), 0};
}

namespace {

void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, const AdamConfig& cfg, double c1, double c2) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols() || m.rows() != grad.rows() ||
      m.cols() != grad.cols() || v.rows() != grad.rows() || v.cols() != grad.cols())
    throw InputError("adam_step: shape mismatch");
  const double b1 = cfg.beta1;
  const double b2 = cfg.beta2;
  double* p = param.data();
  const double* g = grad.data();
  double* mm = m.data();
  double* vv = v.data();
  for (Eigen::Index k = 0; k < param.size(); ++k) {
    mm[k] = b1 * mm[k] + (1.0 - b1) * g[k];
    vv[k] = b2 * vv[k] + (1.0 - b2) * g[k] * g[k];
    const double m_hat = mm[k] / c1;
    const double v_hat = vv[k] / c2;
    p[k] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

}  // namespace

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state, const AdamConfig& cfg) {
  if (grads.w1.size() != params.w1.size() || grads.w2.size() != params.w2.size() ||
      state.first_moment.w1.size() != params.w1.size() || state.second_moment.w1.size() != params.w1.size())
    throw InputError("adam_step: layer count mismatch");
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  adam_update(params.embeddings, grads.embeddings, state.first_moment.embeddings, state.second_moment.embeddings,
              cfg, c1, c2);
  for (std::size_t l = 0; l < params.w1.size(); ++l) {
    adam_update(params.w1[l], grads.w1[l], state.first_moment.w1[l], state.second_moment.w1[l], cfg, c1, c2);
    adam_update(params.w2[l], grads.w2[l], state.first_moment.w2[l], state.second_moment.w2[l], cfg, c1, c2);
  }
}

std::string TrainLog::to_csv(bool include_seconds) const {
  std::string out = include_seconds ? "epoch,loss,l1,l2,val_recall20,val_ndcg20,seconds\n"
                                    : "epoch,loss,l1,l2,val_recall20,val_ndcg20\n";
  for (const auto& r : epochs) {
    out += std::to_string(r.epoch) + "," + detail::format_double(r.loss) + "," + detail::format_double(r.l1) + "," +
           detail::format_double(r.l2) + ",";
    if (r.evaluated) out += detail::format_double(r.val_recall20);
    out += ",";
    if (r.evaluated) out += detail::format_double(r.val_ndcg20);
    if (include_seconds) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", r.seconds);
      out += std::string(",") + buf;
    }
    out += "\n";
  }
  return out;
}

FinalEmbeddings embed(const ModelParams& params, const PropagationGraphs& graphs, const ModelConfig& cfg) {
  return FinalEmbeddings(propagate(params, graphs.layer1, graphs.full, cfg), cfg.include_layer0);
}

TrainResult train(const InteractionDataset& ds, const PropagationGraphs& graphs, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, const EpochCallback& on_epoch) {
  validate(model_cfg);
  validate(train_cfg);
  const Index n_nodes = ds.n_users + ds.n_items;
  if (graphs.full.matrix.n_nodes() != n_nodes || graphs.full.matrix.n_users() != ds.n_users)
    throw InputError("graph does not match the dataset");

  const TripleSampler sampler(ds);
  ModelParams params = init_params(model_cfg, n_nodes, derive_seed(train_cfg.seed, "model"));
  AdamState state = AdamState::for_params(params);
  Rng sample_rng(derive_seed(train_cfg.seed, "sampler"));
  Rng dropout_rng(derive_seed(train_cfg.seed, "dropout"));
  Rng* dropout = model_cfg.message_dropout > 0.0 ? &dropout_rng : nullptr;

  const std::size_t n_train = ds.train_count();
  const std::size_t batches = (n_train + train_cfg.batch_size - 1) / train_cfg.batch_size;
  const bool can_validate = train_cfg.eval_every > 0 && ds.validation_count() > 0;

  TrainResult result;
  double best_recall = -std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t b = 0; b < batches; ++b) {
      const auto batch = sampler.sample(train_cfg.batch_size, sample_rng);
      const auto trace = propagate(params, graphs.layer1, graphs.full, model_cfg, dropout);
      auto step = backward(trace, batch, params, model_cfg, train_cfg.lambda, train_cfg.l2_norm);
      if (!std::isfinite(step.loss.total) || !step.grads.all_finite()) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << ", batch " << b + 1 << " (loss " << step.loss.total
            << "); try a smaller learning rate";
        throw DivergenceError(msg.str());
      }
      adam_step(params, step.grads, state, train_cfg.adam);
      rec.l1 += step.loss.bpr;
      rec.l2 += step.loss.l2;
    }
    rec.loss = rec.l1 + train_cfg.lambda * rec.l2;

    bool stop = false;
    if (can_validate && epoch % train_cfg.eval_every == 0) {
      EvalConfig eval_cfg;
      eval_cfg.ks = {20};
      const auto report = evaluate(embed(params, graphs, model_cfg), ds, eval_cfg, EvalTarget::Validation);
      rec.evaluated = true;
      rec.val_recall20 = report.recall_at(20);
      rec.val_ndcg20 = report.ndcg_at(20);
      if (rec.val_recall20 > best_recall) {
        best_recall = rec.val_recall20;
        result.best = params;
        result.log.best_epoch = epoch;
        stale = 0;
      } else if (train_cfg.patience > 0 && ++stale >= train_cfg.patience) {
        stop = true;
      }
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (stop) break;
  }
  result.last = params;
  if (result.log.best_epoch < 0) {
    result.best = params;
    result.log.best_epoch = result.log.epochs.empty() ? 0 : result.log.epochs.back().epoch;
  }
  return result;
}

}  // namespace hgcf
