#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hgcf/dataset.hpp"
#include "hgcf/hetgraph.hpp"
#include "hgcf/model.hpp"

namespace hgcf {

// Reading of the per-embedding penalty in the regularizer.
enum class L2Norm {
  Squared,  // ||e||^2
  Plain,    // ||e||
};

const char* l2_norm_name(L2Norm n);
L2Norm parse_l2_norm(const std::string& name);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  AdamConfig adam;
  double lambda = 1e-5;
  std::size_t batch_size = 1024;
  int epochs = 400;
  int eval_every = 1;  // 0 disables validation and keeps the last parameters
  int patience = 10;   // evaluations without improvement before stopping; 0 = never stop early
  std::uint64_t seed = 0;
  L2Norm l2_norm = L2Norm::Squared;
};

void validate(const TrainConfig& cfg);

// Summed BPR loss: sum_i -ln sigmoid(pos_i - neg_i). Throws DivergenceError on non-finite input.
double bpr_loss(std::span<const double> scores_pos, std::span<const double> scores_neg);

// Sum over triples of the base-embedding penalties of u, v and v-.
double l2_reg(const ModelParams& params, std::span<const BprTriple> batch, Index n_users,
              L2Norm norm = L2Norm::Squared);

struct Gradients {
  Matrix embeddings;
  std::vector<Matrix> w1;
  std::vector<Matrix> w2;

  static Gradients zeros_like(const ModelParams& params);
  bool all_finite() const;
};

struct LossBreakdown {
  double total = 0.0;  // bpr + lambda * l2
  double bpr = 0.0;
  double l2 = 0.0;
};

LossBreakdown batch_loss(const ForwardTrace& trace, std::span<const BprTriple> batch, const ModelParams& params,
                         const ModelConfig& cfg, double lambda, L2Norm norm = L2Norm::Squared);

struct BackwardResult {
  LossBreakdown loss;
  Gradients grads;
};

// Exact gradient of bpr + lambda * l2 with respect to the embeddings and
// every layer weight, by reverse traversal of the trace. Adjacency weights
// are constants.
BackwardResult backward(const ForwardTrace& trace, std::span<const BprTriple> batch, const ModelParams& params,
                        const ModelConfig& cfg, double lambda, L2Norm norm = L2Norm::Squared);

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  long step = 0;

  static AdamState for_params(const ModelParams& params);
};

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state, const AdamConfig& cfg);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  bool evaluated = false;
  double val_recall20 = 0.0;
  double val_ndcg20 = 0.0;
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;

  // epoch,loss,l1,l2,val_recall20,val_ndcg20,seconds (unevaluated epochs leave
  // the validation cells empty)
  std::string to_csv(bool include_seconds = true) const;
};

struct TrainResult {
  ModelParams best;  // parameters at the best validation recall@20 (or last epoch)
  ModelParams last;
  TrainLog log;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

TrainResult train(const InteractionDataset& ds, const PropagationGraphs& graphs, const ModelConfig& model_cfg,
                  const TrainConfig& train_cfg, const EpochCallback& on_epoch = {});

// Final embeddings for a parameter set (no dropout).
FinalEmbeddings embed(const ModelParams& params, const PropagationGraphs& graphs, const ModelConfig& cfg);

}  // namespace hgcf
