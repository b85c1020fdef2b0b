#pragma once

#include <cstdint>
#include <vector>

#include "hgcf/dataset.hpp"
#include "hgcf/matrix.hpp"
#include "hgcf/random.hpp"
#include "hgcf/sparse.hpp"

namespace hgcf {

struct ModelConfig {
  Index dim = 64;
  int layers = 2;  // 0 gives plain BPR matrix factorization
  double leaky_slope = 0.2;
  double message_dropout = 0.0;
  bool include_layer0 = true;  // concatenate base embeddings into the final representation
};

// Throws InputError on an invalid configuration.
void validate(const ModelConfig& cfg);

struct ModelParams {
  Matrix embeddings;       // n_nodes x dim, users first then items
  std::vector<Matrix> w1;  // per layer, dim x dim, applied as H * W
  std::vector<Matrix> w2;

  Index n_nodes() const { return static_cast<Index>(embeddings.rows()); }
  std::size_t parameter_count() const;
};

// Glorot-uniform initialization, deterministic in seed.
ModelParams init_params(const ModelConfig& cfg, Index n_nodes, std::uint64_t seed);

struct LayerTrace {
  const NormalizedAdjacency* adjacency = nullptr;
  Matrix aggregated;      // Ã H, self-loop included
  Matrix neighbor_sum;    // Ã H without the diagonal term
  Matrix interaction;     // neighbor_sum ⊙ H
  Matrix pre_activation;  // aggregated W1 + interaction W2
  Matrix dropout_mask;    // empty when dropout is off; entries are 0 or 1/(1-p)
};

struct ForwardTrace {
  Index n_users = 0;
  std::vector<Matrix> embeddings;  // E^(0) .. E^(L), after dropout
  std::vector<LayerTrace> layers;
};

// One propagation layer l:
//   E^(l) = LeakyReLU(Ã E W1 + ((Ã - diag Ã) E ⊙ E) W2)
// Layer 1 reads `layer1`, deeper layers read `full`. Dropout is applied to
// layer outputs only when `dropout_rng` is non-null and cfg.message_dropout > 0.
ForwardTrace propagate(const ModelParams& params, const NormalizedAdjacency& layer1,
                       const NormalizedAdjacency& full, const ModelConfig& cfg, Rng* dropout_rng = nullptr);

// Per-node concatenation of the propagated layers.
class FinalEmbeddings {
 public:
  FinalEmbeddings() = default;
  FinalEmbeddings(const ForwardTrace& trace, bool include_layer0 = true);

  Index width() const { return static_cast<Index>(rows_.cols()); }
  Index n_users() const { return n_users_; }
  Index n_items() const { return static_cast<Index>(rows_.rows()) - n_users_; }
  const Matrix& rows() const { return rows_; }
  int first_layer() const { return first_layer_; }

  // Throws InputError on out-of-range indices. `item` is in [0, n_items).
  double score(Index user, Index item) const;
  Vector score_all_items(Index user) const;

 private:
  Matrix rows_;
  Index n_users_ = 0;
  int first_layer_ = 0;
};

}  // namespace hgcf
