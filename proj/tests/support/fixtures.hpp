#pragma once

#include <cstdint>
#include <vector>

#include "hgcf/dataset.hpp"
#include "hgcf/model.hpp"

namespace hgcf::fixtures {

// Dataset built directly from index lists; lists are sorted on the way in.
InteractionDataset make_dataset(Index n_items, std::vector<std::vector<Index>> train,
                                std::vector<std::vector<Index>> test = {},
                                std::vector<std::vector<Index>> validation = {});

// Three users over five items: u1 {v1,v2}, u2 {v1,v2,v3,v4}, u3 {v4,v5}
// (zero-based indices in the returned dataset).
InteractionDataset fig1_toy();

// Each (user, item) pair present independently with probability `density`;
// every user gets at least one item.
InteractionDataset random_dataset(Index n_users, Index n_items, double density, std::uint64_t seed);

// Two user blocks, each preferring its own half of the items, split 80/10/10.
InteractionDataset planted_blocks(Index n_users, Index n_items, double in_block, double out_block, std::uint64_t seed);

// Mean over users of the fraction of (train positive, non-interacted item)
// pairs the embeddings order correctly. Validation and test items count as
// neither positives nor negatives.
double training_auc(const FinalEmbeddings& fe, const InteractionDataset& ds);

}  // namespace hgcf::fixtures
