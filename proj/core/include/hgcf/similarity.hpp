#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hgcf/dataset.hpp"

namespace hgcf {

enum class Similarity { PMI, Cosine, Jaccard };

const char* similarity_name(Similarity s);
Similarity parse_similarity(const std::string& name);

struct CooccurrenceOptions {
  // Warn when one member (item for user pairs) would contribute more than
  // this many pair updates. 0 disables the check.
  std::size_t member_pair_cap = 0;
  // With a cap set, keep a random subset of the member's interactors small
  // enough to fit under it.
  bool subsample_capped = false;
  std::uint64_t seed = 0;
  // Abort with BudgetExceeded once more distinct pairs than this exist. 0 = unlimited.
  std::size_t max_pairs = 0;
};

// Set sizes and pairwise intersection sizes for a family of sets drawn from a
// universe of `universe` elements. Only pairs with a non-empty intersection
// are stored.
struct CooccurrenceCounts {
  struct Pair {
    Index a;  // a < b
    Index b;
    Index shared;
  };

  Index universe = 0;
  std::vector<Index> set_sizes;
  std::vector<Pair> pairs;  // sorted by (a, b)

  // |S(a) ∩ S(b)|, 0 when the pair never co-occurs.
  Index shared(Index a, Index b) const;
};

// Accumulates intersections through the inverted index (member -> owning
// sets); pairs of disjoint sets are never visited.
CooccurrenceCounts cooccurrence(const std::vector<std::vector<Index>>& sets, Index universe,
                                const CooccurrenceOptions& opts = {});

// User sets V(u) over the training partition, universe = n_items.
CooccurrenceCounts user_cooccurrence(const InteractionDataset& ds, const CooccurrenceOptions& opts = {});
// Item sets U(v) over the training partition, universe = n_users.
CooccurrenceCounts item_cooccurrence(const InteractionDataset& ds, const CooccurrenceOptions& opts = {});

// Similarity from raw counts; `shared` must be positive.
//   PMI     = ln(shared * universe / (size_a * size_b))
//   Cosine  = shared / sqrt(size_a * size_b)
//   Jaccard = shared / (size_a + size_b - shared)
double similarity_from_counts(Index shared, Index size_a, Index size_b, Index universe, Similarity measure);

// Absent when the two sets do not intersect (PMI would be -inf, the others 0).
std::optional<double> similarity_weight(const CooccurrenceCounts& counts, Index a, Index b, Similarity measure);

}  // namespace hgcf
