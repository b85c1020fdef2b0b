#include "hgcf/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "hgcf/error.hpp"
#include "hgcf/log.hpp"
#include "hgcf/random.hpp"

namespace hgcf {

const char* similarity_name(Similarity s) {
  switch (s) {
    case Similarity::PMI: return "pmi";
    case Similarity::Cosine: return "cosine";
    case Similarity::Jaccard: return "jaccard";
  }
  return "?";
}

Similarity parse_similarity(const std::string& name) {
  if (name == "pmi" || name == "PMI") return Similarity::PMI;
  if (name == "cosine" || name == "Cosine") return Similarity::Cosine;
  if (name == "jaccard" || name == "Jaccard") return Similarity::Jaccard;
  throw InputError("unknown similarity '" + name + "' (expected pmi, cosine or jaccard)");
}

Index CooccurrenceCounts::shared(Index a, Index b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(pairs.begin(), pairs.end(), std::pair{a, b}, [](const Pair& p, const std::pair<Index, Index>& key) {
    return p.a != key.first ? p.a < key.first : p.b < key.second;
  });
  if (it == pairs.end() || it->a != a || it->b != b) return 0;
  return it->shared;
}

CooccurrenceCounts cooccurrence(const std::vector<std::vector<Index>>& sets, Index universe,
                                const CooccurrenceOptions& opts) {
  const auto n = sets.size();
  CooccurrenceCounts counts;
  counts.universe = universe;
  counts.set_sizes.reserve(n);

  std::vector<std::vector<Index>> owners(static_cast<std::size_t>(std::max<Index>(universe, 0)));
  for (std::size_t a = 0; a < n; ++a) {
    counts.set_sizes.push_back(static_cast<Index>(sets[a].size()));
    for (Index m : sets[a]) {
      if (m < 0 || m >= universe) throw InputError("cooccurrence: member out of range");
      owners[static_cast<std::size_t>(m)].push_back(static_cast<Index>(a));
    }
  }

  // Members whose interactor lists would exceed the per-member cap.
  bool subsampled = false;
  if (opts.member_pair_cap > 0) {
    std::size_t over = 0;
    Rng rng(derive_seed(opts.seed, "cooccurrence-subsample"));
    for (auto& list : owners) {
      const auto d = list.size();
      if (d < 2 || d * (d - 1) / 2 <= opts.member_pair_cap) continue;
      ++over;
      if (!opts.subsample_capped) continue;
      std::size_t keep = 1;
      while ((keep + 1) * keep / 2 <= opts.member_pair_cap) ++keep;
      rng.shuffle(std::span<Index>(list));
      list.resize(keep);
      std::sort(list.begin(), list.end());
      subsampled = true;
    }
    if (over > 0)
      log_warning(std::to_string(over) + " member(s) exceed the pair-update cap of " +
                  std::to_string(opts.member_pair_cap) + (opts.subsample_capped ? "; subsampled" : ""));
  }

  // After subsampling a set only counts the members that kept it.
  std::vector<std::vector<Index>> effective;
  if (subsampled) {
    effective.resize(n);
    for (std::size_t m = 0; m < owners.size(); ++m)
      for (Index a : owners[m]) effective[static_cast<std::size_t>(a)].push_back(static_cast<Index>(m));
  }
  const auto& member_lists = subsampled ? effective : sets;

  std::vector<Index> scratch(n, 0);
  std::vector<Index> touched;
  for (std::size_t a = 0; a < n; ++a) {
    touched.clear();
    for (Index m : member_lists[a]) {
      const auto& list = owners[static_cast<std::size_t>(m)];
      auto it = std::upper_bound(list.begin(), list.end(), static_cast<Index>(a));
      for (; it != list.end(); ++it) {
        if (scratch[static_cast<std::size_t>(*it)]++ == 0) touched.push_back(*it);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (Index b : touched) {
      counts.pairs.push_back({static_cast<Index>(a), b, scratch[static_cast<std::size_t>(b)]});
      scratch[static_cast<std::size_t>(b)] = 0;
    }
    if (opts.max_pairs > 0 && counts.pairs.size() > opts.max_pairs)
      throw BudgetExceeded("co-occurrence pairs exceed budget of " + std::to_string(opts.max_pairs));
  }
  return counts;
}

CooccurrenceCounts user_cooccurrence(const InteractionDataset& ds, const CooccurrenceOptions& opts) {
  return cooccurrence(ds.train, ds.n_items, opts);
}

CooccurrenceCounts item_cooccurrence(const InteractionDataset& ds, const CooccurrenceOptions& opts) {
  std::vector<std::vector<Index>> users_of(static_cast<std::size_t>(ds.n_items));
  for (Index u = 0; u < ds.n_users; ++u)
    for (Index v : ds.train[static_cast<std::size_t>(u)]) users_of[static_cast<std::size_t>(v)].push_back(u);
  return cooccurrence(users_of, ds.n_users, opts);
}

double similarity_from_counts(Index shared, Index size_a, Index size_b, Index universe, Similarity measure) {
  const double s = shared;
  const double a = size_a;
  const double b = size_b;
  switch (measure) {
    case Similarity::PMI: return std::log(s * static_cast<double>(universe) / (a * b));
    case Similarity::Cosine: return s / std::sqrt(a * b);
    case Similarity::Jaccard: return s / (a + b - s);
  }
  return 0.0;
}

std::optional<double> similarity_weight(const CooccurrenceCounts& counts, Index a, Index b, Similarity measure) {
  if (a == b) return std::nullopt;
  const Index shared = counts.shared(a, b);
  if (shared == 0) return std::nullopt;
  return similarity_from_counts(shared, counts.set_sizes[static_cast<std::size_t>(a)],
                                counts.set_sizes[static_cast<std::size_t>(b)], counts.universe, measure);
}

}  // namespace hgcf
