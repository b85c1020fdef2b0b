#include "fixtures.hpp"

#include <algorithm>
#include <string>

#include "hgcf/random.hpp"

namespace hgcf::fixtures {

InteractionDataset make_dataset(Index n_items, std::vector<std::vector<Index>> train,
                                std::vector<std::vector<Index>> test, std::vector<std::vector<Index>> validation) {
  InteractionDataset ds;
  ds.n_users = static_cast<Index>(train.size());
  ds.n_items = n_items;
  test.resize(train.size());
  validation.resize(train.size());
  for (auto* lists : {&train, &test, &validation})
    for (auto& l : *lists) std::sort(l.begin(), l.end());
  ds.train = std::move(train);
  ds.test = std::move(test);
  ds.validation = std::move(validation);
  for (Index u = 0; u < ds.n_users; ++u) ds.user_ids.push_back("u" + std::to_string(u + 1));
  for (Index v = 0; v < n_items; ++v) ds.item_ids.push_back("v" + std::to_string(v + 1));
  return ds;
}

InteractionDataset fig1_toy() { return make_dataset(5, {{0, 1}, {0, 1, 2, 3}, {3, 4}}); }

InteractionDataset random_dataset(Index n_users, Index n_items, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<Index>> train(static_cast<std::size_t>(n_users));
  for (auto& items : train) {
    for (Index v = 0; v < n_items; ++v)
      if (rng.uniform01() < density) items.push_back(v);
    if (items.empty()) items.push_back(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n_items))));
  }
  return make_dataset(n_items, std::move(train));
}

InteractionDataset planted_blocks(Index n_users, Index n_items, double in_block, double out_block, std::uint64_t seed) {
  Rng rng(seed);
  RawInteractions raw;
  const Index half_items = n_items / 2;
  for (Index u = 0; u < n_users; ++u) {
    const bool first = u < n_users / 2;
    UserRecord rec{"u" + std::to_string(u), {}};
    for (Index v = 0; v < n_items; ++v) {
      const bool own = first ? v < half_items : v >= half_items;
      if (rng.uniform01() < (own ? in_block : out_block)) rec.items.push_back("i" + std::to_string(v));
    }
    if (rec.items.empty()) rec.items.push_back("i" + std::to_string(first ? 0 : n_items - 1));
    raw.records.push_back(std::move(rec));
  }
  SplitConfig cfg;
  cfg.seed = seed;
  auto ds = split(raw, cfg);
  return ds;
}

double training_auc(const FinalEmbeddings& fe, const InteractionDataset& ds) {
  double total = 0.0;
  std::size_t users = 0;
  for (Index u = 0; u < ds.n_users; ++u) {
    const auto su = static_cast<std::size_t>(u);
    const Vector scores = fe.score_all_items(u);
    std::vector<bool> held(static_cast<std::size_t>(ds.n_items), false);
    for (const auto* part : {&ds.train[su], &ds.validation[su], &ds.test[su]})
      for (Index v : *part) held[static_cast<std::size_t>(v)] = true;
    std::size_t correct = 0;
    std::size_t pairs = 0;
    for (Index p : ds.train[su]) {
      for (Index n = 0; n < ds.n_items; ++n) {
        if (held[static_cast<std::size_t>(n)]) continue;
        ++pairs;
        correct += scores(p) > scores(n);
      }
    }
    if (pairs == 0) continue;
    total += static_cast<double>(correct) / static_cast<double>(pairs);
    ++users;
  }
  return users == 0 ? 0.0 : total / static_cast<double>(users);
}

}  // namespace hgcf::fixtures
