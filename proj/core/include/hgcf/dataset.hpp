#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hgcf/random.hpp"

namespace hgcf {

using Index = std::int32_t;

enum class InputFormat {
  UserList,       // "user item item ..." per line
  TriplePerLine,  // "user<TAB>item" per line (extra columns ignored)
};

InputFormat parse_input_format(const std::string& name);

struct UserRecord {
  std::string user;
  std::vector<std::string> items;  // unique, in first-seen order
};

// Implicit feedback as read from disk, before any ID mapping.
struct RawInteractions {
  std::vector<UserRecord> records;

  std::size_t interaction_count() const;
  std::size_t distinct_items() const;
};

RawInteractions parse_interactions(std::istream& in, InputFormat format,
                                   const std::string& source = "<stream>");
RawInteractions parse_interactions(const std::filesystem::path& path, InputFormat format);

// Keeps users and items with strictly more than k interactions, repeating
// until no further record drops out.
RawInteractions filter_min_interactions(RawInteractions raw, std::size_t k = 10);

struct SplitConfig {
  double train_frac = 0.8;
  double val_frac_of_train = 0.1;
  std::uint64_t seed = 0;
};

// ID-mapped interactions with per-user train/validation/test partitions.
// Every per-user list is sorted ascending. Users occupy dense indices
// [0, n_users) in input order; items get dense indices in first-seen order.
struct InteractionDataset {
  Index n_users = 0;
  Index n_items = 0;
  std::vector<std::vector<Index>> train;
  std::vector<std::vector<Index>> validation;
  std::vector<std::vector<Index>> test;
  std::vector<std::string> user_ids;  // dense index -> external id
  std::vector<std::string> item_ids;
  SplitConfig split_config;
  std::size_t min_interactions = 0;

  std::size_t train_count() const;
  std::size_t validation_count() const;
  std::size_t test_count() const;
  std::size_t interaction_count() const { return train_count() + validation_count() + test_count(); }
};

InteractionDataset split(const RawInteractions& raw, const SplitConfig& cfg);

// Per-user split sizes used by split(): {train, validation, test}.
struct SplitSizes {
  std::size_t train;
  std::size_t validation;
  std::size_t test;
};
SplitSizes split_sizes(std::size_t degree, const SplitConfig& cfg);

// Bundle layout: meta, train.txt, valid.txt, test.txt, user_map.tsv, item_map.tsv.
void save_dataset_bundle(const InteractionDataset& ds, const std::filesystem::path& dir);
InteractionDataset load_dataset_bundle(const std::filesystem::path& dir);

// Serialization used for bundle files and for byte-level determinism checks.
std::string serialize_user_lists(const std::vector<std::vector<Index>>& lists);

struct BprTriple {
  Index user;
  Index pos;  // item index in [0, n_items)
  Index neg;

  friend bool operator==(const BprTriple&, const BprTriple&) = default;
};

// Uniform BPR triple sampler over the training partition. Immutable after
// construction; concurrent callers must each own their Rng.
class TripleSampler {
 public:
  explicit TripleSampler(const InteractionDataset& ds);

  std::vector<BprTriple> sample(std::size_t batch_size, Rng& rng) const;

  // Users eligible for sampling: non-empty train list that does not cover every item.
  const std::vector<Index>& eligible_users() const { return eligible_; }

 private:
  const InteractionDataset* ds_;
  std::vector<Index> eligible_;
};

}  // namespace hgcf
