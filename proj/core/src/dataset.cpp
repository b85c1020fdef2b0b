#include "hgcf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hgcf/error.hpp"
#include "hgcf/log.hpp"
#include "text_format.hpp"

namespace hgcf {

namespace fs = std::filesystem;
using detail::split_whitespace;

InputFormat parse_input_format(const std::string& name) {
  if (name == "user-list" || name == "userlist") return InputFormat::UserList;
  if (name == "triple-per-line" || name == "triples" || name == "pairs") return InputFormat::TriplePerLine;
  throw InputError("unknown input format '" + name + "' (expected user-list or triples)");
}

std::size_t RawInteractions::interaction_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.items.size();
  return n;
}

std::size_t RawInteractions::distinct_items() const {
  std::unordered_set<std::string_view> seen;
  for (const auto& r : records)
    for (const auto& item : r.items) seen.insert(item);
  return seen.size();
}

namespace {

// Accumulates records in first-seen order and collapses duplicates.
class RecordBuilder {
 public:
  void add(std::string_view user, std::string_view item) {
    auto [it, inserted] = user_index_.try_emplace(std::string(user), records_.size());
    if (inserted) {
      records_.push_back({std::string(user), {}});
      seen_.emplace_back();
    }
    const std::size_t r = it->second;
    if (seen_[r].insert(std::string(item)).second) records_[r].items.emplace_back(item);
  }

  void touch(std::string_view user) {
    if (user_index_.try_emplace(std::string(user), records_.size()).second) {
      records_.push_back({std::string(user), {}});
      seen_.emplace_back();
    }
  }

  RawInteractions finish() {
    RawInteractions raw;
    for (auto& r : records_)
      if (!r.items.empty()) raw.records.push_back(std::move(r));
    return raw;
  }

 private:
  std::unordered_map<std::string, std::size_t> user_index_;
  std::vector<UserRecord> records_;
  std::vector<std::unordered_set<std::string>> seen_;
};

}  // namespace

RawInteractions parse_interactions(std::istream& in, InputFormat format, const std::string& source) {
  RecordBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  std::size_t data_lines = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    ++data_lines;
    if (format == InputFormat::UserList) {
      if (fields.size() < 2) throw ParseError(source, line_no, "expected a user id followed by item ids");
      for (std::size_t i = 1; i < fields.size(); ++i) builder.add(fields[0], fields[i]);
    } else {
      if (fields.size() < 2) throw ParseError(source, line_no, "expected user and item columns");
      builder.add(fields[0], fields[1]);
    }
  }
  if (data_lines == 0) throw InputError(source + ": empty input");
  return builder.finish();
}

RawInteractions parse_interactions(const fs::path& path, InputFormat format) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_interactions(in, format, path.string());
}

RawInteractions filter_min_interactions(RawInteractions raw, std::size_t k) {
  // Work on integer ids; strings are only needed to rebuild the survivors.
  std::unordered_map<std::string_view, Index> item_ids;
  std::vector<std::vector<Index>> user_items(raw.records.size());
  for (std::size_t u = 0; u < raw.records.size(); ++u) {
    for (const auto& item : raw.records[u].items) {
      auto [it, _] = item_ids.try_emplace(item, static_cast<Index>(item_ids.size()));
      user_items[u].push_back(it->second);
    }
  }
  std::vector<char> user_alive(raw.records.size(), 1);
  std::vector<char> item_alive(item_ids.size(), 1);

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::size_t> item_degree(item_alive.size(), 0);
    for (std::size_t u = 0; u < user_items.size(); ++u) {
      if (!user_alive[u]) continue;
      for (Index i : user_items[u])
        if (item_alive[i]) ++item_degree[i];
    }
    for (std::size_t i = 0; i < item_alive.size(); ++i) {
      if (item_alive[i] && item_degree[i] <= k) {
        item_alive[i] = 0;
        changed = true;
      }
    }
    for (std::size_t u = 0; u < user_items.size(); ++u) {
      if (!user_alive[u]) continue;
      std::size_t degree = 0;
      for (Index i : user_items[u]) degree += item_alive[i];
      if (degree <= k) {
        user_alive[u] = 0;
        changed = true;
      }
    }
  }

  RawInteractions out;
  for (std::size_t u = 0; u < raw.records.size(); ++u) {
    if (!user_alive[u]) continue;
    UserRecord rec{std::move(raw.records[u].user), {}};
    for (std::size_t j = 0; j < user_items[u].size(); ++j)
      if (item_alive[user_items[u][j]]) rec.items.push_back(std::move(raw.records[u].items[j]));
    out.records.push_back(std::move(rec));
  }
  if (out.records.empty()) throw InputError("dataset eliminated by filter");
  return out;
}

std::size_t InteractionDataset::train_count() const {
  std::size_t n = 0;
  for (const auto& l : train) n += l.size();
  return n;
}

std::size_t InteractionDataset::validation_count() const {
  std::size_t n = 0;
  for (const auto& l : validation) n += l.size();
  return n;
}

std::size_t InteractionDataset::test_count() const {
  std::size_t n = 0;
  for (const auto& l : test) n += l.size();
  return n;
}

SplitSizes split_sizes(std::size_t degree, const SplitConfig& cfg) {
  if (degree == 0) return {0, 0, 0};
  auto portion = static_cast<std::size_t>(std::lround(cfg.train_frac * static_cast<double>(degree)));
  portion = std::clamp<std::size_t>(portion, 1, degree);
  auto validation = static_cast<std::size_t>(std::lround(cfg.val_frac_of_train * static_cast<double>(portion)));
  validation = std::min(validation, portion - 1);
  return {portion - validation, validation, degree - portion};
}

InteractionDataset split(const RawInteractions& raw, const SplitConfig& cfg) {
  if (!(cfg.train_frac > 0.0 && cfg.train_frac < 1.0))
    throw InputError("train fraction must lie in (0, 1)");
  if (!(cfg.val_frac_of_train > 0.0 && cfg.val_frac_of_train < 1.0))
    throw InputError("validation fraction must lie in (0, 1)");
  if (raw.records.empty()) throw InputError("no interactions to split");

  InteractionDataset ds;
  ds.split_config = cfg;
  std::unordered_map<std::string_view, Index> item_index;
  const auto n_users = raw.records.size();
  ds.train.resize(n_users);
  ds.validation.resize(n_users);
  ds.test.resize(n_users);
  ds.user_ids.reserve(n_users);

  Rng rng(derive_seed(cfg.seed, "split"));
  std::vector<Index> items;
  for (std::size_t u = 0; u < n_users; ++u) {
    const auto& rec = raw.records[u];
    ds.user_ids.push_back(rec.user);
    items.clear();
    for (const auto& item : rec.items) {
      auto [it, inserted] = item_index.try_emplace(item, static_cast<Index>(ds.item_ids.size()));
      if (inserted) ds.item_ids.push_back(item);
      items.push_back(it->second);
    }
    rng.shuffle(std::span<Index>(items));
    const auto sizes = split_sizes(items.size(), cfg);
    auto first = items.begin();
    ds.validation[u].assign(first, first + static_cast<std::ptrdiff_t>(sizes.validation));
    first += static_cast<std::ptrdiff_t>(sizes.validation);
    ds.train[u].assign(first, first + static_cast<std::ptrdiff_t>(sizes.train));
    first += static_cast<std::ptrdiff_t>(sizes.train);
    ds.test[u].assign(first, items.end());
    std::sort(ds.train[u].begin(), ds.train[u].end());
    std::sort(ds.validation[u].begin(), ds.validation[u].end());
    std::sort(ds.test[u].begin(), ds.test[u].end());
  }
  ds.n_users = static_cast<Index>(n_users);
  ds.n_items = static_cast<Index>(ds.item_ids.size());
  return ds;
}

std::string serialize_user_lists(const std::vector<std::vector<Index>>& lists) {
  std::string out;
  for (std::size_t u = 0; u < lists.size(); ++u) {
    out += std::to_string(u);
    for (Index i : lists[u]) {
      out += ' ';
      out += std::to_string(i);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string serialize_id_map(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) out += std::to_string(i) + "\t" + ids[i] + "\n";
  return out;
}

std::vector<std::vector<Index>> parse_user_lists(const fs::path& path, Index n_users, Index n_items) {
  const std::string text = detail::read_file(path);
  std::vector<std::vector<Index>> lists(static_cast<std::size_t>(n_users));
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    const std::string ctx = path.string() + ":" + std::to_string(line_no);
    const auto u = detail::parse_integer(fields[0], ctx);
    if (u < 0 || u >= n_users) throw ParseError(path.string(), line_no, "user index out of range");
    auto& list = lists[static_cast<std::size_t>(u)];
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const auto item = detail::parse_integer(fields[j], ctx);
      if (item < 0 || item >= n_items) throw ParseError(path.string(), line_no, "item index out of range");
      list.push_back(static_cast<Index>(item));
    }
    if (!std::is_sorted(list.begin(), list.end()))
      throw ParseError(path.string(), line_no, "item list is not sorted");
  }
  return lists;
}

std::vector<std::string> parse_id_map(const fs::path& path, Index expected) {
  const std::string text = detail::read_file(path);
  std::vector<std::string> ids;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() != 2) throw ParseError(path.string(), line_no, "expected index<TAB>id");
    const auto idx = detail::parse_integer(fields[0], path.string());
    if (idx != static_cast<long long>(ids.size())) throw ParseError(path.string(), line_no, "indices must be dense");
    ids.emplace_back(fields[1]);
  }
  if (static_cast<Index>(ids.size()) != expected) throw InputError(path.string() + ": wrong number of ids");
  return ids;
}

}  // namespace

void save_dataset_bundle(const InteractionDataset& ds, const fs::path& dir) {
  fs::create_directories(dir);
  std::map<std::string, std::string> meta{
      {"format", "hgcf-dataset-1"},
      {"n_users", std::to_string(ds.n_users)},
      {"n_items", std::to_string(ds.n_items)},
      {"seed", std::to_string(ds.split_config.seed)},
      {"train_frac", detail::format_double(ds.split_config.train_frac)},
      {"val_frac_of_train", detail::format_double(ds.split_config.val_frac_of_train)},
      {"min_interactions", std::to_string(ds.min_interactions)},
      {"train_interactions", std::to_string(ds.train_count())},
      {"valid_interactions", std::to_string(ds.validation_count())},
      {"test_interactions", std::to_string(ds.test_count())},
  };
  detail::write_file(dir / "meta", detail::format_key_values(meta));
  detail::write_file(dir / "train.txt", serialize_user_lists(ds.train));
  detail::write_file(dir / "valid.txt", serialize_user_lists(ds.validation));
  detail::write_file(dir / "test.txt", serialize_user_lists(ds.test));
  detail::write_file(dir / "user_map.tsv", serialize_id_map(ds.user_ids));
  detail::write_file(dir / "item_map.tsv", serialize_id_map(ds.item_ids));
}

InteractionDataset load_dataset_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("dataset bundle not found: " + dir.string());
  const auto meta_path = (dir / "meta").string();
  const auto meta = detail::parse_key_values(detail::read_file(dir / "meta"), meta_path);
  if (detail::require_key(meta, "format", meta_path) != "hgcf-dataset-1")
    throw InputError(meta_path + ": unsupported bundle format");

  InteractionDataset ds;
  ds.n_users = static_cast<Index>(detail::parse_integer(detail::require_key(meta, "n_users", meta_path), meta_path));
  ds.n_items = static_cast<Index>(detail::parse_integer(detail::require_key(meta, "n_items", meta_path), meta_path));
  ds.split_config.seed =
      static_cast<std::uint64_t>(detail::parse_integer(detail::require_key(meta, "seed", meta_path), meta_path));
  ds.split_config.train_frac = detail::parse_double(detail::require_key(meta, "train_frac", meta_path), meta_path);
  ds.split_config.val_frac_of_train =
      detail::parse_double(detail::require_key(meta, "val_frac_of_train", meta_path), meta_path);
  ds.min_interactions = static_cast<std::size_t>(
      detail::parse_integer(detail::require_key(meta, "min_interactions", meta_path), meta_path));
  ds.train = parse_user_lists(dir / "train.txt", ds.n_users, ds.n_items);
  ds.validation = parse_user_lists(dir / "valid.txt", ds.n_users, ds.n_items);
  ds.test = parse_user_lists(dir / "test.txt", ds.n_users, ds.n_items);
  ds.user_ids = parse_id_map(dir / "user_map.tsv", ds.n_users);
  ds.item_ids = parse_id_map(dir / "item_map.tsv", ds.n_items);
  return ds;
}

TripleSampler::TripleSampler(const InteractionDataset& ds) : ds_(&ds) {
  std::size_t saturated = 0;
  for (Index u = 0; u < ds.n_users; ++u) {
    const auto& items = ds.train[static_cast<std::size_t>(u)];
    if (items.empty()) continue;
    if (static_cast<Index>(items.size()) >= ds.n_items) {
      ++saturated;
      continue;
    }
    eligible_.push_back(u);
  }
  if (saturated > 0)
    log_warning(std::to_string(saturated) + " user(s) interacted with every item; skipped by the triple sampler");
}

std::vector<BprTriple> TripleSampler::sample(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0) throw InputError("batch size must be at least 1");
  if (eligible_.empty()) throw InputError("no user has a samplable negative item");
  std::vector<BprTriple> batch;
  batch.reserve(batch_size);
  for (std::size_t n = 0; n < batch_size; ++n) {
    const Index u = eligible_[rng.uniform_index(eligible_.size())];
    const auto& items = ds_->train[static_cast<std::size_t>(u)];
    const Index pos = items[rng.uniform_index(items.size())];
    Index neg;
    do {
      neg = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(ds_->n_items)));
    } while (std::binary_search(items.begin(), items.end(), neg));
    batch.push_back({u, pos, neg});
  }
  return batch;
}

}  // namespace hgcf
