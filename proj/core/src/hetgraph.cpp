#include "hgcf/hetgraph.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "hgcf/error.hpp"
#include "text_format.hpp"

namespace hgcf {

namespace fs = std::filesystem;

const char* layer1_mode_name(Layer1Mode mode) {
  return mode == Layer1Mode::Renormalize ? "renormalize" : "mask";
}

Layer1Mode parse_layer1_mode(const std::string& name) {
  if (name == "renormalize") return Layer1Mode::Renormalize;
  if (name == "mask") return Layer1Mode::Mask;
  throw InputError("unknown layer-1 mode '" + name + "' (expected renormalize or mask)");
}

std::string GraphConfig::edge_set() const {
  std::string s = "ui";
  if (user_user) s += ",uu";
  if (item_item) s += ",ii";
  return s;
}

void GraphConfig::set_edge_set(const std::string& spec) {
  bool ui = false;
  bool uu = false;
  bool ii = false;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    switch (parse_edge_type(token)) {
      case EdgeType::UserItem: ui = true; break;
      case EdgeType::UserUser: uu = true; break;
      case EdgeType::ItemItem: ii = true; break;
      case EdgeType::SelfLoop: throw InputError("self-loops are configured separately, not as an edge type");
    }
  }
  if (!ui) throw InputError("edge set '" + spec + "' must include ui");
  user_user = uu;
  item_item = ii;
}

namespace {

void validate(const GraphConfig& cfg) {
  if (std::isnan(cfg.threshold)) throw InputError("similarity threshold is NaN");
}

void add_similarity_edges(std::vector<Entry>& entries, const CooccurrenceCounts& counts, Index offset,
                          const GraphConfig& cfg, EdgeType type) {
  for (const auto& p : counts.pairs) {
    const double w = similarity_from_counts(p.shared, counts.set_sizes[static_cast<std::size_t>(p.a)],
                                            counts.set_sizes[static_cast<std::size_t>(p.b)], counts.universe,
                                            cfg.similarity);
    if (!(w > cfg.threshold) || w == 0.0) continue;
    entries.push_back({offset + p.a, offset + p.b, w, type});
    entries.push_back({offset + p.b, offset + p.a, w, type});
  }
}

}  // namespace

SparseAdjacency build_adjacency(const InteractionDataset& ds, const GraphConfig& cfg) {
  validate(cfg);
  const Index n_users = ds.n_users;
  std::vector<Entry> entries;
  for (Index u = 0; u < n_users; ++u) {
    for (Index v : ds.train[static_cast<std::size_t>(u)]) {
      entries.push_back({u, n_users + v, 1.0, EdgeType::UserItem});
      entries.push_back({n_users + v, u, 1.0, EdgeType::UserItem});
    }
  }

  CooccurrenceOptions opts;
  opts.member_pair_cap = cfg.member_pair_cap;
  opts.subsample_capped = cfg.subsample_capped;
  opts.seed = cfg.seed;
  if (cfg.user_user) add_similarity_edges(entries, user_cooccurrence(ds, opts), 0, cfg, EdgeType::UserUser);
  if (cfg.item_item) {
    opts.max_pairs = cfg.item_pair_budget;
    try {
      add_similarity_edges(entries, item_cooccurrence(ds, opts), n_users, cfg, EdgeType::ItemItem);
    } catch (const BudgetExceeded& e) {
      throw BudgetExceeded(std::string("II edges exceed budget: ") + e.what());
    }
  }
  if (cfg.self_loops) {
    for (Index i = 0; i < n_users + ds.n_items; ++i) entries.push_back({i, i, 1.0, EdgeType::SelfLoop});
  }
  return SparseAdjacency::from_entries(n_users, ds.n_items, std::move(entries));
}

NormalizedAdjacency normalize(const SparseAdjacency& a) {
  const auto n = static_cast<std::size_t>(a.n_nodes());
  const auto row_ptr = a.row_ptr();
  const auto cols = a.cols();
  const auto values = a.values();
  NormalizedAdjacency out;
  out.degrees.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) out.degrees[i] += std::abs(values[static_cast<std::size_t>(k)]);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(out.degrees[i] > 0.0))
      throw InputError("node " + std::to_string(i) + " has zero degree; enable self-loops or drop isolated nodes");
  }
  std::vector<double> scaled(values.begin(), values.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      scaled[kk] = values[kk] / std::sqrt(out.degrees[i] * out.degrees[static_cast<std::size_t>(cols[kk])]);
    }
  }
  out.matrix = a.with_values(std::move(scaled));
  return out;
}

namespace {

bool not_user_user(EdgeType t) { return t != EdgeType::UserUser; }

}  // namespace

NormalizedAdjacency layer1_adjacency(const InteractionDataset& ds, const GraphConfig& cfg) {
  if (cfg.layer1 == Layer1Mode::Mask) {
    auto full = normalize(build_adjacency(ds, cfg));
    return {full.matrix.filtered(not_user_user), std::move(full.degrees)};
  }
  GraphConfig without_uu = cfg;
  without_uu.user_user = false;
  return normalize(build_adjacency(ds, without_uu));
}

PropagationGraphs propagation_graphs(const SparseAdjacency& full, Layer1Mode mode) {
  PropagationGraphs g;
  g.full = normalize(full);
  if (mode == Layer1Mode::Mask) {
    g.layer1 = {g.full.matrix.filtered(not_user_user), g.full.degrees};
  } else {
    g.layer1 = normalize(full.filtered(not_user_user));
  }
  return g;
}

namespace {

std::string serialize_edges(const SparseAdjacency& a) {
  std::string out;
  out.reserve(a.nnz() * 24);
  for (const auto& e : a.entries()) {
    out += std::to_string(e.row);
    out += '\t';
    out += std::to_string(e.col);
    out += '\t';
    out += detail::format_double(e.weight);
    out += '\t';
    out += edge_type_name(e.type);
    out += '\n';
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void save_graph_bundle(const SparseAdjacency& a, const GraphConfig& cfg, const fs::path& dir,
                       const fs::path& dataset_dir) {
  fs::create_directories(dir);
  const std::string edges = serialize_edges(a);
  std::size_t by_type[4] = {0, 0, 0, 0};
  for (auto t : a.types()) ++by_type[static_cast<int>(t)];
  std::map<std::string, std::string> meta{
      {"format", "hgcf-graph-1"},
      {"n_users", std::to_string(a.n_users())},
      {"n_items", std::to_string(a.n_items())},
      {"edges", cfg.edge_set()},
      {"similarity", similarity_name(cfg.similarity)},
      {"threshold", detail::format_double(cfg.threshold)},
      {"self_loops", cfg.self_loops ? "1" : "0"},
      {"layer1", layer1_mode_name(cfg.layer1)},
      {"item_pair_budget", std::to_string(cfg.item_pair_budget)},
      {"member_pair_cap", std::to_string(cfg.member_pair_cap)},
      {"subsample_capped", cfg.subsample_capped ? "1" : "0"},
      {"seed", std::to_string(cfg.seed)},
      {"stored_entries", std::to_string(a.nnz())},
      {"entries_ui", std::to_string(by_type[static_cast<int>(EdgeType::UserItem)])},
      {"entries_uu", std::to_string(by_type[static_cast<int>(EdgeType::UserUser)])},
      {"entries_ii", std::to_string(by_type[static_cast<int>(EdgeType::ItemItem)])},
      {"entries_self", std::to_string(by_type[static_cast<int>(EdgeType::SelfLoop)])},
      {"checksum", hex64(detail::fnv1a64(edges))},
      {"dataset", dataset_dir.empty() ? std::string() : fs::absolute(dataset_dir).lexically_normal().string()},
  };
  detail::write_file(dir / "graph.meta", detail::format_key_values(meta));
  detail::write_file(dir / "edges.tsv", edges);
}

GraphBundle load_graph_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("graph bundle not found: " + dir.string());
  const std::string meta_path = (dir / "graph.meta").string();
  const auto meta = detail::parse_key_values(detail::read_file(dir / "graph.meta"), meta_path);
  auto get = [&](const std::string& key) -> const std::string& { return detail::require_key(meta, key, meta_path); };
  if (get("format") != "hgcf-graph-1") throw InputError(meta_path + ": unsupported graph format");

  GraphBundle bundle;
  bundle.config.set_edge_set(get("edges"));
  bundle.config.similarity = parse_similarity(get("similarity"));
  bundle.config.threshold = detail::parse_double(get("threshold"), meta_path);
  bundle.config.self_loops = get("self_loops") == "1";
  bundle.config.layer1 = parse_layer1_mode(get("layer1"));
  bundle.config.item_pair_budget = static_cast<std::size_t>(detail::parse_integer(get("item_pair_budget"), meta_path));
  bundle.config.member_pair_cap = static_cast<std::size_t>(detail::parse_integer(get("member_pair_cap"), meta_path));
  bundle.config.subsample_capped = get("subsample_capped") == "1";
  bundle.config.seed = static_cast<std::uint64_t>(detail::parse_integer(get("seed"), meta_path));
  bundle.dataset_dir = get("dataset");

  const std::string edges_path = (dir / "edges.tsv").string();
  const std::string edges = detail::read_file(dir / "edges.tsv");
  bundle.checksum = detail::fnv1a64(edges);
  if (hex64(bundle.checksum) != get("checksum")) throw InputError(edges_path + ": checksum mismatch");

  std::vector<Entry> entries;
  std::istringstream in(edges);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto f = detail::split_whitespace(line);
    if (f.empty()) continue;
    if (f.size() != 4) throw ParseError(edges_path, line_no, "expected 'i j w type'");
    entries.push_back({static_cast<Index>(detail::parse_integer(f[0], edges_path)),
                       static_cast<Index>(detail::parse_integer(f[1], edges_path)),
                       detail::parse_double(f[2], edges_path), parse_edge_type(std::string(f[3]))});
  }
  const auto n_users = static_cast<Index>(detail::parse_integer(get("n_users"), meta_path));
  const auto n_items = static_cast<Index>(detail::parse_integer(get("n_items"), meta_path));
  bundle.adjacency = SparseAdjacency::from_entries(n_users, n_items, std::move(entries));
  return bundle;
}

}  // namespace hgcf
