#include "hgcf/graph_stats.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "hgcf/error.hpp"
#include "hgcf/random.hpp"

namespace hgcf {

namespace {

// Hop counts from `source` to every node (-1 when unreachable).
std::vector<int> bfs(const SparseAdjacency& a, Index source) {
  std::vector<int> dist(static_cast<std::size_t>(a.n_nodes()), -1);
  const auto row_ptr = a.row_ptr();
  const auto cols = a.cols();
  std::deque<Index> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty()) {
    const Index i = queue.front();
    queue.pop_front();
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const Index j = cols[static_cast<std::size_t>(k)];
      if (dist[static_cast<std::size_t>(j)] >= 0) continue;
      dist[static_cast<std::size_t>(j)] = dist[static_cast<std::size_t>(i)] + 1;
      queue.push_back(j);
    }
  }
  return dist;
}

}  // namespace

std::optional<int> hop_distance(const SparseAdjacency& a, Index from, Index to) {
  if (from < 0 || from >= a.n_nodes() || to < 0 || to >= a.n_nodes()) throw InputError("hop_distance: node out of range");
  const int d = bfs(a, from)[static_cast<std::size_t>(to)];
  if (d < 0) return std::nullopt;
  return d;
}

GraphStats graph_stats(const SparseAdjacency& a, const GraphStatsOptions& opts) {
  GraphStats s;
  s.n_users = a.n_users();
  s.n_items = a.n_items();
  s.stored_entries = a.nnz();
  const auto n = static_cast<std::size_t>(a.n_nodes());
  s.density = n == 0 ? 0.0 : static_cast<double>(a.nnz()) / (static_cast<double>(n) * static_cast<double>(n));

  const auto row_ptr = a.row_ptr();
  const auto cols = a.cols();
  const auto types = a.types();
  std::vector<Index> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const auto j = static_cast<std::size_t>(cols[kk]);
      if (j == i) {
        ++s.self_loops;
        continue;
      }
      ++degree[i];
      if (j < i) continue;  // count undirected edges once
      switch (types[kk]) {
        case EdgeType::UserItem: ++s.ui_edges; break;
        case EdgeType::UserUser: ++s.uu_edges; break;
        case EdgeType::ItemItem: ++s.ii_edges; break;
        case EdgeType::SelfLoop: break;
      }
    }
  }
  if (n > 0) {
    std::vector<Index> sorted = degree;
    std::sort(sorted.begin(), sorted.end());
    s.min_degree = sorted.front();
    s.max_degree = sorted.back();
    double total = 0.0;
    for (Index d : sorted) {
      total += d;
      ++s.degree_histogram[d];
    }
    s.mean_degree = total / static_cast<double>(n);
    s.median_degree = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }

  // Hop histogram between user-item pairs: exhaustive when small, otherwise
  // a seeded sample drawn from a bounded number of BFS sources.
  const auto all_pairs = static_cast<std::size_t>(s.n_users) * static_cast<std::size_t>(s.n_items);
  auto record = [&](int d) {
    ++s.sampled_pairs;
    if (d < 0)
      ++s.unreachable_pairs;
    else
      ++s.hop_histogram[d];
  };
  if (all_pairs == 0 || opts.sampled_pairs == 0) return s;
  if (all_pairs <= opts.sampled_pairs) {
    for (Index u = 0; u < s.n_users; ++u) {
      const auto dist = bfs(a, u);
      for (Index v = 0; v < s.n_items; ++v) record(dist[static_cast<std::size_t>(s.n_users + v)]);
    }
    return s;
  }
  Rng rng(derive_seed(opts.seed, "graph-stats"));
  const std::size_t sources = std::min<std::size_t>({opts.max_sources, static_cast<std::size_t>(s.n_users), opts.sampled_pairs});
  const std::size_t per_source = (opts.sampled_pairs + sources - 1) / sources;
  std::size_t remaining = opts.sampled_pairs;
  for (std::size_t k = 0; k < sources && remaining > 0; ++k) {
    const auto u = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(s.n_users)));
    const auto dist = bfs(a, u);
    for (std::size_t p = 0; p < per_source && remaining > 0; ++p, --remaining) {
      const auto v = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(s.n_items)));
      record(dist[static_cast<std::size_t>(s.n_users + v)]);
    }
  }
  return s;
}

std::string format_graph_report(const GraphStats& s) {
  std::ostringstream out;
  out << "nodes            " << s.n_users + s.n_items << " (users " << s.n_users << ", items " << s.n_items << ")\n";
  out << "stored entries   " << s.stored_entries << "\n";
  out << "edges ui         " << s.ui_edges << "\n";
  out << "edges uu         " << s.uu_edges << "\n";
  out << "edges ii         " << s.ii_edges << "\n";
  out << "self loops       " << s.self_loops << "\n";
  out << "density          " << s.density << "\n";
  out << "degree min/max   " << s.min_degree << " / " << s.max_degree << "\n";
  out << "degree mean      " << s.mean_degree << "\n";
  out << "degree median    " << s.median_degree << "\n";
  out << "user-item hops (" << s.sampled_pairs << " pairs)\n";
  for (const auto& [hops, count] : s.hop_histogram) out << "  " << hops << " hops: " << count << "\n";
  out << "  unreachable: " << s.unreachable_pairs << "\n";
  return out.str();
}

std::string degree_histogram_csv(const GraphStats& s) {
  std::string out = "degree,count\n";
  for (const auto& [d, c] : s.degree_histogram) out += std::to_string(d) + "," + std::to_string(c) + "\n";
  return out;
}

}  // namespace hgcf
