#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hgcf/sparse.hpp"

namespace hgcf {

// Unweighted hop count between two nodes, ignoring self-loops. nullopt when unreachable.
std::optional<int> hop_distance(const SparseAdjacency& a, Index from, Index to);

struct GraphStatsOptions {
  std::size_t sampled_pairs = 1000;  // user-item pairs for the hop histogram
  std::size_t max_sources = 32;      // BFS roots when sampling
  std::uint64_t seed = 0;
};

struct GraphStats {
  Index n_users = 0;
  Index n_items = 0;
  std::size_t stored_entries = 0;
  // Undirected edge counts per type (self-loops count once).
  std::size_t ui_edges = 0;
  std::size_t uu_edges = 0;
  std::size_t ii_edges = 0;
  std::size_t self_loops = 0;
  double density = 0.0;  // stored entries / n_nodes^2

  // Neighbor counts excluding self-loops.
  Index min_degree = 0;
  Index max_degree = 0;
  double mean_degree = 0.0;
  double median_degree = 0.0;
  std::map<Index, std::size_t> degree_histogram;

  std::map<int, std::size_t> hop_histogram;  // hops -> sampled pair count
  std::size_t unreachable_pairs = 0;
  std::size_t sampled_pairs = 0;
};

GraphStats graph_stats(const SparseAdjacency& a, const GraphStatsOptions& opts = {});

std::string format_graph_report(const GraphStats& stats);
std::string degree_histogram_csv(const GraphStats& stats);

}  // namespace hgcf
