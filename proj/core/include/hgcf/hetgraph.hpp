#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hgcf/dataset.hpp"
#include "hgcf/similarity.hpp"
#include "hgcf/sparse.hpp"

namespace hgcf {

// How the first propagation layer drops user-user messages.
enum class Layer1Mode {
  Renormalize,  // rebuild without UU edges and normalize with its own degrees
  Mask,         // zero UU entries of the already-normalized full matrix
};

const char* layer1_mode_name(Layer1Mode mode);
Layer1Mode parse_layer1_mode(const std::string& name);

struct GraphConfig {
  // User-item edges are always present.
  bool user_user = true;
  bool item_item = false;
  Similarity similarity = Similarity::PMI;
  double threshold = 0.0;  // similarity edge kept iff weight > threshold
  bool self_loops = true;
  Layer1Mode layer1 = Layer1Mode::Renormalize;
  std::size_t item_pair_budget = 0;  // max distinct item-item pairs, 0 = unlimited
  std::size_t member_pair_cap = 0;   // see CooccurrenceOptions
  bool subsample_capped = false;
  std::uint64_t seed = 0;

  // "ui", "ui,uu", "ui,ii", "ui,uu,ii"
  std::string edge_set() const;
  void set_edge_set(const std::string& spec);
};

SparseAdjacency build_adjacency(const InteractionDataset& ds, const GraphConfig& cfg);

// Throws InputError when a node has zero degree.
NormalizedAdjacency normalize(const SparseAdjacency& a);

// Normalized adjacency seen by the first layer: the configured graph minus
// user-user edges.
NormalizedAdjacency layer1_adjacency(const InteractionDataset& ds, const GraphConfig& cfg);

// The two normalized matrices a model consumes.
struct PropagationGraphs {
  NormalizedAdjacency layer1;
  NormalizedAdjacency full;
};

// Derives both matrices from an already-built raw adjacency.
PropagationGraphs propagation_graphs(const SparseAdjacency& full, Layer1Mode mode = Layer1Mode::Renormalize);

struct GraphBundle {
  SparseAdjacency adjacency;
  GraphConfig config;
  std::uint64_t checksum = 0;  // FNV-1a of edges.tsv
  std::filesystem::path dataset_dir;
};

// Writes graph.meta and edges.tsv ("i j w type" per stored entry). Weights
// use shortest round-trip formatting, so reloading is bit-exact.
void save_graph_bundle(const SparseAdjacency& a, const GraphConfig& cfg, const std::filesystem::path& dir,
                       const std::filesystem::path& dataset_dir = {});
GraphBundle load_graph_bundle(const std::filesystem::path& dir);

}  // namespace hgcf
