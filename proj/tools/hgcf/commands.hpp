#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hgcf/model.hpp"
#include "hgcf/training.hpp"

namespace hgcf::cli {

namespace fs = std::filesystem;

struct PrepareOptions {
  fs::path input;
  std::string format = "user-list";
  std::size_t min_inter = 10;
  double train_frac = 0.8;
  double val_frac = 0.1;
  std::uint64_t seed = 0;
  fs::path out;
};

struct GraphOptions {
  fs::path dataset;
  std::string edges = "ui,uu";
  std::string sim = "pmi";
  double threshold = 0.0;
  bool no_self_loops = false;
  std::string layer1 = "renormalize";
  std::size_t ii_budget = 0;
  std::size_t pair_cap = 0;
  bool subsample_capped = false;
  std::uint64_t seed = 0;
  std::size_t stats_pairs = 1000;
  fs::path out;
};

struct StatsOptions {
  fs::path graph;
  std::size_t pairs = 1000;
  std::size_t sources = 32;
  std::uint64_t seed = 0;
  fs::path out;
};

// Model and optimization flags shared by train and ablate.
struct LearnOptions {
  Index dim = 64;
  int layers = 2;
  double slope = 0.2;
  double dropout = 0.0;
  bool no_layer0 = false;
  double lr = 1e-3;
  double lambda = 1e-5;
  std::size_t batch = 1024;
  int epochs = 400;
  int eval_every = 1;
  int patience = 10;
  std::string l2 = "squared";
  std::uint64_t seed = 0;

  ModelConfig model_config() const;
  TrainConfig train_config() const;
};

struct TrainOptions {
  fs::path graph;
  fs::path dataset;  // defaults to the dataset recorded in the graph bundle
  LearnOptions learn;
  fs::path out;
};

struct EvaluateOptions {
  fs::path checkpoint;  // file, or a train output directory holding best.ckpt
  fs::path graph;       // default: recorded in the checkpoint
  fs::path dataset;     // default: recorded in the checkpoint
  std::vector<int> ks{20};
  std::string target = "test";
  bool per_user = false;
  fs::path out;
};

struct AblateOptions {
  fs::path dataset;
  std::vector<std::string> edges{"ui", "ui,uu"};
  std::vector<std::string> sims{"pmi"};
  std::vector<double> thresholds{0.0};
  std::vector<int> depths{2};
  std::vector<std::uint64_t> seeds{0};
  std::string layer1 = "renormalize";
  std::size_t ii_budget = 0;
  LearnOptions learn;
  fs::path out;
};

void run_prepare(const PrepareOptions& opts);
void run_build_graph(const GraphOptions& opts);
void run_graph_stats(const StatsOptions& opts);
void run_train(const TrainOptions& opts);
void run_evaluate(const EvaluateOptions& opts);
void run_ablate(const AblateOptions& opts);

}  // namespace hgcf::cli
