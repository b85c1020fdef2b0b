#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "hgcf/error.hpp"
#include "hgcf/log.hpp"
#include "hgcf/parallel.hpp"

using namespace hgcf::cli;

namespace {

enum ExitCode { Ok = 0, BadInput = 2, RuntimeFailure = 3 };

void add_learn_options(CLI::App* cmd, LearnOptions& o) {
  cmd->add_option("--dim", o.dim, "embedding width d")->capture_default_str();
  cmd->add_option("--layers", o.layers, "propagation depth L")->capture_default_str();
  cmd->add_option("--slope", o.slope, "LeakyReLU negative slope")->capture_default_str();
  cmd->add_option("--dropout", o.dropout, "message dropout rate during training")->capture_default_str();
  cmd->add_flag("--no-layer0", o.no_layer0, "leave layer 0 out of the final embedding");
  cmd->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--lambda", o.lambda, "L2 coefficient")->capture_default_str();
  cmd->add_option("--batch", o.batch, "triples per batch")->capture_default_str();
  cmd->add_option("--epochs", o.epochs, "maximum epochs")->capture_default_str();
  cmd->add_option("--eval-every", o.eval_every, "validate every N epochs (0 = never)")->capture_default_str();
  cmd->add_option("--patience", o.patience, "evaluations without improvement before stopping")
      ->capture_default_str();
  cmd->add_option("--l2", o.l2, "penalty form: squared or plain")->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous graph collaborative filtering"};
  app.set_config("--config", "", "read options from an INI/TOML file; command-line flags win");
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: HGCF_NUM_THREADS or 1)");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress messages");

  PrepareOptions prep;
  auto* c_prep = app.add_subcommand("prepare", "filter, split and index an interaction file");
  c_prep->add_option("--input", prep.input, "interaction file")->required();
  c_prep->add_option("--format", prep.format, "user-list or triples")->capture_default_str();
  c_prep->add_option("--min-inter", prep.min_inter, "keep users and items with more than this many interactions")
      ->capture_default_str();
  c_prep->add_option("--train-frac", prep.train_frac, "per-user training fraction")->capture_default_str();
  c_prep->add_option("--val-frac", prep.val_frac, "validation fraction of the training part")
      ->capture_default_str();
  c_prep->add_option("--seed", prep.seed, "split seed")->capture_default_str();
  c_prep->add_option("--out", prep.out, "output directory")->required();

  GraphOptions graph;
  auto* c_graph = app.add_subcommand("build-graph", "build and save the heterogeneous adjacency");
  c_graph->add_option("--dataset", graph.dataset, "prepared dataset directory")->required();
  c_graph->add_option("--edges", graph.edges, "edge types, e.g. ui,uu or ui,uu,ii")->capture_default_str();
  c_graph->add_option("--sim", graph.sim, "pmi, cosine or jaccard")->capture_default_str();
  c_graph->add_option("--threshold", graph.threshold, "keep similarity edges with weight above this")
      ->capture_default_str();
  c_graph->add_flag("--no-self-loops", graph.no_self_loops, "omit self-loops");
  c_graph->add_option("--layer1", graph.layer1, "renormalize or mask")->capture_default_str();
  c_graph->add_option("--ii-budget", graph.ii_budget, "max item-item pairs (0 = unlimited)")
      ->capture_default_str();
  c_graph->add_option("--pair-cap", graph.pair_cap, "skip pair counting for members above this size (0 = none)")
      ->capture_default_str();
  c_graph->add_flag("--subsample-capped", graph.subsample_capped, "subsample capped members instead of skipping");
  c_graph->add_option("--seed", graph.seed, "seed for sampling")->capture_default_str();
  c_graph->add_option("--stats-pairs", graph.stats_pairs, "sampled pairs for the hop histogram")
      ->capture_default_str();
  c_graph->add_option("--out", graph.out, "output directory")->required();

  StatsOptions stats;
  auto* c_stats = app.add_subcommand("graph-stats", "report degree and hop-distance statistics");
  c_stats->add_option("--graph", stats.graph, "graph directory")->required();
  c_stats->add_option("--pairs", stats.pairs, "sampled node pairs")->capture_default_str();
  c_stats->add_option("--sources", stats.sources, "BFS sources")->capture_default_str();
  c_stats->add_option("--seed", stats.seed, "sampling seed")->capture_default_str();
  c_stats->add_option("--out", stats.out, "write graph_stats.txt and degree_histogram.csv here");

  TrainOptions tr;
  auto* c_train = app.add_subcommand("train", "train a model on a built graph");
  c_train->add_option("--graph", tr.graph, "graph directory")->required();
  c_train->add_option("--dataset", tr.dataset, "dataset directory (default: the one the graph was built from)");
  add_learn_options(c_train, tr.learn);
  c_train->add_option("--out", tr.out, "run directory")->required();

  EvaluateOptions ev;
  auto* c_eval = app.add_subcommand("evaluate", "full-ranking evaluation of a checkpoint");
  c_eval->add_option("--checkpoint", ev.checkpoint, "checkpoint file or run directory")->required();
  c_eval->add_option("--graph", ev.graph, "graph directory (default: recorded in the checkpoint)");
  c_eval->add_option("--dataset", ev.dataset, "dataset directory (default: recorded in the checkpoint)");
  c_eval->add_option("--k", ev.ks, "cutoffs")->delimiter(',')->capture_default_str();
  c_eval->add_option("--target", ev.target, "test or validation")->capture_default_str();
  c_eval->add_flag("--per-user", ev.per_user, "also write per_user.csv");
  c_eval->add_option("--out", ev.out, "write report.csv here");

  AblateOptions ab;
  auto* c_ab = app.add_subcommand("ablate", "sweep edge sets, similarities, thresholds, depths and seeds");
  c_ab->add_option("--dataset", ab.dataset, "prepared dataset directory")->required();
  c_ab->add_option("--edges", ab.edges, "edge sets; separate entries with ';'")->delimiter(';')
      ->capture_default_str();
  c_ab->add_option("--sims", ab.sims, "similarities")->delimiter(',')->capture_default_str();
  c_ab->add_option("--thresholds", ab.thresholds, "thresholds")->delimiter(',')->capture_default_str();
  c_ab->add_option("--depths", ab.depths, "layer counts")->delimiter(',')->capture_default_str();
  c_ab->add_option("--seeds", ab.seeds, "seeds")->delimiter(',')->capture_default_str();
  c_ab->add_option("--layer1", ab.layer1, "renormalize or mask")->capture_default_str();
  c_ab->add_option("--ii-budget", ab.ii_budget, "max item-item pairs (0 = unlimited)")->capture_default_str();
  add_learn_options(c_ab, ab.learn);
  c_ab->add_option("--out", ab.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Ok : BadInput;
  }

  if (threads < 0) {
    std::cerr << "error: --threads must be positive\n";
    return BadInput;
  }
  if (threads > 0) hgcf::set_num_threads(threads);
  hgcf::set_log_sink([quiet](hgcf::LogLevel level, const std::string& msg) {
    if (level == hgcf::LogLevel::Warning)
      std::cerr << "warning: " << msg << "\n";
    else if (!quiet)
      std::cerr << msg << "\n";
  });

  try {
    if (*c_prep)
      run_prepare(prep);
    else if (*c_graph)
      run_build_graph(graph);
    else if (*c_stats)
      run_graph_stats(stats);
    else if (*c_train)
      run_train(tr);
    else if (*c_eval)
      run_evaluate(ev);
    else if (*c_ab)
      run_ablate(ab);
  } catch (const hgcf::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return BadInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return BadInput;
  } catch (const hgcf::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return RuntimeFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return RuntimeFailure;
  }
  return Ok;
}
