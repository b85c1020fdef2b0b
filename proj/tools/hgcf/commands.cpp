#include "commands.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

#include "hgcf/checkpoint.hpp"
#include "hgcf/dataset.hpp"
#include "hgcf/error.hpp"
#include "hgcf/eval.hpp"
#include "hgcf/graph_stats.hpp"
#include "hgcf/hetgraph.hpp"
#include "hgcf/log.hpp"

namespace hgcf::cli {

namespace {

using Echo = std::vector<std::pair<std::string, std::string>>;

std::string num(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

template <typename T>
std::string num(T x) {
  return std::to_string(x);
}

template <typename T>
std::string list(const std::vector<T>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ",";
    if constexpr (std::is_same_v<T, std::string>)
      out += "\"" + xs[i] + "\"";
    else
      out += num(xs[i]);
  }
  return out + "]";
}

std::string flag(bool b) { return b ? "true" : "false"; }

fs::path absolute_path(const fs::path& p) { return p.empty() ? p : fs::absolute(p).lexically_normal(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) throw InputError("an output directory is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir.string());
}

// The resolved configuration, in a form --config accepts.
std::string render_config(const std::string& command, const Echo& echo) {
  std::string out = "# resolved configuration; rerun with: hgcf --config <this file> " + command + "\n";
  out += "[" + command + "]\n";
  for (const auto& [k, v] : echo) out += k + "=" + v + "\n";
  return out;
}

void add_learn_echo(Echo& echo, const LearnOptions& o) {
  echo.insert(echo.end(), {{"dim", num(o.dim)},
                           {"layers", num(o.layers)},
                           {"slope", num(o.slope)},
                           {"dropout", num(o.dropout)},
                           {"no-layer0", flag(o.no_layer0)},
                           {"lr", num(o.lr)},
                           {"lambda", num(o.lambda)},
                           {"batch", num(o.batch)},
                           {"epochs", num(o.epochs)},
                           {"eval-every", num(o.eval_every)},
                           {"patience", num(o.patience)},
                           {"l2", "\"" + o.l2 + "\""},
                           {"seed", num(o.seed)}});
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

struct LoadedGraph {
  GraphBundle bundle;
  PropagationGraphs graphs;
};

LoadedGraph load_graph(const fs::path& dir) {
  LoadedGraph g;
  g.bundle = load_graph_bundle(dir);
  g.graphs = propagation_graphs(g.bundle.adjacency, g.bundle.config.layer1);
  return g;
}

void check_dataset_matches(const InteractionDataset& ds, const SparseAdjacency& a) {
  if (ds.n_users != a.n_users() || ds.n_items != a.n_items())
    throw InputError("graph (" + std::to_string(a.n_users()) + " users, " + std::to_string(a.n_items()) +
                     " items) does not match the dataset (" + std::to_string(ds.n_users) + " users, " +
                     std::to_string(ds.n_items) + " items)");
}

void log_epoch(const EpochRecord& rec) {
  char buf[160];
  if (rec.evaluated)
    std::snprintf(buf, sizeof(buf), "epoch %4d  loss %.4f  val recall@20 %.4f  ndcg@20 %.4f  (%.1fs)", rec.epoch,
                  rec.loss, rec.val_recall20, rec.val_ndcg20, rec.seconds);
  else
    std::snprintf(buf, sizeof(buf), "epoch %4d  loss %.4f  (%.1fs)", rec.epoch, rec.loss, rec.seconds);
  log_info(buf);
}

}  // namespace

ModelConfig LearnOptions::model_config() const {
  ModelConfig c;
  c.dim = dim;
  c.layers = layers;
  c.leaky_slope = slope;
  c.message_dropout = dropout;
  c.include_layer0 = !no_layer0;
  validate(c);
  return c;
}

TrainConfig LearnOptions::train_config() const {
  TrainConfig t;
  t.adam.lr = lr;
  t.lambda = lambda;
  t.batch_size = batch;
  t.epochs = epochs;
  t.eval_every = eval_every;
  t.patience = patience;
  t.seed = seed;
  t.l2_norm = parse_l2_norm(l2);
  validate(t);
  return t;
}

void run_prepare(const PrepareOptions& o) {
  const auto raw = parse_interactions(o.input, parse_input_format(o.format));
  const auto filtered = filter_min_interactions(raw, o.min_inter);
  SplitConfig split_cfg;
  split_cfg.train_frac = o.train_frac;
  split_cfg.val_frac_of_train = o.val_frac;
  split_cfg.seed = o.seed;
  auto ds = split(filtered, split_cfg);
  ds.min_interactions = o.min_inter;

  ensure_dir(o.out);
  save_dataset_bundle(ds, o.out);
  const Echo echo{{"input", quoted(absolute_path(o.input))},
                  {"format", "\"" + o.format + "\""},
                  {"min-inter", num(o.min_inter)},
                  {"train-frac", num(o.train_frac)},
                  {"val-frac", num(o.val_frac)},
                  {"seed", num(o.seed)},
                  {"out", quoted(absolute_path(o.out))}};
  write_text(o.out / "config.ini", render_config("prepare", echo));

  const double density = static_cast<double>(ds.interaction_count()) /
                         (static_cast<double>(ds.n_users) * static_cast<double>(ds.n_items));
  std::cout << "users " << ds.n_users << "  items " << ds.n_items << "  interactions " << ds.interaction_count()
            << "  density " << density << "\n"
            << "train " << ds.train_count() << "  valid " << ds.validation_count() << "  test " << ds.test_count()
            << "\n"
            << "raw users " << raw.records.size() << "  raw items " << raw.distinct_items() << "  raw interactions "
            << raw.interaction_count() << "\n";
}

void run_build_graph(const GraphOptions& o) {
  const auto ds = load_dataset_bundle(o.dataset);
  GraphConfig cfg;
  cfg.set_edge_set(o.edges);
  cfg.similarity = parse_similarity(o.sim);
  cfg.threshold = o.threshold;
  cfg.self_loops = !o.no_self_loops;
  cfg.layer1 = parse_layer1_mode(o.layer1);
  cfg.item_pair_budget = o.ii_budget;
  cfg.member_pair_cap = o.pair_cap;
  cfg.subsample_capped = o.subsample_capped;
  cfg.seed = o.seed;

  SparseAdjacency a;
  try {
    a = build_adjacency(ds, cfg);
  } catch (const BudgetExceeded& e) {
    throw BudgetExceeded(std::string(e.what()) + " (out of memory at the configured budget; raise --ii-budget or drop ii)");
  }
  // Fail here rather than at training time if some node would have zero degree.
  normalize(a);

  ensure_dir(o.out);
  save_graph_bundle(a, cfg, o.out, absolute_path(o.dataset));
  GraphStatsOptions so;
  so.sampled_pairs = o.stats_pairs;
  so.seed = o.seed;
  const auto stats = graph_stats(a, so);
  const auto report = format_graph_report(stats);
  write_text(o.out / "graph_stats.txt", report);
  write_text(o.out / "degree_histogram.csv", degree_histogram_csv(stats));
  const Echo echo{{"dataset", quoted(absolute_path(o.dataset))},
                  {"edges", "\"" + cfg.edge_set() + "\""},
                  {"sim", "\"" + o.sim + "\""},
                  {"threshold", num(o.threshold)},
                  {"no-self-loops", flag(o.no_self_loops)},
                  {"layer1", "\"" + o.layer1 + "\""},
                  {"ii-budget", num(o.ii_budget)},
                  {"pair-cap", num(o.pair_cap)},
                  {"subsample-capped", flag(o.subsample_capped)},
                  {"seed", num(o.seed)},
                  {"stats-pairs", num(o.stats_pairs)},
                  {"out", quoted(absolute_path(o.out))}};
  write_text(o.out / "config.ini", render_config("build-graph", echo));
  std::cout << report;
}

void run_graph_stats(const StatsOptions& o) {
  const auto bundle = load_graph_bundle(o.graph);
  GraphStatsOptions so;
  so.sampled_pairs = o.pairs;
  so.max_sources = o.sources;
  so.seed = o.seed;
  const auto stats = graph_stats(bundle.adjacency, so);
  const auto report = format_graph_report(stats);
  std::cout << report;
  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_text(o.out / "graph_stats.txt", report);
    write_text(o.out / "degree_histogram.csv", degree_histogram_csv(stats));
    const Echo echo{{"graph", quoted(absolute_path(o.graph))},
                    {"pairs", num(o.pairs)},
                    {"sources", num(o.sources)},
                    {"seed", num(o.seed)},
                    {"out", quoted(absolute_path(o.out))}};
    write_text(o.out / "config.ini", render_config("graph-stats", echo));
  }
}

void run_train(const TrainOptions& o) {
  const auto model_cfg = o.learn.model_config();
  const auto train_cfg = o.learn.train_config();
  const auto g = load_graph(o.graph);
  const fs::path dataset_dir = o.dataset.empty() ? g.bundle.dataset_dir : o.dataset;
  if (dataset_dir.empty()) throw InputError("graph bundle records no dataset; pass --dataset");
  const auto ds = load_dataset_bundle(dataset_dir);
  check_dataset_matches(ds, g.bundle.adjacency);
  ensure_dir(o.out);

  Echo echo{{"graph", quoted(absolute_path(o.graph))}, {"dataset", quoted(absolute_path(dataset_dir))}};
  add_learn_echo(echo, o.learn);
  echo.emplace_back("out", quoted(absolute_path(o.out)));
  const std::string config_text = render_config("train", echo);
  write_text(o.out / "config.ini", config_text);

  const auto result = train(ds, g.graphs, model_cfg, train_cfg, log_epoch);

  auto save = [&](const ModelParams& params, const std::string& name, int epoch) {
    Checkpoint ckpt;
    ckpt.config = model_cfg;
    ckpt.params = params;
    for (const auto& [k, v] : echo) ckpt.metadata["config." + k] = v;
    ckpt.metadata["graph"] = absolute_path(o.graph).string();
    ckpt.metadata["dataset"] = absolute_path(dataset_dir).string();
    ckpt.metadata["epoch"] = std::to_string(epoch);
    ckpt.metadata["seed"] = std::to_string(o.learn.seed);
    ckpt.metadata["graph_edges"] = g.bundle.config.edge_set();
    save_checkpoint(ckpt, o.out / name);
  };
  const int last_epoch = result.log.epochs.empty() ? 0 : result.log.epochs.back().epoch;
  save(result.best, "best.ckpt", result.log.best_epoch);
  save(result.last, "last.ckpt", last_epoch);
  write_text(o.out / "best", "best.ckpt\nepoch=" + std::to_string(result.log.best_epoch) + "\n");
  write_text(o.out / "train_log.csv", result.log.to_csv());
  std::cout << "best epoch " << result.log.best_epoch << " of " << last_epoch << "; checkpoint "
            << (o.out / "best.ckpt").string() << "\n";
}

void run_evaluate(const EvaluateOptions& o) {
  fs::path ckpt_path = o.checkpoint;
  if (fs::is_directory(ckpt_path)) ckpt_path /= "best.ckpt";
  const auto ckpt = load_checkpoint(ckpt_path);
  auto recorded = [&](const std::string& key) -> fs::path {
    const auto it = ckpt.metadata.find(key);
    return it == ckpt.metadata.end() ? fs::path() : fs::path(it->second);
  };
  const fs::path graph_dir = o.graph.empty() ? recorded("graph") : o.graph;
  if (graph_dir.empty()) throw InputError("checkpoint records no graph; pass --graph");
  const auto g = load_graph(graph_dir);
  fs::path dataset_dir = o.dataset.empty() ? recorded("dataset") : o.dataset;
  if (dataset_dir.empty()) dataset_dir = g.bundle.dataset_dir;
  if (dataset_dir.empty()) throw InputError("no dataset recorded; pass --dataset");
  const auto ds = load_dataset_bundle(dataset_dir);
  check_dataset_matches(ds, g.bundle.adjacency);
  if (ckpt.params.n_nodes() != ds.n_users + ds.n_items) throw InputError("checkpoint does not match the dataset");

  EvalTarget target;
  if (o.target == "test")
    target = EvalTarget::Test;
  else if (o.target == "validation")
    target = EvalTarget::Validation;
  else
    throw InputError("unknown target '" + o.target + "' (expected test or validation)");
  EvalConfig cfg;
  cfg.ks = o.ks;
  const auto report = evaluate(embed(ckpt.params, g.graphs, ckpt.config), ds, cfg, target);
  std::cout << report.table();

  if (!o.out.empty()) {
    ensure_dir(o.out);
    write_text(o.out / "report.csv", report.csv());
    if (o.per_user) write_text(o.out / "per_user.csv", report.per_user_csv());
    const Echo echo{{"checkpoint", quoted(absolute_path(ckpt_path))},
                    {"graph", quoted(absolute_path(graph_dir))},
                    {"dataset", quoted(absolute_path(dataset_dir))},
                    {"k", list(o.ks)},
                    {"target", "\"" + o.target + "\""},
                    {"per-user", flag(o.per_user)},
                    {"out", quoted(absolute_path(o.out))}};
    write_text(o.out / "config.ini", render_config("evaluate", echo));
  }
}

namespace {

struct CellResult {
  std::string status = "ok";
  double recall20 = 0.0;
  double ndcg20 = 0.0;
  int best_epoch = 0;
  double seconds = 0.0;
};

}  // namespace

void run_ablate(const AblateOptions& o) {
  if (o.edges.empty() || o.sims.empty() || o.thresholds.empty() || o.depths.empty() || o.seeds.empty())
    throw InputError("no cells: every sweep axis needs at least one value");
  const auto ds = load_dataset_bundle(o.dataset);
  const auto base_train = o.learn.train_config();
  const auto layer1 = parse_layer1_mode(o.layer1);
  for (const auto& s : o.sims) parse_similarity(s);
  ensure_dir(o.out);

  Echo echo{{"dataset", quoted(absolute_path(o.dataset))},
            {"edges", list(o.edges)},
            {"sims", list(o.sims)},
            {"thresholds", list(o.thresholds)},
            {"depths", list(o.depths)},
            {"seeds", list(o.seeds)},
            {"layer1", "\"" + o.layer1 + "\""},
            {"ii-budget", num(o.ii_budget)}};
  add_learn_echo(echo, o.learn);
  echo.emplace_back("out", quoted(absolute_path(o.out)));
  write_text(o.out / "config.ini", render_config("ablate", echo));

  // A cell's graph only depends on the similarity settings when similarity
  // edges are present, so interaction-only cells share one result.
  std::map<std::string, CellResult> done;
  std::string csv = "edges,similarity,threshold,layers,seed,status,recall20,ndcg20,best_epoch,seconds\n";
  std::size_t cells = 0;
  for (const auto& edge_spec : o.edges) {
    GraphConfig gc;
    gc.set_edge_set(edge_spec);
    const bool uses_similarity = gc.user_user || gc.item_item;
    for (const auto& sim : o.sims) {
      for (double t : o.thresholds) {
        gc.similarity = parse_similarity(sim);
        gc.threshold = t;
        gc.layer1 = layer1;
        gc.item_pair_budget = o.ii_budget;
        const std::string graph_key =
            uses_similarity ? gc.edge_set() + "|" + sim + "|" + num(t) : gc.edge_set();
        std::optional<PropagationGraphs> graphs;
        std::string graph_error;
        for (int depth : o.depths) {
          for (auto seed : o.seeds) {
            ++cells;
            const std::string key = graph_key + "|" + std::to_string(depth) + "|" + std::to_string(seed);
            auto it = done.find(key);
            if (it == done.end()) {
              CellResult r;
              const auto start = std::chrono::steady_clock::now();
              try {
                if (!graphs && graph_error.empty()) {
                  try {
                    graphs = propagation_graphs(build_adjacency(ds, gc), layer1);
                  } catch (const BudgetExceeded& e) {
                    graph_error = std::string("oom: ") + e.what();
                  }
                }
                if (!graph_error.empty()) throw BudgetExceeded(graph_error);
                auto learn = o.learn;
                learn.layers = depth;
                learn.seed = seed;
                const auto model_cfg = learn.model_config();
                auto train_cfg = base_train;
                train_cfg.seed = seed;
                const auto result = train(ds, *graphs, model_cfg, train_cfg);
                const auto report = evaluate(embed(result.best, *graphs, model_cfg), ds, EvalConfig{{20}});
                r.recall20 = report.recall_at(20);
                r.ndcg20 = report.ndcg_at(20);
                r.best_epoch = result.log.best_epoch;
              } catch (const BudgetExceeded& e) {
                r.status = graph_error.empty() ? std::string("oom: ") + e.what() : graph_error;
              } catch (const DivergenceError& e) {
                r.status = std::string("diverged: ") + e.what();
              } catch (const Error& e) {
                r.status = std::string("failed: ") + e.what();
              }
              r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
              it = done.emplace(key, r).first;
            }
            const auto& r = it->second;
            std::string status = r.status;
            for (char& c : status)
              if (c == ',' || c == '\n') c = ';';
            char secs[32];
            std::snprintf(secs, sizeof(secs), "%.3f", r.seconds);
            const std::string row = "\"" + gc.edge_set() + "\"," + sim + "," + num(t) + "," + std::to_string(depth) +
                                    "," + std::to_string(seed) + "," + status + "," + num(r.recall20) + "," +
                                    num(r.ndcg20) + "," + std::to_string(r.best_epoch) + "," + secs + "\n";
            csv += row;
            log_info("cell " + std::to_string(cells) + ": " + row.substr(0, row.size() - 1));
          }
        }
      }
    }
  }
  write_text(o.out / "ablate.csv", csv);
  std::cout << csv;
}

}  // namespace hgcf::cli
