#include "hgcf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hgcf/error.hpp"
#include "hgcf/log.hpp"
#include "text_format.hpp"

namespace hgcf {

namespace {

// Returns the top-k candidates and whether k had to be truncated.
std::vector<Index> top_candidates(std::span<const double> scores, std::span<const Index> excluded, int k,
                                  bool& truncated) {
  std::vector<Index> candidates;
  candidates.reserve(scores.size());
  auto ex = excluded.begin();
  for (Index i = 0; i < static_cast<Index>(scores.size()); ++i) {
    while (ex != excluded.end() && *ex < i) ++ex;
    if (ex != excluded.end() && *ex == i) continue;
    candidates.push_back(i);
  }
  truncated = static_cast<std::size_t>(k) > candidates.size();
  const auto take = std::min(candidates.size(), static_cast<std::size_t>(std::max(k, 0)));
  auto better = [&scores](Index a, Index b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    return sa != sb ? sa > sb : a < b;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                    better);
  candidates.resize(take);
  return candidates;
}

double discount(std::size_t rank) { return 1.0 / std::log2(static_cast<double>(rank) + 1.0); }

}  // namespace

std::vector<Index> rank_items(std::span<const double> scores, std::span<const Index> excluded, int k) {
  bool truncated = false;
  auto top = top_candidates(scores, excluded, k, truncated);
  if (truncated)
    log_warning("k=" + std::to_string(k) + " exceeds the " + std::to_string(top.size()) +
                " candidate items; returning all of them");
  return top;
}

double recall_at_k(std::span<const Index> topk, std::span<const Index> relevant, int k) {
  if (relevant.empty()) throw InputError("recall_at_k: no relevant items");
  const auto n = std::min(topk.size(), static_cast<std::size_t>(std::max(k, 0)));
  std::size_t hits = 0;
  for (std::size_t r = 0; r < n; ++r) hits += std::binary_search(relevant.begin(), relevant.end(), topk[r]);
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double ndcg_at_k(std::span<const Index> topk, std::span<const Index> relevant, int k) {
  if (relevant.empty()) throw InputError("ndcg_at_k: no relevant items");
  const auto n = std::min(topk.size(), static_cast<std::size_t>(std::max(k, 0)));
  double dcg = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    if (std::binary_search(relevant.begin(), relevant.end(), topk[r])) dcg += discount(r + 1);
  double idcg = 0.0;
  const auto ideal = std::min(relevant.size(), static_cast<std::size_t>(std::max(k, 0)));
  for (std::size_t r = 1; r <= ideal; ++r) idcg += discount(r);
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

double EvalReport::recall_at(int k) const {
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] == k) return recall[i];
  throw InputError("report has no K=" + std::to_string(k));
}

double EvalReport::ndcg_at(int k) const {
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] == k) return ndcg[i];
  throw InputError("report has no K=" + std::to_string(k));
}

std::string EvalReport::table() const {
  std::string out = "     K     recall       ndcg    users\n";
  char buf[96];
  for (std::size_t i = 0; i < ks.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%6d  %9.6f  %9.6f  %7zu\n", ks[i], recall[i], ndcg[i], n_users);
    out += buf;
  }
  return out;
}

std::string EvalReport::csv() const {
  std::string out = "K,recall,ndcg,n_users\n";
  for (std::size_t i = 0; i < ks.size(); ++i)
    out += std::to_string(ks[i]) + "," + detail::format_double(recall[i]) + "," + detail::format_double(ndcg[i]) +
           "," + std::to_string(n_users) + "\n";
  return out;
}

std::string EvalReport::per_user_csv() const {
  std::string out = "user,n_relevant";
  for (int k : ks) out += ",recall@" + std::to_string(k);
  for (int k : ks) out += ",ndcg@" + std::to_string(k);
  out += "\n";
  for (const auto& u : per_user) {
    out += std::to_string(u.user) + "," + std::to_string(u.n_relevant);
    for (double r : u.recall) out += "," + detail::format_double(r);
    for (double g : u.ndcg) out += "," + detail::format_double(g);
    out += "\n";
  }
  return out;
}

EvalReport evaluate(const FinalEmbeddings& fe, const InteractionDataset& ds, const EvalConfig& cfg,
                    EvalTarget target) {
  if (fe.n_users() != ds.n_users || fe.n_items() != ds.n_items) throw InputError("embeddings do not cover the dataset");
  if (cfg.ks.empty()) throw InputError("no K values requested");
  for (int k : cfg.ks)
    if (k < 1 || k > ds.n_items) throw InputError("K=" + std::to_string(k) + " outside [1, n_items]");
  const int max_k = *std::max_element(cfg.ks.begin(), cfg.ks.end());

  EvalReport report;
  report.ks = cfg.ks;
  report.recall.assign(cfg.ks.size(), 0.0);
  report.ndcg.assign(cfg.ks.size(), 0.0);

  const Matrix& rows = fe.rows();
  const auto items = rows.bottomRows(ds.n_items);
  const bool exclude_validation = target == EvalTarget::Test && cfg.exclude_validation;
  constexpr Index kBlock = 256;
  std::size_t truncated_users = 0;
  std::vector<Index> excluded;
  Matrix block_scores;
  for (Index start = 0; start < ds.n_users; start += kBlock) {
    const Index count = std::min(kBlock, ds.n_users - start);
    block_scores.noalias() = rows.middleRows(start, count) * items.transpose();
    for (Index b = 0; b < count; ++b) {
      const auto u = static_cast<std::size_t>(start + b);
      const auto& relevant = target == EvalTarget::Test ? ds.test[u] : ds.validation[u];
      if (relevant.empty()) continue;
      excluded.clear();
      if (cfg.exclude_train) excluded.insert(excluded.end(), ds.train[u].begin(), ds.train[u].end());
      if (exclude_validation) excluded.insert(excluded.end(), ds.validation[u].begin(), ds.validation[u].end());
      std::sort(excluded.begin(), excluded.end());

      bool truncated = false;
      const auto top = top_candidates(std::span<const double>(block_scores.row(b).data(), static_cast<std::size_t>(ds.n_items)),
                                      excluded, max_k, truncated);
      truncated_users += truncated;
      UserEval ue;
      ue.user = static_cast<Index>(u);
      ue.n_relevant = relevant.size();
      for (int k : cfg.ks) {
        ue.recall.push_back(recall_at_k(top, relevant, k));
        ue.ndcg.push_back(ndcg_at_k(top, relevant, k));
      }
      report.per_user.push_back(std::move(ue));
    }
  }
  if (truncated_users > 0)
    log_warning("K=" + std::to_string(max_k) + " exceeds the candidate pool of " + std::to_string(truncated_users) +
                " user(s); their full pools were ranked");

  report.n_users = report.per_user.size();
  for (const auto& ue : report.per_user) {
    for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
      report.recall[i] += ue.recall[i];
      report.ndcg[i] += ue.ndcg[i];
    }
  }
  if (report.n_users > 0) {
    for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
      report.recall[i] /= static_cast<double>(report.n_users);
      report.ndcg[i] /= static_cast<double>(report.n_users);
    }
  }
  return report;
}

}  // namespace hgcf
