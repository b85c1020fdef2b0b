#pragma once

#include <span>
#include <string>
#include <vector>

#include "hgcf/dataset.hpp"
#include "hgcf/model.hpp"

namespace hgcf {

enum class EvalTarget { Test, Validation };

struct EvalConfig {
  std::vector<int> ks{20};
  bool exclude_train = true;
  bool exclude_validation = true;  // ignored for EvalTarget::Validation
};

// Top-k items by descending score, ties broken by ascending item index.
// `excluded` must be sorted. If k exceeds the candidate pool the whole pool
// is returned and a warning is logged.
std::vector<Index> rank_items(std::span<const double> scores, std::span<const Index> excluded, int k);

// `relevant` must be sorted and non-empty.
double recall_at_k(std::span<const Index> topk, std::span<const Index> relevant, int k);
// Binary-relevance NDCG with log2 discount and IDCG over min(k, |relevant|) positions.
double ndcg_at_k(std::span<const Index> topk, std::span<const Index> relevant, int k);

struct UserEval {
  Index user = 0;
  std::size_t n_relevant = 0;
  std::vector<double> recall;  // aligned with EvalReport::ks
  std::vector<double> ndcg;
};

struct EvalReport {
  std::vector<int> ks;
  std::vector<double> recall;  // mean over evaluated users
  std::vector<double> ndcg;
  std::size_t n_users = 0;
  std::vector<UserEval> per_user;

  double recall_at(int k) const;
  double ndcg_at(int k) const;

  std::string table() const;
  std::string csv() const;  // K,recall,ndcg,n_users
  std::string per_user_csv() const;
};

EvalReport evaluate(const FinalEmbeddings& fe, const InteractionDataset& ds, const EvalConfig& cfg,
                    EvalTarget target = EvalTarget::Test);

}  // namespace hgcf
