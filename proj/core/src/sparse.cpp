#include "hgcf/sparse.hpp"

#include <algorithm>
#include <numeric>

#include "hgcf/error.hpp"
#include "hgcf/parallel.hpp"

namespace hgcf {

const char* edge_type_name(EdgeType type) {
  switch (type) {
    case EdgeType::UserItem: return "ui";
    case EdgeType::UserUser: return "uu";
    case EdgeType::ItemItem: return "ii";
    case EdgeType::SelfLoop: return "self";
  }
  return "?";
}

EdgeType parse_edge_type(const std::string& name) {
  if (name == "ui") return EdgeType::UserItem;
  if (name == "uu") return EdgeType::UserUser;
  if (name == "ii") return EdgeType::ItemItem;
  if (name == "self") return EdgeType::SelfLoop;
  throw InputError("unknown edge type '" + name + "'");
}

SparseAdjacency SparseAdjacency::from_entries(Index n_users, Index n_items, std::vector<Entry> entries) {
  if (n_users < 0 || n_items < 0) throw InputError("negative node counts");
  const Index n = n_users + n_items;
  std::erase_if(entries, [](const Entry& e) { return e.weight == 0.0; });
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n) throw InputError("adjacency entry out of range");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col)
      throw InputError("duplicate adjacency entry (" + std::to_string(entries[k].row) + ", " +
                       std::to_string(entries[k].col) + ")");
  }

  SparseAdjacency a;
  a.n_users_ = n_users;
  a.n_items_ = n_items;
  a.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  a.cols_.reserve(entries.size());
  a.values_.reserve(entries.size());
  a.types_.reserve(entries.size());
  a.diagonal_.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& e : entries) {
    ++a.row_ptr_[static_cast<std::size_t>(e.row) + 1];
    a.cols_.push_back(e.col);
    a.values_.push_back(e.weight);
    a.types_.push_back(e.type);
    if (e.row == e.col) a.diagonal_[static_cast<std::size_t>(e.row)] = e.weight;
  }
  std::partial_sum(a.row_ptr_.begin(), a.row_ptr_.end(), a.row_ptr_.begin());
  return a;
}

std::vector<Entry> SparseAdjacency::entries() const {
  std::vector<Entry> out;
  out.reserve(nnz());
  for (Index i = 0; i < n_nodes(); ++i) {
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      out.push_back({i, cols_[kk], values_[kk], types_[kk]});
    }
  }
  return out;
}

double SparseAdjacency::weight(Index row, Index col) const {
  if (row < 0 || row >= n_nodes()) return 0.0;
  auto first = cols_.begin() + row_ptr_[row];
  auto last = cols_.begin() + row_ptr_[row + 1];
  auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

bool SparseAdjacency::is_symmetric() const {
  for (Index i = 0; i < n_nodes(); ++i) {
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (weight(cols_[kk], i) != values_[kk]) return false;
    }
  }
  return true;
}

void SparseAdjacency::multiply(const Matrix& in, Matrix& out) const {
  if (in.rows() != n_nodes()) throw InputError("sparse product: row count mismatch");
  const auto width = in.cols();
  out.setZero(n_nodes(), width);
  const double* src = in.data();
  double* dst = out.data();
  parallel_for_rows(static_cast<std::size_t>(n_nodes()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* out_row = dst + i * static_cast<std::size_t>(width);
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        const double w = values_[static_cast<std::size_t>(k)];
        const double* in_row = src + static_cast<std::size_t>(cols_[static_cast<std::size_t>(k)]) * width;
        for (Eigen::Index c = 0; c < width; ++c) out_row[c] += w * in_row[c];
      }
    }
  });
}

SparseAdjacency SparseAdjacency::filtered(const std::function<bool(EdgeType)>& keep) const {
  auto all = entries();
  std::erase_if(all, [&](const Entry& e) { return !keep(e.type); });
  return from_entries(n_users_, n_items_, std::move(all));
}

SparseAdjacency SparseAdjacency::with_values(std::vector<double> values) const {
  if (values.size() != values_.size()) throw InputError("with_values: size mismatch");
  SparseAdjacency a = *this;
  a.values_ = std::move(values);
  std::fill(a.diagonal_.begin(), a.diagonal_.end(), 0.0);
  for (Index i = 0; i < n_nodes(); ++i) {
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (cols_[static_cast<std::size_t>(k)] == i) a.diagonal_[static_cast<std::size_t>(i)] = a.values_[static_cast<std::size_t>(k)];
    }
  }
  return a;
}

}  // namespace hgcf
