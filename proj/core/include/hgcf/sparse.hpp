#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hgcf/dataset.hpp"
#include "hgcf/matrix.hpp"

namespace hgcf {

enum class EdgeType : std::uint8_t { UserItem, UserUser, ItemItem, SelfLoop };

const char* edge_type_name(EdgeType type);
EdgeType parse_edge_type(const std::string& name);

struct Entry {
  Index row;
  Index col;
  double weight;
  EdgeType type;
};

// Weighted square matrix over the unified node index in CSR form. Users own
// rows [0, n_users), items own rows [n_users, n_users + n_items). Columns are
// sorted within each row and no (row, col) appears twice.
class SparseAdjacency {
 public:
  SparseAdjacency() = default;

  // Zero-weight entries are dropped. Throws InputError on duplicates or
  // out-of-range indices.
  static SparseAdjacency from_entries(Index n_users, Index n_items, std::vector<Entry> entries);

  Index n_users() const { return n_users_; }
  Index n_items() const { return n_items_; }
  Index n_nodes() const { return n_users_ + n_items_; }
  std::size_t nnz() const { return cols_.size(); }

  std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
  std::span<const Index> cols() const { return cols_; }
  std::span<const double> values() const { return values_; }
  std::span<const EdgeType> types() const { return types_; }

  // Stored (i, i) weight, zero when absent.
  std::span<const double> diagonal() const { return diagonal_; }

  std::vector<Entry> entries() const;

  // Weight at (row, col), or 0 when not stored.
  double weight(Index row, Index col) const;

  bool is_symmetric() const;

  // out = A * in. out is resized to (n_nodes x in.cols()).
  void multiply(const Matrix& in, Matrix& out) const;

  // Copy keeping only entries whose type satisfies keep.
  SparseAdjacency filtered(const std::function<bool(EdgeType)>& keep) const;

  // Copy with identical structure and replaced values (same order as values()).
  SparseAdjacency with_values(std::vector<double> values) const;

 private:
  Index n_users_ = 0;
  Index n_items_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<Index> cols_;
  std::vector<double> values_;
  std::vector<EdgeType> types_;
  std::vector<double> diagonal_;
};

// D^{-1/2} A D^{-1/2} together with the degrees it was built from.
struct NormalizedAdjacency {
  SparseAdjacency matrix;
  std::vector<double> degrees;  // d_i = sum_j |A_ij| of the source matrix
};

}  // namespace hgcf
