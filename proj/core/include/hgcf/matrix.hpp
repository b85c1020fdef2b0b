#pragma once

#include <Eigen/Dense>

namespace hgcf {

// Node-major dense storage: one embedding per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace hgcf
