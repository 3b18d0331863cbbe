#pragma once

#include <vector>

#include <Eigen/Core>

namespace topomap {

/// Minimum-cost assignment of rows to distinct columns (rows <= cols).
/// Returns the column chosen for each row.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace topomap
