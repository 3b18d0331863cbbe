#pragma once

#include <Eigen/Core>

namespace topomap {

struct CpdParams {
  double w = 0.1;        // outlier weight
  double beta = 3.0;     // width of the coherence kernel
  double lambda = 3.0;   // smoothness regularization
  double tolerance = 1e-5;
  int max_iterations = 100;
};

struct CpdResult {
  Eigen::MatrixXd transformed;  // moved source points, one row per source point
  Eigen::MatrixXd posterior;    // P(source m | target n), sources x targets
  double sigma2 = 0.0;
  int iterations = 0;
};

/// Nonrigid coherent point drift: moves `source` (rows = points) onto
/// `target` under a Gaussian-mixture model with a smooth displacement field.
/// Each set is first brought to zero mean and unit RMS radius, so beta and
/// lambda act in those units; `transformed` comes back in target coordinates.
CpdResult coherent_point_drift(const Eigen::MatrixXd& target, const Eigen::MatrixXd& source,
                               const CpdParams& params = {});

}  // namespace topomap
