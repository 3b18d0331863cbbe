#include "topomap/cpd.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "topomap/errors.hpp"

namespace topomap {

namespace {

// Squared distances between the rows of a (M x D) and b (N x D), M x N.
Eigen::MatrixXd pairwise_sq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::VectorXd an = a.rowwise().squaredNorm(), bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd d = (-2.0 * a * b.transpose()).colwise() + an;
  d.rowwise() += bn.transpose();
  return d.cwiseMax(0.0);
}

// Zero mean and unit RMS radius; returns the mean and the scale.
std::pair<Eigen::RowVectorXd, double> normalize(Eigen::MatrixXd& pts) {
  const Eigen::RowVectorXd mean = pts.colwise().mean();
  pts.rowwise() -= mean;
  double scale = std::sqrt(pts.rowwise().squaredNorm().mean());
  if (!(scale > 1e-12)) scale = 1.0;
  pts /= scale;
  return {mean, scale};
}

}  // namespace

CpdResult coherent_point_drift(const Eigen::MatrixXd& target_in, const Eigen::MatrixXd& source_in,
                               const CpdParams& p) {
  const Eigen::Index n = target_in.rows(), m = source_in.rows(), dim = target_in.cols();
  if (n == 0 || m == 0) throw ParameterError("point drift needs non-empty point sets");
  if (source_in.cols() != dim) throw ParameterError("point sets differ in dimension");
  // beta and lambda are meant for normalized coordinates.
  Eigen::MatrixXd target = target_in, source = source_in;
  const auto [target_mean, target_scale] = normalize(target);
  normalize(source);
  if (!(p.w >= 0.0 && p.w < 1.0)) throw ParameterError("outlier weight must lie in [0, 1)");
  if (!(p.beta > 0.0 && p.lambda > 0.0)) throw ParameterError("beta and lambda must be > 0");

  const Eigen::MatrixXd g = (-pairwise_sq(source, source) / (2.0 * p.beta * p.beta)).array().exp().matrix();
  CpdResult r;
  r.transformed = source;
  r.sigma2 = pairwise_sq(source, target).sum() / static_cast<double>(dim * n * m);
  const double floor = std::max(r.sigma2, 1e-300) * 1e-12;
  if (r.sigma2 <= 0.0) r.sigma2 = 1.0;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, dim);
  double prev = std::numeric_limits<double>::infinity();

  auto e_step = [&](Eigen::VectorXd& den) {
    Eigen::MatrixXd k = (-pairwise_sq(r.transformed, target) / (2.0 * r.sigma2)).array().exp().matrix();
    const double c = std::pow(2.0 * std::numbers::pi * r.sigma2, 0.5 * static_cast<double>(dim)) * p.w /
                     (1.0 - p.w) * static_cast<double>(m) / static_cast<double>(n);
    den = k.colwise().sum().transpose().array() + c;
    r.posterior = k.array().rowwise() / den.transpose().array();
  };

  for (r.iterations = 0; r.iterations < p.max_iterations; ++r.iterations) {
    Eigen::VectorXd den;
    e_step(den);
    const double nll = -den.array().log().sum() + 0.5 * static_cast<double>(dim * n) * std::log(r.sigma2) +
                       0.5 * p.lambda * (w.transpose() * g * w).trace();
    const Eigen::VectorXd p1 = r.posterior.rowwise().sum();
    const Eigen::VectorXd pt1 = r.posterior.colwise().sum().transpose();
    const double np = p1.sum();
    if (np < 1e-12) break;
    const Eigen::MatrixXd px = r.posterior * target;

    Eigen::MatrixXd a = p1.asDiagonal() * g;
    a.diagonal().array() += p.lambda * r.sigma2;
    w = a.partialPivLu().solve(px - p1.asDiagonal() * source);
    r.transformed = source + g * w;

    const double xpx = (pt1.array() * target.rowwise().squaredNorm().array()).sum();
    const double tpt = (p1.array() * r.transformed.rowwise().squaredNorm().array()).sum();
    const double cross = (px.array() * r.transformed.array()).sum();
    r.sigma2 = std::max((xpx - 2.0 * cross + tpt) / (np * static_cast<double>(dim)), floor);

    const bool converged = std::isfinite(prev) && std::abs(nll - prev) <= p.tolerance * std::abs(nll);
    prev = nll;
    if (converged || r.sigma2 <= floor) {
      ++r.iterations;
      break;
    }
  }
  Eigen::VectorXd den;
  e_step(den);
  r.transformed = (r.transformed * target_scale).rowwise() + target_mean;
  r.sigma2 *= target_scale * target_scale;
  return r;
}

}  // namespace topomap
