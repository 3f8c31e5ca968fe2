#include "rpromp/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace rpromp {

Eigen::MatrixXd to_matrix(const std::vector<Point>& traj) {
  if (traj.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(traj.size()), traj.front().size());
  for (std::size_t t = 0; t < traj.size(); ++t) m.row(static_cast<Eigen::Index>(t)) = traj[t].transpose();
  return m;
}

double jerkiness(const Eigen::MatrixXd& samples, const Eigen::VectorXd& times) {
  const Eigen::Index T = samples.rows();
  if (T < 4) throw std::invalid_argument("jerkiness: need at least four samples");
  if (times.size() != T) throw std::invalid_argument("jerkiness: sample and time counts differ");
  const double dt = (times(T - 1) - times(0)) / static_cast<double>(T - 1);
  if (!(dt > 0.0)) throw std::invalid_argument("jerkiness: times must be increasing");
  for (Eigen::Index k = 1; k < T; ++k) {
    if (std::abs((times(k) - times(k - 1)) - dt) > 1e-9 * std::max(1.0, dt)) {
      throw std::invalid_argument("jerkiness: samples are not uniformly spaced in time");
    }
  }
  double sum = 0.0;
  for (Eigen::Index k = 0; k + 3 < T; ++k) {
    sum += (samples.row(k + 3) - 3.0 * samples.row(k + 2) + 3.0 * samples.row(k + 1) - samples.row(k)).squaredNorm();
  }
  return sum / std::pow(dt, 6) * dt;
}

double jerkiness(const std::vector<Point>& traj, const Eigen::VectorXd& times) {
  return jerkiness(to_matrix(traj), times);
}

double tracking_accuracy(const Manifold& M, const std::vector<Point>& traj, const Eigen::VectorXd& phases, double z,
                         const Point& target) {
  if (traj.empty() || traj.size() != static_cast<std::size_t>(phases.size())) {
    throw std::invalid_argument("tracking_accuracy: trajectory and phases differ in length");
  }
  Eigen::Index best = 0;
  (phases.array() - z).abs().minCoeff(&best);
  return M.distance(traj[static_cast<std::size_t>(best)], target);
}

double deviation_from_mean(const Manifold& M, const std::vector<Point>& traj, const std::vector<Point>& reference) {
  if (traj.size() != reference.size()) throw std::invalid_argument("deviation_from_mean: lengths differ");
  double sum = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) sum += M.distance(traj[t], reference[t]);
  return sum;
}

}  // namespace rpromp
