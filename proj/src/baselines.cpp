#include "rpromp/baselines.hpp"

#include "rpromp/metrics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rpromp {

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::Vector4d;
using Eigen::VectorXd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Matrix3d rotation(const Vector4d& q) {
  return Eigen::Quaterniond(q(0), q(1), q(2), q(3)).normalized().toRotationMatrix();
}

double wrap_near(double angle, double reference) {
  return angle + kTwoPi * std::round((reference - angle) / kTwoPi);
}

// Sign-continuous path whose first element lies in the hemisphere of `anchor`.
std::vector<Point> continuous(std::vector<Point> path, const Point& anchor) {
  for (std::size_t t = 0; t < path.size(); ++t) {
    const Point& ref = t == 0 ? anchor : path[t - 1];
    if (path[t].dot(ref) < 0.0) path[t] = -path[t];
  }
  return path;
}

std::vector<EuclideanDemo> euler_demos(const std::vector<ManifoldDemo>& demos) {
  std::vector<EuclideanDemo> out;
  for (const auto& demo : demos) {
    const auto quats = preprocess_quaternions(demo.points);
    MatrixXd angles(static_cast<Eigen::Index>(quats.size()), 3);
    for (std::size_t t = 0; t < quats.size(); ++t) {
      angles.row(static_cast<Eigen::Index>(t)) = quat_to_euler(quats[t]).ypr.transpose();
    }
    angles = unwrap_angles(angles);
    // start every demo on the same 2 pi branch as the first one
    if (!out.empty()) {
      for (int j = 0; j < 3; ++j) {
        const double shift = wrap_near(angles(0, j), out.front().values(0, j)) - angles(0, j);
        angles.col(j).array() += shift;
      }
    }
    out.push_back({demo.times, angles});
  }
  return out;
}

std::vector<EuclideanDemo> quaternion_demos(const std::vector<ManifoldDemo>& demos) {
  std::vector<EuclideanDemo> out;
  for (const auto& demo : demos) {
    auto quats = preprocess_quaternions(demo.points);
    if (!out.empty()) quats = continuous(std::move(quats), out.front().values.row(0).transpose());
    out.push_back({demo.times, to_matrix(quats)});
  }
  return out;
}

}  // namespace

EulerAngles quat_to_euler(const Vector4d& q) {
  const Eigen::Matrix3d R = rotation(q);
  EulerAngles e;
  const double cp = std::hypot(R(0, 0), R(1, 0));
  const double pitch = std::atan2(-R(2, 0), cp);
  if (std::abs(std::abs(pitch) - std::numbers::pi / 2) < 1e-6) {
    e.gimbal_lock = true;
    e.ypr = Vector3d(std::atan2(-R(0, 1), R(1, 1)), pitch, 0.0);
  } else {
    e.ypr = Vector3d(std::atan2(R(1, 0), R(0, 0)), pitch, std::atan2(R(2, 1), R(2, 2)));
  }
  return e;
}

Vector4d euler_to_quat(const Vector3d& ypr) {
  const Eigen::Quaterniond q = Eigen::AngleAxisd(ypr(0), Vector3d::UnitZ()) *
                               Eigen::AngleAxisd(ypr(1), Vector3d::UnitY()) *
                               Eigen::AngleAxisd(ypr(2), Vector3d::UnitX());
  Vector4d out(q.w(), q.x(), q.y(), q.z());
  return out / out.norm();
}

MatrixXd unwrap_angles(const MatrixXd& angles) {
  MatrixXd out = angles;
  for (Eigen::Index k = 1; k < out.rows(); ++k) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      double delta = angles(k, j) - angles(k - 1, j);
      delta -= kTwoPi * std::ceil((delta - std::numbers::pi) / kTwoPi);
      out(k, j) = out(k - 1, j) + delta;
    }
  }
  return out;
}

EulerPromp fit_euler(const std::vector<ManifoldDemo>& demos, const BasisConfig& basis,
                     const EuclideanFitOptions& options) {
  return {fit_euclidean(euler_demos(demos), basis, options), kEulerConvention};
}

UnitNormPromp fit_unitnorm(const std::vector<ManifoldDemo>& demos, const BasisConfig& basis,
                           const EuclideanFitOptions& options) {
  return {fit_euclidean(quaternion_demos(demos), basis, options)};
}

EulerPromp condition(const EulerPromp& model, double phase, const Vector4d& target, const Eigen::Matrix3d& cov) {
  const VectorXd mean = marginal(model.inner, phase).mean;
  Vector3d ypr = quat_to_euler(target / target.norm()).ypr;
  for (int j = 0; j < 3; ++j) ypr(j) = wrap_near(ypr(j), mean(j));
  EulerPromp out = model;
  out.inner = condition(model.inner, ViaPoint{phase, ypr, cov});
  return out;
}

EulerPromp condition(const EulerPromp& model, double phase, const Vector4d& target, double variance) {
  return condition(model, phase, target, Eigen::Matrix3d(variance * Eigen::Matrix3d::Identity()));
}

Eigen::Matrix3d euler_jacobian(const Vector4d& q) {
  const Manifold S3 = Manifold::sphere(3);
  const Point x = q / q.norm();
  const Vector3d centre = quat_to_euler(x).ypr;
  constexpr double h = 1e-6;
  Eigen::Matrix3d J;
  for (int k = 0; k < 3; ++k) {
    const Vector3d e = h * Vector3d::Unit(k);
    Vector3d plus = quat_to_euler(S3.exp(x, e)).ypr;
    Vector3d minus = quat_to_euler(S3.exp(x, -e)).ypr;
    for (int j = 0; j < 3; ++j) {
      plus(j) = wrap_near(plus(j), centre(j));
      minus(j) = wrap_near(minus(j), centre(j));
    }
    J.col(k) = (plus - minus) / (2.0 * h);
  }
  return J;
}

UnitNormPromp condition(const UnitNormPromp& model, double phase, const Vector4d& target, double variance) {
  const VectorXd mean = marginal(model.inner, phase).mean;
  VectorXd y = target / target.norm();
  if (y.dot(mean) < 0.0) y = -y;
  return {condition(model.inner, ViaPoint{phase, y, variance * MatrixXd::Identity(4, 4)})};
}

std::vector<Point> mean_path(const EulerPromp& model, const VectorXd& phases) {
  std::vector<Point> path;
  for (Eigen::Index t = 0; t < phases.size(); ++t) {
    path.push_back(euler_to_quat(marginal(model.inner, phases(t)).mean.head<3>()));
  }
  return preprocess_quaternions(path);
}

std::vector<Point> mean_path(const UnitNormPromp& model, const VectorXd& phases) {
  std::vector<Point> path;
  for (Eigen::Index t = 0; t < phases.size(); ++t) path.push_back(marginal(model.inner, phases(t)).mean);
  return preprocess_quaternions(path);
}

std::vector<Point> mean_path(const OrientationPromp& model, const VectorXd& phases) {
  std::vector<Point> path;
  for (Eigen::Index t = 0; t < phases.size(); ++t) path.push_back(marginal(model, phases(t)).mean);
  return path;
}

VectorXd raw_mean_norms(const UnitNormPromp& model, const VectorXd& phases) {
  VectorXd n(phases.size());
  for (Eigen::Index t = 0; t < phases.size(); ++t) n(t) = marginal(model.inner, phases(t)).mean.norm();
  return n;
}

ComparisonReport compare_approaches(const std::vector<ManifoldDemo>& demos, const BasisConfig& basis, double via_phase,
                                    const Vector4d& via_target, double variance, const ComparisonOptions& options) {
  const Manifold S3 = Manifold::sphere(3);
  const VectorXd phases = uniform_phases(options.grid);

  const OrientationPromp riem = fit_orientation(S3, demos, basis, options.riemannian);
  const EulerPromp euler = fit_euler(demos, basis, options.euclidean);
  const UnitNormPromp unit = fit_unitnorm(demos, basis, options.euclidean);

  const Point anchor = preprocess_quaternions(demos.front().points).front();
  Point target = via_target / via_target.norm();

  const OrientationPromp riem_c =
      condition(riem, ViaPoint{via_phase, target, variance * MatrixXd::Identity(3, 3)});
  const Eigen::Matrix3d J = euler_jacobian(target);
  const Eigen::Matrix3d euler_cov = variance * J * J.transpose();
  const EulerPromp euler_c = condition(euler, via_phase, via_target, euler_cov);
  const UnitNormPromp unit_c = condition(unit, via_phase, via_target, variance);

  const VectorXd times = phases * riem.mean_duration;
  auto score = [&](const std::string& name, std::vector<Point> before, std::vector<Point> after) {
    before = continuous(std::move(before), anchor);
    after = continuous(std::move(after), anchor);
    Point t = target;
    Eigen::Index k = 0;
    (phases.array() - via_phase).abs().minCoeff(&k);
    if (t.dot(after[static_cast<std::size_t>(k)]) < 0.0) t = -t;
    return ApproachMetrics{name, jerkiness(after, times), tracking_accuracy(S3, after, phases, via_phase, t),
                           deviation_from_mean(S3, after, before)};
  };

  ComparisonReport report;
  report.via_phase = via_phase;
  report.variance = variance;
  report.euler_cov = euler_cov;
  report.rows.push_back(score("riemannian", mean_path(riem, phases), mean_path(riem_c, phases)));
  report.rows.push_back(score("euler", mean_path(euler, phases), mean_path(euler_c, phases)));
  report.rows.push_back(score("unit-norm", mean_path(unit, phases), mean_path(unit_c, phases)));
  report.unitnorm_min_raw_norm = raw_mean_norms(unit, phases).minCoeff();
  return report;
}

}  // namespace rpromp
