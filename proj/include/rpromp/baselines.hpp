#pragma once

#include "rpromp/euclidean_promp.hpp"
#include "rpromp/orientation_promp.hpp"

#include <string>
#include <vector>

namespace rpromp {

/// Intrinsic Z-Y-X (yaw, pitch, roll) angles.
inline constexpr const char* kEulerConvention = "ZYX intrinsic (yaw, pitch, roll)";

struct EulerAngles {
  Eigen::Vector3d ypr;
  bool gimbal_lock = false;  // |pitch| within 1e-6 of pi/2; roll set to 0
};

/// q = (w, x, y, z), unit norm.
EulerAngles quat_to_euler(const Eigen::Vector4d& q);
Eigen::Vector4d euler_to_quat(const Eigen::Vector3d& ypr);

/// Adds multiples of 2 pi so consecutive deltas of every column lie in (-pi, pi].
Eigen::MatrixXd unwrap_angles(const Eigen::MatrixXd& angles);

/// Classic ProMP over unwrapped Euler angles.
struct EulerPromp {
  EuclideanPromp inner;
  std::string convention = kEulerConvention;
};

/// Classic ProMP over raw quaternion components; outputs are normalized.
struct UnitNormPromp {
  EuclideanPromp inner;
};

EulerPromp fit_euler(const std::vector<ManifoldDemo>& demos, const BasisConfig& basis,
                     const EuclideanFitOptions& options = {});
UnitNormPromp fit_unitnorm(const std::vector<ManifoldDemo>& demos, const BasisConfig& basis,
                           const EuclideanFitOptions& options = {});

/// Conditions on a target quaternion with isotropic variance in the model's
/// own coordinates (radians^2 for Euler, squared components for unit-norm).
EulerPromp condition(const EulerPromp& model, double phase, const Eigen::Vector4d& target, double variance);
UnitNormPromp condition(const UnitNormPromp& model, double phase, const Eigen::Vector4d& target, double variance);
EulerPromp condition(const EulerPromp& model, double phase, const Eigen::Vector4d& target, const Eigen::Matrix3d& cov);

/// Jacobian of the yaw-pitch-roll angles with respect to S^3 intrinsic
/// tangent coordinates at q (central differences). Pushes a via-point
/// covariance given at q on S^3 into the Euler chart.
Eigen::Matrix3d euler_jacobian(const Eigen::Vector4d& q);

/// Marginal mean paths as sign-continuous unit quaternions.
std::vector<Point> mean_path(const EulerPromp& model, const Eigen::VectorXd& phases);
std::vector<Point> mean_path(const UnitNormPromp& model, const Eigen::VectorXd& phases);
std::vector<Point> mean_path(const OrientationPromp& model, const Eigen::VectorXd& phases);

/// Norms of the unit-norm model's marginal means before normalization.
Eigen::VectorXd raw_mean_norms(const UnitNormPromp& model, const Eigen::VectorXd& phases);

struct ApproachMetrics {
  std::string approach;
  double jerkiness = 0.0;
  double tracking = 0.0;
  double deviation = 0.0;
};

struct ComparisonOptions {
  OrientationFitOptions riemannian;
  EuclideanFitOptions euclidean;
  int grid = 200;  // evaluation grid
};

struct ComparisonReport {
  std::vector<ApproachMetrics> rows;  // riemannian, euler, unit-norm
  double unitnorm_min_raw_norm = 1.0;
  double via_phase = 0.0;
  double variance = 0.0;
  Eigen::Matrix3d euler_cov;  // variance pushed into the Euler chart
};

/// Trains the Riemannian, Euler and unit-norm models on the same quaternion
/// demonstrations, conditions each on the via-point and scores the adapted
/// mean paths. `variance` is isotropic in S^3 tangent coordinates at the
/// target; the Euler model gets J variance J^T (euler_jacobian) and the
/// unit-norm model variance * I_4.
ComparisonReport compare_approaches(const std::vector<ManifoldDemo>& demos, const BasisConfig& basis, double via_phase,
                                    const Eigen::Vector4d& via_target, double variance,
                                    const ComparisonOptions& options = {});

}  // namespace rpromp
