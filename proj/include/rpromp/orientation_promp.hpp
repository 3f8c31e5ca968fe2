#pragma once

#include "rpromp/euclidean_promp.hpp"
#include "rpromp/mglm.hpp"
#include "rpromp/riemannian_stats.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rpromp {

/// One demonstration on a manifold: sample times and points.
struct ManifoldDemo {
  Eigen::VectorXd times;
  std::vector<Point> points;
};

/// ProMP whose trajectory model is Exp_p(Psi_t w) with every demonstration
/// sharing the tangent space at p.
struct OrientationPromp {
  Manifold manifold = Manifold::sphere(3);
  BasisConfig basis;
  Point base;
  EuclideanGaussian weights;  // over dim * n_basis, dimension-major
  Eigen::MatrixXd noise;      // Sigma_y at p, dim x dim
  double mean_duration = 1.0;
};

struct OrientationFitOptions {
  MglmOptions mglm;
  double reg = kDefaultRegularization;
  int grid = 100;  // common phase grid the demos are resampled onto
  std::optional<double> noise_variance;
  bool parallel = true;
  /// When false, fits that exhaust mglm.max_iter are kept (their reports say
  /// converged = false) instead of raising ConvergenceError.
  bool require_convergence = true;
};

/// Normalizes each quaternion and flips signs so consecutive dot products
/// are nonnegative, with the first element chosen so q_w >= 0.
std::vector<Point> preprocess_quaternions(const std::vector<Eigen::VectorXd>& quats);

/// Geodesic interpolation of a sampled trajectory at the given phases.
std::vector<Point> resample(const Manifold& M, const Eigen::VectorXd& sample_phases, const std::vector<Point>& points,
                            const Eigen::VectorXd& phases);

/// Learns p from a joint (p, W) fit of the first demonstration, then fits
/// every demonstration, the first included, with p held fixed and fits a
/// Gaussian over the stacked weights. `reports` receives the fixed-p fits.
/// Throws ConvergenceError naming the demonstration whose fit ran out of
/// iterations, unless options.require_convergence is false.
OrientationPromp fit_orientation(const Manifold& M, const std::vector<ManifoldDemo>& demos, const BasisConfig& basis,
                                 const OrientationFitOptions& options = {}, std::vector<FitReport>* reports = nullptr);

/// Mean Exp_p(Psi mu_w); covariance Psi Sigma_w Psi^T + Sigma_y transported
/// from p to that mean.
RiemannianGaussian marginal(const OrientationPromp& model, double z);

/// Conditions on a via-point whose covariance is given at the target. The
/// target is mapped to Log_p(y*) and the covariance transported to p.
OrientationPromp condition(const OrientationPromp& model, const ViaPoint& via);

/// Product of the models' marginals at z, weighted by alphas.
ProductResult blend(const std::vector<OrientationPromp>& models, const std::vector<double>& alphas, double z,
                    const ProductOptions& options = {});

/// Draws w ~ N(mu_w, Sigma_w) and maps Exp_p(Psi_z w) over the phases.
std::vector<Point> sample_trajectory(const OrientationPromp& model, const Eigen::VectorXd& phases, std::uint64_t seed);

/// Largest |Psi_z mu_w| over the phases. The tangent-space marginal degrades
/// as this approaches pi.
double max_tangent_norm(const OrientationPromp& model, const Eigen::VectorXd& phases);

// Full pose: R^3 position with a classic ProMP, S^3 orientation with the
// model above, sharing one basis.

struct FullPoseDemo {
  Eigen::VectorXd times;
  Eigen::MatrixXd positions;               // T x 3
  std::vector<Eigen::VectorXd> rotations;  // T quaternions (w, x, y, z)
};

struct FullPosePromp {
  EuclideanPromp position;
  OrientationPromp orientation;
};

struct FullPoseMarginal {
  EuclideanGaussian position;
  RiemannianGaussian orientation;
};

/// Either part may be absent.
struct FullPoseViaPoint {
  std::optional<ViaPoint> position;
  std::optional<ViaPoint> orientation;
};

FullPosePromp fit_fullpose(const std::vector<FullPoseDemo>& demos, const BasisConfig& basis,
                           const EuclideanFitOptions& position_options = {},
                           const OrientationFitOptions& orientation_options = {});
FullPoseMarginal marginal(const FullPosePromp& model, double z);
FullPosePromp condition(const FullPosePromp& model, const FullPoseViaPoint& via);
FullPoseMarginal blend(const std::vector<FullPosePromp>& models, const std::vector<double>& alphas, double z,
                       const ProductOptions& options = {});

/// Phase of time t (measured from the start) for a movement of the given
/// duration, clamped to [0, 1].
double phase_at_time(double t, double duration);

}  // namespace rpromp
