#pragma once

#include "rpromp/basis.hpp"
#include "rpromp/manifold.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rpromp {

/// Geodesic basis-function model y(z) = Exp_p(W phi(z)).
///
/// Column m of `weights` is the tangent vector w_m at `base`, in intrinsic
/// coordinates of tangent_basis(base).
struct GeodesicModel {
  Point base;
  Eigen::MatrixXd weights;  // dim x n_basis
  BasisConfig basis;

  Point predict(const Manifold& M, double z) const { return M.exp(base, weights * phi(basis, z)); }
};

struct MglmOptions {
  std::optional<Point> fixed_base;  // hold p constant and fit W only
  double eta0 = 0.005;
  double eta_max = 0.03;
  double tol = 1e-10;  // relative error decrease over `window` accepted steps
  int window = 5;
  double eta_min = 1e-12;
  int max_iter = 2000;
};

struct FitReport {
  double final_error = 0.0;
  int iterations = 0;
  int accepted = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> step_sizes;     // eta used by every proposal
  std::vector<double> error_history;  // initial error, then one entry per accepted step
};

struct MglmFit {
  GeodesicModel model;
  FitReport report;
};

/// E = 1/2 sum_t |Gamma_{yhat_t -> p}(Log_{yhat_t}(y_t))|^2.
double reconstruction_error(const Manifold& M, const GeodesicModel& model, const std::vector<Point>& traj,
                            const Eigen::VectorXd& phases);

struct MglmGradients {
  Tangent base;           // at p
  Eigen::MatrixXd weights;  // same shape as W
};

/// Transport-approximated gradients: with r_t the residual Log_{yhat_t}(y_t)
/// carried to p, grad_p = -sum_t r_t and column m of grad_W is
/// -sum_t phi_m(z_t) r_t.
MglmGradients gradients(const Manifold& M, const GeodesicModel& model, const std::vector<Point>& traj,
                        const Eigen::VectorXd& phases);

/// Riemannian gradient descent with the adaptive step rule: a proposal is
/// accepted only if it lowers E, after which eta = min(2 eta, eta_max);
/// otherwise eta is halved.
///
/// Starts from p = traj[0] (or options.fixed_base) and W = 0. Stops when the
/// relative decrease over the last `window` accepted steps is below `tol`,
/// when eta falls below `eta_min`, or after `max_iter` proposals
/// (converged = false).
MglmFit fit_mglm(const Manifold& M, const std::vector<Point>& traj, const Eigen::VectorXd& phases,
                 const BasisConfig& basis, const MglmOptions& options = {});

}  // namespace rpromp
