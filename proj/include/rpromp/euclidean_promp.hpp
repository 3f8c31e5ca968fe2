#pragma once

#include "rpromp/basis.hpp"
#include "rpromp/riemannian_stats.hpp"

#include <optional>
#include <vector>

namespace rpromp {

/// One demonstration: sample times and a T x d matrix of samples.
struct EuclideanDemo {
  Eigen::VectorXd times;
  Eigen::MatrixXd values;
};

struct EuclideanPromp {
  BasisConfig basis;
  int dim = 0;
  EuclideanGaussian weights;  // over the dN dimension-major weight vector
  Eigen::MatrixXd noise;      // Sigma_y, d x d
  double mean_duration = 1.0;
};

struct EuclideanFitOptions {
  double ridge = 1e-6;
  double reg = kDefaultRegularization;
  std::optional<double> noise_variance;  // overrides the residual estimate
};

/// Desired value at a phase, with observation covariance.
struct ViaPoint {
  double phase = 0.0;
  Eigen::VectorXd target;
  Eigen::MatrixXd cov;
};

/// w = (Psi^T Psi + ridge I)^{-1} Psi^T Y for one trajectory.
Eigen::VectorXd fit_weights_ridge(const Eigen::MatrixXd& traj, const Eigen::VectorXd& phases,
                                  const BasisConfig& basis, double ridge);

/// Ridge weights per demo, then a regularized ML Gaussian over them.
/// Sigma_y is isotropic, set from the mean squared ridge residual (floor 1e-8).
EuclideanPromp fit_euclidean(const std::vector<EuclideanDemo>& demos, const BasisConfig& basis,
                             const EuclideanFitOptions& options = {});

/// N(Psi_z mu_w, Psi_z Sigma_w Psi_z^T + Sigma_y).
EuclideanGaussian marginal(const EuclideanPromp& model, double z);

/// Gaussian conditioning of N(mu, S) on an observation y ~ N(H w, R).
EuclideanGaussian condition_gaussian(const EuclideanGaussian& prior, const Eigen::MatrixXd& H,
                                     const Eigen::VectorXd& y, const Eigen::MatrixXd& R);

EuclideanPromp condition(const EuclideanPromp& model, const ViaPoint& via);

/// Precision-weighted product of Gaussians with weights alpha (closed form).
EuclideanGaussian gaussian_product_closed_form(const std::vector<EuclideanGaussian>& members,
                                               const std::vector<double>& alphas);

/// Blend of the models' marginals at phase z.
EuclideanGaussian blend(const std::vector<EuclideanPromp>& models, const std::vector<double>& alphas, double z);

/// Affine map from task parameters to mean weights, mu_w = O s + o.
struct TaskAffineMap {
  Eigen::MatrixXd O;
  Eigen::VectorXd o;

  Eigen::VectorXd predict(const Eigen::VectorXd& s) const { return O * s + o; }
};

/// Least squares fit of w_n ~ O s_n + o. With ridge == 0 a rank-deficient
/// design throws NumericalError; ridge > 0 penalizes O only.
TaskAffineMap fit_task_affine(const std::vector<Eigen::VectorXd>& weights, const std::vector<Eigen::VectorXd>& states,
                              double ridge = 0.0);

}  // namespace rpromp
