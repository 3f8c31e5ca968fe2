#pragma once

#include <Eigen/Dense>

namespace rpromp {

/// Normalized Gaussian basis b_m(z) = exp(-(z - c_m)^2 / (2 h)).
struct BasisConfig {
  int n_basis = 0;
  double width = 0.0;
  Eigen::VectorXd centers;

  /// n centers uniformly spaced on [0, 1], endpoints included.
  static BasisConfig uniform(int n, double width);

  /// Throws std::invalid_argument on non-positive width, wrong center count
  /// or non-increasing centers.
  void validate() const;

  bool operator==(const BasisConfig& o) const {
    return n_basis == o.n_basis && width == o.width && centers == o.centers;
  }
};

/// z_t = (t_t - t_1) / (t_T - t_1). Requires >= 2 nondecreasing samples with
/// positive duration.
Eigen::VectorXd phase_from_times(const Eigen::VectorXd& times);

/// T phases uniformly spaced on [0, 1].
Eigen::VectorXd uniform_phases(int count);

/// Normalized basis activations at phase z; components sum to one.
Eigen::VectorXd phi(const BasisConfig& basis, double z);

/// T x N matrix whose row t is phi(z_t)^T.
Eigen::MatrixXd phi_matrix(const BasisConfig& basis, const Eigen::VectorXd& phases);

/// d x dN block-diagonal matrix diag(phi^T, ..., phi^T).
///
/// Weight vectors follow the matching dimension-major layout
/// w = [w^(1); ...; w^(d)] with each block of length N.
Eigen::MatrixXd psi_matrix(const BasisConfig& basis, double z, int d);

/// Stacks psi_matrix over a phase grid: (dT x dN), rows ordered by time then
/// by output dimension.
Eigen::MatrixXd regression_matrix(const BasisConfig& basis, const Eigen::VectorXd& phases, int d);

/// Flattens a d x N weight matrix (row j = basis weights of dimension j) into
/// the dimension-major weight vector, and back.
Eigen::VectorXd stack_weights(const Eigen::MatrixXd& W);
Eigen::MatrixXd unstack_weights(const Eigen::VectorXd& w, int d);

}  // namespace rpromp
