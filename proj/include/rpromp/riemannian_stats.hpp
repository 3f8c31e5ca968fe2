#pragma once

#include "rpromp/errors.hpp"
#include "rpromp/manifold.hpp"

#include <optional>
#include <vector>

namespace rpromp {

struct EuclideanGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Gaussian with a manifold mean and a covariance in the intrinsic
/// coordinates of the tangent space at that mean.
struct RiemannianGaussian {
  Point mean;
  Eigen::MatrixXd cov;
};

inline constexpr double kDefaultRegularization = 1e-6;

/// (2 pi)^{-d/2} |S|^{-1/2} exp(-1/2 Log_mu(x)^T S^{-1} Log_mu(x)), with d the
/// intrinsic dimension.
double riemannian_density(const Manifold& M, const RiemannianGaussian& g, const Point& x);

/// Sample mean and biased sample covariance plus reg * I.
EuclideanGaussian fit_gaussian_mle(const std::vector<Eigen::VectorXd>& samples, double reg = kDefaultRegularization);

struct ProductOptions {
  double tol = 1e-9;
  int max_iter = 100;
  std::optional<Point> init;  // default: mean of the member with the largest weight
};

struct ProductResult {
  RiemannianGaussian gaussian;
  int iterations = 0;
};

/// Thrown by gaussian_product() when the mean iteration does not settle.
class ProductNotConverged : public ConvergenceError {
 public:
  ProductNotConverged(RiemannianGaussian last, int iterations)
      : ConvergenceError("Gaussian product did not converge"), last_(std::move(last)), iterations_(iterations) {}
  const RiemannianGaussian& last() const { return last_; }
  int iterations() const { return iterations_; }

 private:
  RiemannianGaussian last_;
  int iterations_;
};

/// Weighted product of Riemannian Gaussians, prod_s N_M(mu_s, S_s)^{alpha_s}.
///
/// The mean is refined by mu <- Exp_mu(Delta) with
/// Delta = (sum a_s L_s)^{-1} sum a_s L_s Log_mu(mu_s), where L_s is the
/// precision of member s transported to the current mean. Members with zero
/// weight are skipped. The returned covariance is (sum a_s L_s)^{-1}
/// evaluated at the final mean.
ProductResult gaussian_product(const Manifold& M, const std::vector<RiemannianGaussian>& members,
                               const std::vector<double>& weights, const ProductOptions& options = {});

/// Symmetric inverse of an SPD matrix; throws NumericalError if it is not PD.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& A, const char* what);

}  // namespace rpromp
