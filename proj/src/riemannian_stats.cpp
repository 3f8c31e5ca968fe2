#include "rpromp/riemannian_stats.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rpromp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd spd_inverse(const MatrixXd& A, const char* what) {
  Eigen::LLT<MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": matrix is not positive definite");
  }
  MatrixXd inv = llt.solve(MatrixXd::Identity(A.rows(), A.cols()));
  if (!inv.allFinite()) throw NumericalError(std::string(what) + ": inverse is not finite");
  return 0.5 * (inv + inv.transpose());
}

double riemannian_density(const Manifold& M, const RiemannianGaussian& g, const Point& x) {
  const VectorXd v = M.log(g.mean, x);
  Eigen::LLT<MatrixXd> llt(g.cov);
  if (llt.info() != Eigen::Success) throw NumericalError("riemannian_density: covariance is not positive definite");
  const double maha = v.dot(llt.solve(v));
  const MatrixXd L = llt.matrixL();
  const double log_det = 2.0 * L.diagonal().array().log().sum();
  const int d = M.dim();
  return std::exp(-0.5 * maha - 0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det));
}

EuclideanGaussian fit_gaussian_mle(const std::vector<VectorXd>& samples, double reg) {
  if (samples.size() < 2) throw std::invalid_argument("fit_gaussian_mle: need at least two samples");
  if (reg < 0.0) throw std::invalid_argument("fit_gaussian_mle: regularization must be nonnegative");
  const Eigen::Index d = samples.front().size();
  VectorXd mean = VectorXd::Zero(d);
  for (const auto& s : samples) {
    if (s.size() != d) throw std::invalid_argument("fit_gaussian_mle: samples differ in dimension");
    mean += s;
  }
  mean /= static_cast<double>(samples.size());
  MatrixXd cov = MatrixXd::Zero(d, d);
  for (const auto& s : samples) {
    const VectorXd c = s - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(samples.size());
  cov.diagonal().array() += reg;
  return {mean, 0.5 * (cov + cov.transpose())};
}

ProductResult gaussian_product(const Manifold& M, const std::vector<RiemannianGaussian>& members,
                               const std::vector<double>& weights, const ProductOptions& options) {
  if (members.empty()) throw std::invalid_argument("gaussian_product: no members");
  if (members.size() != weights.size()) throw std::invalid_argument("gaussian_product: weight count mismatch");
  double total = 0.0;
  std::size_t dominant = 0;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    if (weights[s] < 0.0 || !std::isfinite(weights[s])) {
      throw std::invalid_argument("gaussian_product: weights must be finite and nonnegative");
    }
    total += weights[s];
    if (weights[s] > weights[dominant]) dominant = s;
  }
  if (!(total > 0.0)) throw std::invalid_argument("gaussian_product: all weights are zero");

  std::vector<std::size_t> active;
  std::vector<MatrixXd> precisions;
  for (std::size_t s = 0; s < members.size(); ++s) {
    if (weights[s] == 0.0) continue;
    M.check_point(members[s].mean, 1e-6);
    active.push_back(s);
    precisions.push_back(spd_inverse(members[s].cov, "gaussian_product"));
  }

  Point mu = options.init ? *options.init : members[dominant].mean;
  const int dim = M.dim();

  auto accumulate = [&](const Point& at, MatrixXd& info, VectorXd* rhs) {
    info.setZero(dim, dim);
    if (rhs) rhs->setZero(dim);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const std::size_t s = active[k];
      const MatrixXd T = M.transport_matrix(members[s].mean, at);
      MatrixXd lambda = T * precisions[k] * T.transpose();
      lambda = 0.5 * (lambda + lambda.transpose());
      info += weights[s] * lambda;
      if (rhs) *rhs += weights[s] * lambda * M.log(at, members[s].mean);
    }
  };

  MatrixXd info;
  VectorXd rhs;
  for (int it = 1; it <= options.max_iter; ++it) {
    accumulate(mu, info, &rhs);
    Eigen::LLT<MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) throw NumericalError("gaussian_product: combined precision is not PD");
    const VectorXd delta = llt.solve(rhs);
    mu = M.exp(mu, delta);
    if (delta.norm() < options.tol) {
      accumulate(mu, info, nullptr);
      return {{mu, spd_inverse(info, "gaussian_product")}, it};
    }
  }
  accumulate(mu, info, nullptr);
  throw ProductNotConverged({mu, spd_inverse(info, "gaussian_product")}, options.max_iter);
}

}  // namespace rpromp
