#include "rpromp/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace rpromp {

BasisConfig BasisConfig::uniform(int n, double width) {
  if (n < 1) throw std::invalid_argument("basis needs at least one function");
  BasisConfig b;
  b.n_basis = n;
  b.width = width;
  b.centers = n == 1 ? Eigen::VectorXd(Eigen::VectorXd::Constant(1, 0.5)) : Eigen::VectorXd(Eigen::VectorXd::LinSpaced(n, 0.0, 1.0));
  b.validate();
  return b;
}

void BasisConfig::validate() const {
  if (n_basis < 1) throw std::invalid_argument("basis: n_basis must be positive");
  if (!(width > 0.0) || !std::isfinite(width)) throw std::invalid_argument("basis: width must be positive");
  if (centers.size() != n_basis) throw std::invalid_argument("basis: center count differs from n_basis");
  for (Eigen::Index i = 1; i < centers.size(); ++i) {
    if (!(centers(i) > centers(i - 1))) throw std::invalid_argument("basis: centers must be strictly increasing");
  }
}

Eigen::VectorXd phase_from_times(const Eigen::VectorXd& times) {
  if (times.size() < 2) throw std::invalid_argument("phase_from_times: need at least two samples");
  for (Eigen::Index i = 1; i < times.size(); ++i) {
    if (times(i) < times(i - 1)) throw std::invalid_argument("phase_from_times: times must be nondecreasing");
  }
  const double t0 = times(0);
  const double duration = times(times.size() - 1) - t0;
  if (!(duration > 0.0)) throw std::invalid_argument("phase_from_times: zero duration");
  Eigen::VectorXd z = (times.array() - t0) / duration;
  z(z.size() - 1) = 1.0;
  return z;
}

Eigen::VectorXd uniform_phases(int count) {
  if (count < 2) throw std::invalid_argument("uniform_phases: need at least two samples");
  return Eigen::VectorXd::LinSpaced(count, 0.0, 1.0);
}

Eigen::VectorXd phi(const BasisConfig& basis, double z) {
  // shift exponents by their max so the normalizer never underflows for tiny widths
  Eigen::ArrayXd e = -(z - basis.centers.array()).square() / (2.0 * basis.width);
  e = (e - e.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

Eigen::MatrixXd phi_matrix(const BasisConfig& basis, const Eigen::VectorXd& phases) {
  Eigen::MatrixXd P(phases.size(), basis.n_basis);
  for (Eigen::Index t = 0; t < phases.size(); ++t) P.row(t) = phi(basis, phases(t)).transpose();
  return P;
}

Eigen::MatrixXd psi_matrix(const BasisConfig& basis, double z, int d) {
  if (d < 1) throw std::invalid_argument("psi_matrix: output dimension must be positive");
  const Eigen::VectorXd f = phi(basis, z);
  const int n = basis.n_basis;
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(d, d * n);
  for (int j = 0; j < d; ++j) psi.block(j, j * n, 1, n) = f.transpose();
  return psi;
}

Eigen::MatrixXd regression_matrix(const BasisConfig& basis, const Eigen::VectorXd& phases, int d) {
  const int n = basis.n_basis;
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(d * phases.size(), d * n);
  for (Eigen::Index t = 0; t < phases.size(); ++t) {
    const Eigen::VectorXd f = phi(basis, phases(t));
    for (int j = 0; j < d; ++j) psi.block(t * d + j, j * n, 1, n) = f.transpose();
  }
  return psi;
}

Eigen::VectorXd stack_weights(const Eigen::MatrixXd& W) {
  Eigen::VectorXd w(W.size());
  for (Eigen::Index j = 0; j < W.rows(); ++j) w.segment(j * W.cols(), W.cols()) = W.row(j).transpose();
  return w;
}

Eigen::MatrixXd unstack_weights(const Eigen::VectorXd& w, int d) {
  if (d < 1 || w.size() % d != 0) throw std::invalid_argument("unstack_weights: size not divisible by dimension");
  const Eigen::Index n = w.size() / d;
  Eigen::MatrixXd W(d, n);
  for (int j = 0; j < d; ++j) W.row(j) = w.segment(j * n, n).transpose();
  return W;
}

}  // namespace rpromp
