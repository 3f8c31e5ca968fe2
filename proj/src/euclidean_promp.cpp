#include "rpromp/euclidean_promp.hpp"

#include "rpromp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rpromp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd fit_weights_ridge(const MatrixXd& traj, const VectorXd& phases, const BasisConfig& basis, double ridge) {
  if (ridge < 0.0) throw std::invalid_argument("fit_weights_ridge: ridge must be nonnegative");
  if (traj.rows() != phases.size()) throw std::invalid_argument("fit_weights_ridge: sample count differs from phase count");
  const int d = static_cast<int>(traj.cols());
  const int n = basis.n_basis;
  // Psi is block diagonal, so the normal equations split per output dimension.
  const MatrixXd P = phi_matrix(basis, phases);
  MatrixXd gram = P.transpose() * P;
  gram.diagonal().array() += ridge;
  Eigen::LDLT<MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14)) {
    throw NumericalError("fit_weights_ridge: normal equations are singular; use a positive ridge");
  }
  const MatrixXd W = ldlt.solve(P.transpose() * traj);  // N x d
  VectorXd w(d * n);
  for (int j = 0; j < d; ++j) w.segment(j * n, n) = W.col(j);
  return w;
}

EuclideanPromp fit_euclidean(const std::vector<EuclideanDemo>& demos, const BasisConfig& basis,
                             const EuclideanFitOptions& options) {
  basis.validate();
  if (demos.size() < 2) throw std::invalid_argument("fit_euclidean: need at least two demonstrations");
  const int d = static_cast<int>(demos.front().values.cols());
  if (d < 1) throw std::invalid_argument("fit_euclidean: demonstrations have no columns");
  std::vector<VectorXd> weights;
  double sq = 0.0;
  double count = 0.0;
  double duration = 0.0;
  for (const auto& demo : demos) {
    if (demo.values.cols() != d) throw std::invalid_argument("fit_euclidean: demonstrations differ in dimension");
    const VectorXd z = phase_from_times(demo.times);
    VectorXd w = fit_weights_ridge(demo.values, z, basis, options.ridge);
    const MatrixXd recon = phi_matrix(basis, z) * unstack_weights(w, d).transpose();
    sq += (recon - demo.values).squaredNorm();
    count += static_cast<double>(demo.values.size());
    duration += demo.times(demo.times.size() - 1) - demo.times(0);
    weights.push_back(std::move(w));
  }
  EuclideanPromp model;
  model.basis = basis;
  model.dim = d;
  model.weights = fit_gaussian_mle(weights, options.reg);
  const double var = options.noise_variance ? *options.noise_variance : std::max(sq / count, 1e-8);
  model.noise = var * MatrixXd::Identity(d, d);
  model.mean_duration = duration / static_cast<double>(demos.size());
  return model;
}

EuclideanGaussian marginal(const EuclideanPromp& model, double z) {
  const MatrixXd psi = psi_matrix(model.basis, z, model.dim);
  MatrixXd cov = psi * model.weights.cov * psi.transpose() + model.noise;
  return {psi * model.weights.mean, 0.5 * (cov + cov.transpose())};
}

EuclideanGaussian condition_gaussian(const EuclideanGaussian& prior, const MatrixXd& H, const VectorXd& y,
                                     const MatrixXd& R) {
  if (H.cols() != prior.mean.size() || H.rows() != y.size() || R.rows() != y.size() || R.cols() != y.size()) {
    throw std::invalid_argument("condition: observation dimensions do not match");
  }
  const MatrixXd SHt = prior.cov * H.transpose();
  const MatrixXd innovation = R + H * SHt;
  Eigen::LLT<MatrixXd> llt(0.5 * (innovation + innovation.transpose()));
  if (llt.info() != Eigen::Success) throw NumericalError("condition: innovation covariance is not positive definite");
  const MatrixXd K = llt.solve(SHt.transpose()).transpose();
  EuclideanGaussian post;
  post.mean = prior.mean + K * (y - H * prior.mean);
  // Joseph form keeps the update symmetric PSD
  const MatrixXd IKH = MatrixXd::Identity(prior.cov.rows(), prior.cov.cols()) - K * H;
  MatrixXd cov = IKH * prior.cov * IKH.transpose() + K * R * K.transpose();
  post.cov = 0.5 * (cov + cov.transpose());
  return post;
}

EuclideanPromp condition(const EuclideanPromp& model, const ViaPoint& via) {
  if (via.phase < 0.0 || via.phase > 1.0) throw std::invalid_argument("condition: via-point phase outside [0, 1]");
  if (via.target.size() != model.dim) throw std::invalid_argument("condition: via-point target has wrong dimension");
  EuclideanPromp out = model;
  out.weights = condition_gaussian(model.weights, psi_matrix(model.basis, via.phase, model.dim), via.target, via.cov);
  return out;
}

EuclideanGaussian gaussian_product_closed_form(const std::vector<EuclideanGaussian>& members,
                                               const std::vector<double>& alphas) {
  if (members.empty() || members.size() != alphas.size()) {
    throw std::invalid_argument("blend: need one weight per member");
  }
  const Eigen::Index d = members.front().mean.size();
  MatrixXd info = MatrixXd::Zero(d, d);
  VectorXd rhs = VectorXd::Zero(d);
  double total = 0.0;
  for (std::size_t s = 0; s < members.size(); ++s) {
    if (alphas[s] < 0.0) throw std::invalid_argument("blend: weights must be nonnegative");
    if (alphas[s] == 0.0) continue;
    if (members[s].mean.size() != d) throw std::invalid_argument("blend: members differ in dimension");
    const MatrixXd prec = spd_inverse(members[s].cov, "blend");
    info += alphas[s] * prec;
    rhs += alphas[s] * prec * members[s].mean;
    total += alphas[s];
  }
  if (!(total > 0.0)) throw std::invalid_argument("blend: all weights are zero");
  const MatrixXd cov = spd_inverse(info, "blend");
  return {cov * rhs, cov};
}

EuclideanGaussian blend(const std::vector<EuclideanPromp>& models, const std::vector<double>& alphas, double z) {
  std::vector<EuclideanGaussian> marginals;
  marginals.reserve(models.size());
  for (const auto& m : models) marginals.push_back(marginal(m, z));
  return gaussian_product_closed_form(marginals, alphas);
}

TaskAffineMap fit_task_affine(const std::vector<VectorXd>& weights, const std::vector<VectorXd>& states, double ridge) {
  if (weights.size() != states.size() || weights.empty()) {
    throw std::invalid_argument("fit_task_affine: need one state per weight vector");
  }
  const Eigen::Index k = states.front().size();
  const Eigen::Index D = weights.front().size();
  const Eigen::Index n = static_cast<Eigen::Index>(weights.size());
  if (n < k + 1) throw std::invalid_argument("fit_task_affine: need at least dim(s) + 1 training pairs");
  MatrixXd S(n, k), W(n, D);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (states[i].size() != k || weights[i].size() != D) throw std::invalid_argument("fit_task_affine: ragged input");
    S.row(i) = states[i].transpose();
    W.row(i) = weights[i].transpose();
  }
  const VectorXd s_mean = S.colwise().mean().transpose();
  const VectorXd w_mean = W.colwise().mean().transpose();
  const MatrixXd Sc = S.rowwise() - s_mean.transpose();
  const MatrixXd Wc = W.rowwise() - w_mean.transpose();
  MatrixXd Ot;  // k x D
  if (ridge > 0.0) {
    MatrixXd gram = Sc.transpose() * Sc;
    gram.diagonal().array() += ridge;
    Ot = gram.ldlt().solve(Sc.transpose() * Wc);
  } else {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(Sc);
    if (qr.rank() < k) {
      throw NumericalError("fit_task_affine: task parameters are rank deficient; pass a positive ridge");
    }
    Ot = qr.solve(Wc);
  }
  TaskAffineMap map;
  map.O = Ot.transpose();
  map.o = w_mean - map.O * s_mean;
  return map;
}

}  // namespace rpromp
