#include "rpromp/orientation_promp.hpp"

#include "rpromp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>
#include <string>

namespace rpromp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<Point> preprocess_quaternions(const std::vector<VectorXd>& quats) {
  std::vector<Point> out;
  out.reserve(quats.size());
  for (const auto& q : quats) {
    if (q.size() != 4) throw std::invalid_argument("preprocess_quaternions: expected 4 components");
    const double n = q.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("preprocess_quaternions: zero-norm quaternion");
    Point u = q / n;
    if (out.empty() ? u(0) < 0.0 : u.dot(out.back()) < 0.0) u = -u;
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Point> resample(const Manifold& M, const VectorXd& sample_phases, const std::vector<Point>& points,
                            const VectorXd& phases) {
  if (points.size() != static_cast<std::size_t>(sample_phases.size()) || points.size() < 2) {
    throw std::invalid_argument("resample: need at least two samples with matching phases");
  }
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(phases.size()));
  const Eigen::Index last = sample_phases.size() - 1;
  Eigen::Index i = 0;
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    const double z = std::clamp(phases(k), sample_phases(0), sample_phases(last));
    while (i < last - 1 && sample_phases(i + 1) <= z) ++i;
    const double z0 = sample_phases(i);
    const double z1 = sample_phases(i + 1);
    const auto si = static_cast<std::size_t>(i);
    if (z == z0 || !(z1 > z0)) {
      out.push_back(z == z1 ? points[si + 1] : points[si]);
    } else if (z == z1) {
      out.push_back(points[si + 1]);
    } else {
      const double s = (z - z0) / (z1 - z0);
      out.push_back(M.exp(points[si], s * M.log(points[si], points[si + 1])));
    }
  }
  return out;
}

OrientationPromp fit_orientation(const Manifold& M, const std::vector<ManifoldDemo>& demos, const BasisConfig& basis,
                                 const OrientationFitOptions& options, std::vector<FitReport>* reports) {
  basis.validate();
  if (demos.size() < 2) throw std::invalid_argument("fit_orientation: need at least two demonstrations");
  const bool quaternions = M == Manifold::sphere(3);
  const VectorXd grid = uniform_phases(options.grid);

  std::vector<std::vector<Point>> trajs;
  double duration = 0.0;
  for (std::size_t n = 0; n < demos.size(); ++n) {
    const auto& demo = demos[n];
    if (demo.points.size() != static_cast<std::size_t>(demo.times.size())) {
      throw std::invalid_argument("fit_orientation: demo " + std::to_string(n) + " has mismatched times and points");
    }
    std::vector<Point> pts;
    if (quaternions) {
      pts = preprocess_quaternions(demo.points);
    } else {
      for (const auto& x : demo.points) pts.push_back(M.project(x));
    }
    trajs.push_back(resample(M, phase_from_times(demo.times), pts, grid));
    duration += demo.times(demo.times.size() - 1) - demo.times(0);
  }

  auto check = [&](const MglmFit& fit, std::size_t n) {
    if (options.require_convergence && !fit.report.converged) {
      throw ConvergenceError("geodesic regression did not converge on demonstration " + std::to_string(n) +
                             " (error " + std::to_string(fit.report.final_error) + ")");
    }
  };

  const MglmFit joint = fit_mglm(M, trajs[0], grid, basis, options.mglm);
  check(joint, 0);
  // every demo, the first included, gets its weights from the same fixed-p fit
  MglmOptions fixed = options.mglm;
  fixed.fixed_base = joint.model.base;
  std::vector<MglmFit> fits;
  if (options.parallel) {
    std::vector<std::future<MglmFit>> pending;
    for (std::size_t n = 0; n < trajs.size(); ++n) {
      pending.push_back(std::async(std::launch::async, [&, n] { return fit_mglm(M, trajs[n], grid, basis, fixed); }));
    }
    for (auto& f : pending) fits.push_back(f.get());
  } else {
    for (std::size_t n = 0; n < trajs.size(); ++n) fits.push_back(fit_mglm(M, trajs[n], grid, basis, fixed));
  }

  std::vector<VectorXd> weights;
  double sq = 0.0;
  for (std::size_t n = 0; n < fits.size(); ++n) {
    check(fits[n], n);
    weights.push_back(stack_weights(fits[n].model.weights));
    sq += 2.0 * fits[n].report.final_error;
  }
  if (reports) {
    reports->clear();
    for (const auto& f : fits) reports->push_back(f.report);
  }

  OrientationPromp model;
  model.manifold = M;
  model.basis = basis;
  model.base = joint.model.base;
  model.weights = fit_gaussian_mle(weights, options.reg);
  const double count = static_cast<double>(demos.size()) * options.grid * M.dim();
  const double var = options.noise_variance ? *options.noise_variance : std::max(sq / count, 1e-8);
  model.noise = var * MatrixXd::Identity(M.dim(), M.dim());
  model.mean_duration = duration / static_cast<double>(demos.size());
  return model;
}

RiemannianGaussian marginal(const OrientationPromp& model, double z) {
  const int d = model.manifold.dim();
  const MatrixXd psi = psi_matrix(model.basis, z, d);
  const Point mean = model.manifold.exp(model.base, psi * model.weights.mean);
  MatrixXd cov = psi * model.weights.cov * psi.transpose() + model.noise;
  cov = 0.5 * (cov + cov.transpose());
  return {mean, model.manifold.transport_spd(model.base, mean, cov)};
}

OrientationPromp condition(const OrientationPromp& model, const ViaPoint& via) {
  if (via.phase < 0.0 || via.phase > 1.0) throw std::invalid_argument("condition: via-point phase outside [0, 1]");
  const Manifold& M = model.manifold;
  M.check_point(via.target, 1e-6);
  const Point target = M.project(via.target);
  const VectorXd y = M.log(model.base, target);
  const MatrixXd cov = M.transport_spd(target, model.base, via.cov);
  OrientationPromp out = model;
  out.weights = condition_gaussian(model.weights, psi_matrix(model.basis, via.phase, M.dim()), y, cov);
  return out;
}

ProductResult blend(const std::vector<OrientationPromp>& models, const std::vector<double>& alphas, double z,
                    const ProductOptions& options) {
  if (models.empty()) throw std::invalid_argument("blend: no models");
  if (models.size() != alphas.size()) throw std::invalid_argument("blend: need one weight per model");
  std::vector<RiemannianGaussian> marginals;
  for (const auto& m : models) {
    if (!(m.manifold == models.front().manifold)) throw std::invalid_argument("blend: models live on different manifolds");
    marginals.push_back(marginal(m, z));
  }
  return gaussian_product(models.front().manifold, marginals, alphas, options);
}

std::vector<Point> sample_trajectory(const OrientationPromp& model, const VectorXd& phases, std::uint64_t seed) {
  const MatrixXd& S = model.weights.cov;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()));
  const MatrixXd root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd e(S.rows());
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = normal(rng);
  const VectorXd w = model.weights.mean + root * e;
  const MatrixXd W = unstack_weights(w, model.manifold.dim());
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(phases.size()));
  for (Eigen::Index t = 0; t < phases.size(); ++t) {
    out.push_back(model.manifold.exp(model.base, W * phi(model.basis, phases(t))));
  }
  return out;
}

double max_tangent_norm(const OrientationPromp& model, const VectorXd& phases) {
  const MatrixXd W = unstack_weights(model.weights.mean, model.manifold.dim());
  double best = 0.0;
  for (Eigen::Index t = 0; t < phases.size(); ++t) best = std::max(best, (W * phi(model.basis, phases(t))).norm());
  return best;
}

FullPosePromp fit_fullpose(const std::vector<FullPoseDemo>& demos, const BasisConfig& basis,
                           const EuclideanFitOptions& position_options,
                           const OrientationFitOptions& orientation_options) {
  std::vector<EuclideanDemo> pos;
  std::vector<ManifoldDemo> rot;
  for (const auto& d : demos) {
    if (d.positions.cols() != 3) throw std::invalid_argument("fit_fullpose: positions must have three columns");
    pos.push_back({d.times, d.positions});
    rot.push_back({d.times, d.rotations});
  }
  return {fit_euclidean(pos, basis, position_options), fit_orientation(Manifold::sphere(3), rot, basis, orientation_options)};
}

FullPoseMarginal marginal(const FullPosePromp& model, double z) {
  return {marginal(model.position, z), marginal(model.orientation, z)};
}

FullPosePromp condition(const FullPosePromp& model, const FullPoseViaPoint& via) {
  FullPosePromp out = model;
  if (via.position) out.position = condition(model.position, *via.position);
  if (via.orientation) out.orientation = condition(model.orientation, *via.orientation);
  return out;
}

FullPoseMarginal blend(const std::vector<FullPosePromp>& models, const std::vector<double>& alphas, double z,
                       const ProductOptions& options) {
  std::vector<EuclideanPromp> pos;
  std::vector<OrientationPromp> rot;
  for (const auto& m : models) {
    pos.push_back(m.position);
    rot.push_back(m.orientation);
  }
  return {blend(pos, alphas, z), blend(rot, alphas, z, options).gaussian};
}

double phase_at_time(double t, double duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("phase_at_time: duration must be positive");
  return std::clamp(t / duration, 0.0, 1.0);
}

}  // namespace rpromp
