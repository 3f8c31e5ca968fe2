// Acceptance harness: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance 3 6        run selected criteria
//   acceptance --scan     also print the basis-width sensitivity of criterion 3

#include "rpromp/baselines.hpp"
#include "rpromp/errors.hpp"
#include "rpromp/io.hpp"
#include "rpromp/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace rpromp;
using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::vector<std::string> lines;  // detail, printed under the verdict
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ------------------------------------------------------------------ 1

Tangent bounded_tangent(const Manifold& M, const Point& x, std::mt19937_64& rng) {
  Tangent u = M.random_tangent(x, 1.0, rng);
  std::uniform_real_distribution<double> U(0.0, kPi - 0.1);
  int off = 0;
  for (const auto& f : M.factors()) {
    auto seg = u.segment(off, f.dim);
    if (f.kind == FactorKind::Sphere) seg *= U(rng) / seg.norm();
    off += f.dim;
  }
  return u;
}

Outcome manifold_suite() {
  Outcome o;
  o.pass = true;
  for (const char* tag : {"S2", "S3", "R3xS3"}) {
    const Manifold M = Manifold::parse(tag);
    std::mt19937_64 rng(1000);
    double log_exp = 0, dist = 0, inner = 0, eig = 0;
    for (int k = 0; k < 1000; ++k) {
      const Point x = M.random_point(rng);
      const Tangent u = bounded_tangent(M, x, rng);
      const Point y = M.exp(x, u);
      log_exp = std::max(log_exp, (M.log(x, y) - u).norm());
      dist = std::max(dist, std::abs(M.distance(x, y) - M.log(x, y).norm()));
      const Tangent a = M.random_tangent(x, 1.0, rng), b = M.random_tangent(x, 1.0, rng);
      inner = std::max(inner, std::abs(M.transport(x, y, a).dot(M.transport(x, y, b)) - a.dot(b)));
      const MatrixXd A = MatrixXd::Random(M.dim(), M.dim());
      const MatrixXd V = A * A.transpose() + 0.01 * MatrixXd::Identity(M.dim(), M.dim());
      Eigen::SelfAdjointEigenSolver<MatrixXd> e0(V), e1(M.transport_spd(x, y, V));
      eig = std::max(eig, (e0.eigenvalues() - e1.eigenvalues()).cwiseAbs().maxCoeff());
    }
    const bool ok = log_exp <= 1e-9 && dist <= 1e-9 && inner <= 1e-9 && eig <= 1e-8;
    o.pass = o.pass && ok;
    o.lines.push_back(fmt("%-6s log(exp) %.2e  dist-|log| %.2e  <,> %.2e  spd eig %.2e", tag, log_exp, dist, inner, eig));
  }
  return o;
}

// ------------------------------------------------------------------ 2

std::vector<EuclideanDemo> euclidean_demos(int d, unsigned seed, int T) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  const VectorXd t = VectorXd::LinSpaced(T, 0.0, 2.0);
  const VectorXd z = phase_from_times(t);
  std::vector<EuclideanDemo> demos;
  for (int k = 0; k < 4; ++k) {
    MatrixXd Y(T, d);
    for (int j = 0; j < d; ++j) {
      const double a = n(rng), b = n(rng), c = 0.3 * n(rng);
      Y.col(j) = (a * (2.0 * z.array()).sin() + b * z.array().square() + c).matrix();
    }
    demos.push_back({t, Y});
  }
  return demos;
}

std::vector<ManifoldDemo> as_manifold(const std::vector<EuclideanDemo>& demos) {
  std::vector<ManifoldDemo> out;
  for (const auto& d : demos) {
    ManifoldDemo m{d.times, {}};
    for (Eigen::Index t = 0; t < d.values.rows(); ++t) m.points.push_back(d.values.row(t).transpose());
    out.push_back(m);
  }
  return out;
}

OrientationPromp lift(const EuclideanPromp& e) {
  OrientationPromp o;
  o.manifold = Manifold::euclidean(e.dim);
  o.basis = e.basis;
  o.base = VectorXd::Zero(e.dim);
  o.weights = e.weights;
  o.noise = e.noise;
  o.mean_duration = e.mean_duration;
  return o;
}

Outcome euclidean_reduction() {
  Outcome o;
  o.pass = true;
  const int T = 100;
  const BasisConfig basis = BasisConfig::uniform(5, 0.03);
  for (int d : {2, 3}) {
    const auto demos = euclidean_demos(d, 40 + d, T);
    const Manifold M = Manifold::euclidean(d);
    OrientationFitOptions opt;
    opt.grid = T;
    const OrientationPromp riem = fit_orientation(M, as_manifold(demos), basis, opt);

    // weights relative to p, so p + W phi = (W + p 1^T) phi
    const MatrixXd W = unstack_weights(riem.weights.mean, d).colwise() + riem.base;
    VectorXd ls_mean = VectorXd::Zero(d * basis.n_basis);
    for (const auto& demo : demos) ls_mean += fit_weights_ridge(demo.values, phase_from_times(demo.times), basis, 0.0);
    ls_mean /= static_cast<double>(demos.size());
    const double werr = (stack_weights(W) - ls_mean).cwiseAbs().maxCoeff();

    EuclideanFitOptions eo;
    eo.ridge = 0.0;
    const EuclideanPromp eu = fit_euclidean(demos, basis, eo);
    const EuclideanPromp other = fit_euclidean(euclidean_demos(d, 90 + d, T), basis, eo);
    const OrientationPromp a = lift(eu), b = lift(other);
    const VectorXd target = VectorXd::LinSpaced(d, -0.2, 0.3);
    const ViaPoint via{0.37, target, 2e-3 * MatrixXd::Identity(d, d)};
    const EuclideanPromp ec = condition(eu, via);
    const OrientationPromp oc = condition(a, via);
    double marg = 0, cond = 0, bl = 0;
    for (double z : uniform_phases(41)) {
      const auto ge = marginal(eu, z);
      const auto go = marginal(a, z);
      marg = std::max({marg, (ge.mean - go.mean).cwiseAbs().maxCoeff(), (ge.cov - go.cov).cwiseAbs().maxCoeff()});
      const auto ce = marginal(ec, z);
      const auto co = marginal(oc, z);
      cond = std::max({cond, (ce.mean - co.mean).cwiseAbs().maxCoeff(), (ce.cov - co.cov).cwiseAbs().maxCoeff()});
      const std::vector<double> alpha{1.0 - z, z + 0.1};
      const auto be = blend(std::vector<EuclideanPromp>{eu, other}, alpha, z);
      const auto bo = blend(std::vector<OrientationPromp>{a, b}, alpha, z);
      bl = std::max({bl, (be.mean - bo.gaussian.mean).cwiseAbs().maxCoeff(),
                     (be.cov - bo.gaussian.cov).cwiseAbs().maxCoeff()});
    }
    cond = std::max({cond, (ec.weights.mean - oc.weights.mean).cwiseAbs().maxCoeff(),
                     (ec.weights.cov - oc.weights.cov).cwiseAbs().maxCoeff()});
    const bool ok = werr <= 1e-4 && marg <= 1e-8 && cond <= 1e-8 && bl <= 1e-8;
    o.pass = o.pass && ok;
    o.lines.push_back(fmt("R%d  weights vs least squares %.2e  marginal %.2e  condition %.2e  blend %.2e", d, werr, marg,
                          cond, bl));
  }
  return o;
}

// ------------------------------------------------------------------ 3

struct Recovery {
  int hits = 0;
  bool monotone = true;
  double worst = 0.0;
  std::vector<double> errors;
};

Recovery mglm_recovery(double width) {
  const Manifold S3 = Manifold::sphere(3);
  const int N = 5, T = 50;
  Recovery r;
  for (unsigned seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const Point p = S3.random_point(rng);
    MatrixXd W(3, N);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int m = 0; m < N; ++m) {
      W.col(m) = S3.random_tangent(p, 1.0, rng);
      W.col(m) *= 0.4 * U(rng) / W.col(m).norm();
    }
    const BasisConfig b = BasisConfig::uniform(N, width);
    const VectorXd z = uniform_phases(T);
    std::vector<Point> y;
    for (int t = 0; t < T; ++t) y.push_back(S3.exp(p, W * phi(b, z(t))));
    const auto fit = fit_mglm(S3, y, z, b);
    const auto& h = fit.report.error_history;
    for (std::size_t k = 1; k < h.size(); ++k) r.monotone = r.monotone && h[k] <= h[k - 1];
    r.hits += fit.report.final_error <= 1e-6;
    r.worst = std::max(r.worst, fit.report.final_error);
    r.errors.push_back(fit.report.final_error);
  }
  return r;
}

constexpr double kRecoveryWidth = 0.03;

Outcome mglm_self_consistency(bool scan) {
  Outcome o;
  const Recovery r = mglm_recovery(kRecoveryWidth);
  o.pass = r.hits >= 19 && r.monotone;
  o.lines.push_back(fmt("h=%.3g  E<=1e-6 on %d/20 seeds, worst E %.2e, accepted errors monotone on all seeds: %s",
                        kRecoveryWidth, r.hits, r.worst, r.monotone ? "yes" : "no"));
  if (scan) {
    for (double h : {0.01, 0.02, 0.025, 0.03, 0.035, 0.04, 0.05, 0.08}) {
      const Recovery s = mglm_recovery(h);
      o.lines.push_back(fmt("  width scan h=%-6.3g hits %2d/20  worst E %.2e  monotone %s", h, s.hits, s.worst,
                            s.monotone ? "yes" : "no"));
    }
  }
  return o;
}

// ------------------------------------------------------------------ 4

MatrixXd random_spd(int d, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = n(rng);
  return scale * (A * A.transpose() / d + 0.2 * MatrixXd::Identity(d, d));
}

Outcome product_oracle() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.1, 2.0), U01(0.0, 1.0);

  double closed = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 4;
    const int S = 2 + k % 3;
    std::vector<RiemannianGaussian> gs;
    std::vector<EuclideanGaussian> es;
    std::vector<double> alpha;
    for (int s = 0; s < S; ++s) {
      VectorXd m(d);
      for (int i = 0; i < d; ++i) m(i) = n(rng);
      const MatrixXd C = random_spd(d, 0.5, rng);
      gs.push_back({m, C});
      es.push_back({m, C});
      alpha.push_back(U(rng));
    }
    const auto r = gaussian_product(Manifold::euclidean(d), gs, alpha);
    MatrixXd info = MatrixXd::Zero(d, d);
    VectorXd rhs = VectorXd::Zero(d);
    for (int s = 0; s < S; ++s) {
      const MatrixXd P = es[static_cast<std::size_t>(s)].cov.inverse();
      info += alpha[static_cast<std::size_t>(s)] * P;
      rhs += alpha[static_cast<std::size_t>(s)] * P * es[static_cast<std::size_t>(s)].mean;
    }
    const MatrixXd cov = info.inverse();
    closed = std::max({closed, (r.gaussian.mean - cov * rhs).cwiseAbs().maxCoeff(),
                       (r.gaussian.cov - cov).cwiseAbs().maxCoeff()});
  }

  const Manifold S3 = Manifold::sphere(3);
  double single = 0.0;
  for (int k = 0; k < 100; ++k) {
    const RiemannianGaussian g{S3.random_point(rng), random_spd(3, 0.05, rng)};
    const auto r = gaussian_product(S3, {g}, {1.0});
    single = std::max({single, S3.distance(r.gaussian.mean, g.mean), (r.gaussian.cov - g.cov).cwiseAbs().maxCoeff()});
  }

  // blends of trained S3 models along a crossfade, and of random Gaussians within 0.4 rad of a center
  ProductOptions po;
  po.tol = 1e-9;
  std::vector<int> iters;
  OrientationFitOptions fo;
  fo.require_convergence = false;
  SynthOptions so;
  so.seed = 1;
  std::vector<ManifoldDemo> da, db;
  for (const auto& d : synth_reorient(so).demos) da.push_back(orientation_part(d));
  so.seed = 2;
  so.angle_deg = 120.0;
  for (const auto& d : synth_reorient(so).demos) db.push_back(orientation_part(d));
  const BasisConfig basis = BasisConfig::uniform(20, 0.025);
  const OrientationPromp ma = fit_orientation(S3, da, basis, fo);
  const OrientationPromp mb = fit_orientation(S3, db, basis, fo);
  for (double z : uniform_phases(101)) {
    const double s = 1.0 / (1.0 + std::exp(-20.0 * (z - 0.5)));
    iters.push_back(blend({ma, mb}, {1.0 - s, s}, z, po).iterations);
  }
  // unrelated skills, means 1.0 to 1.9 rad apart: reported, not gated
  std::vector<ManifoldDemo> dk;
  for (const auto& d : synth_keyturn(so).demos) dk.push_back(orientation_part(d));
  const OrientationPromp mk = fit_orientation(S3, dk, basis, fo);
  int far_fail = 0, far_max = 0;
  for (double z : uniform_phases(101)) {
    const double s = 1.0 / (1.0 + std::exp(-20.0 * (z - 0.5)));
    try {
      far_max = std::max(far_max, blend({ma, mk}, {1.0 - s, s}, z, po).iterations);
    } catch (const ProductNotConverged&) {
      ++far_fail;
    }
  }
  for (int k = 0; k < 200; ++k) {
    const Point c = S3.random_point(rng);
    std::vector<RiemannianGaussian> gs;
    std::vector<double> alpha;
    for (int s = 0; s < 3; ++s) {
      Tangent u = S3.random_tangent(c, 1.0, rng);
      u *= 0.4 * U01(rng) / u.norm();
      gs.push_back({S3.exp(c, u), random_spd(3, 0.02, rng)});
      alpha.push_back(U(rng));
    }
    iters.push_back(gaussian_product(S3, gs, alpha, po).iterations);
  }
  std::vector<int> sorted = iters;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                          : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  const int worst = sorted.back();
  o.pass = closed <= 1e-10 && single <= 1e-9 && worst <= 50 && median < 10;
  o.lines.push_back(fmt("Euclidean vs closed form %.2e over 200 products; single member %.2e", closed, single));
  o.lines.push_back(fmt("S3 blends (%zu): iterations median %.1f, max %d", iters.size(), median, worst));
  o.lines.push_back(fmt("info, re-orient x key-turn crossfade (101 phases): %d not converged in %d iterations, max %d otherwise",
                        far_fail, po.max_iter, far_max));
  return o;
}

// ------------------------------------------------------------------ 5

Outcome via_point() {
  Outcome o;
  SynthOptions so;
  so.letter = 'S';
  so.demos = 9;
  so.seed = 5;
  const SynthDataset ds = synth_letter(so);
  const std::vector<ManifoldDemo> train(ds.demos.begin(), ds.demos.begin() + 8);
  OrientationFitOptions fo;
  fo.require_convergence = false;
  const OrientationPromp m = fit_orientation(ds.manifold, train, BasisConfig::uniform(60, 0.001), fo);
  const double z = 0.6;
  const auto& held = ds.demos[8];
  const Point y = resample(ds.manifold, phase_from_times(held.times), held.points, VectorXd::Constant(1, z)).front();
  const MatrixXd Sy = 1e-3 * MatrixXd::Identity(2, 2);
  const OrientationPromp c = condition(m, {z, y, Sy});
  const auto prior_g = marginal(m, z);
  const double prior = ds.manifold.distance(prior_g.mean, y);
  const double post = ds.manifold.distance(marginal(c, z).mean, y);
  const OrientationPromp loose = condition(m, {z, y, 1e12 * MatrixXd::Identity(2, 2)});
  const double dm = (loose.weights.mean - m.weights.mean).norm() / m.weights.mean.norm();
  const double dc = (loose.weights.cov - m.weights.cov).norm() / m.weights.cov.norm();
  o.pass = post < 1e-2 && dm <= 1e-6 && dc <= 1e-6;
  o.lines.push_back(fmt("letter S, 8 demos + held-out 9th, N=60 h=0.001, z*=%.2f: distance to y* %.3e -> %.3e", z,
                        prior, post));
  o.lines.push_back(fmt("uninformative via-point: relative change of mean %.2e, covariance %.2e", dm, dc));
  // one Gaussian update leaves Sy (P + Sy)^-1 of the prior offset
  const Eigen::SelfAdjointEigenSolver<MatrixXd> pe(prior_g.cov);
  const MatrixXd keep = Sy * (prior_g.cov + Sy).inverse();
  const double left = (keep * ds.manifold.log(prior_g.mean, y)).norm();
  o.lines.push_back(fmt("predictive variance at z*: %.2e, %.2e; linear residual estimate %.3e", pe.eigenvalues()(0),
                        pe.eigenvalues()(1), left));
  return o;
}

// ------------------------------------------------------------------ 6

Outcome comparison() {
  Outcome o;
  SynthOptions so;
  so.seed = 1;
  so.demos = 5;
  const SynthDataset ds = synth_reorient(so);
  std::vector<ManifoldDemo> demos;
  for (int n = 0; n < 4; ++n) demos.push_back(orientation_part(ds.demos[static_cast<std::size_t>(n)]));
  const ManifoldDemo held = orientation_part(ds.demos[4]);
  const double z = 0.85;
  const Manifold S3 = Manifold::sphere(3);
  const Point target = resample(S3, phase_from_times(held.times), preprocess_quaternions(held.points),
                                VectorXd::Constant(1, z))
                           .front();
  ComparisonOptions co;
  co.riemannian.require_convergence = false;
  const ComparisonReport rep = compare_approaches(demos, BasisConfig::uniform(40, 0.02), z, target, 1e-3, co);
  const auto& R = rep.rows;
  auto best = [&](auto field) { return R[0].*field < std::min(R[1].*field, R[2].*field); };
  const bool jerk = best(&ApproachMetrics::jerkiness);
  const bool track = best(&ApproachMetrics::tracking);
  const bool dev = best(&ApproachMetrics::deviation);
  const bool shrink = rep.unitnorm_min_raw_norm < 1.0 - 1e-4;
  o.pass = jerk && track && dev && shrink;
  o.lines.push_back("approach     jerkiness      tracking       deviation");
  for (const auto& r : R) {
    o.lines.push_back(fmt("%-11s  %-13.6g  %-13.6g  %-13.6g", r.approach.c_str(), r.jerkiness, r.tracking, r.deviation));
  }
  o.lines.push_back(fmt("riemannian strictly best: jerkiness %s, tracking %s, deviation %s", jerk ? "yes" : "no",
                        track ? "yes" : "no", dev ? "yes" : "no"));
  o.lines.push_back(fmt("unit-norm min raw mean norm %.6f (needs < 1 - 1e-4): %s", rep.unitnorm_min_raw_norm,
                        shrink ? "yes" : "no"));
  return o;
}

// ------------------------------------------------------------------ 7

Outcome reference_settings() {
  Outcome o;
  o.pass = true;
  struct Case {
    std::string name;
    int n;
    double h;
    std::function<SynthDataset()> data;
  };
  auto letter = [](char c) {
    return [c] {
      SynthOptions so;
      so.letter = c;
      so.demos = 8;
      return synth_letter(so);
    };
  };
  const std::vector<Case> cases{{"letter I", 30, 0.01, letter('I')},
                                {"letter J", 30, 0.01, letter('J')},
                                {"letter G", 60, 0.001, letter('G')},
                                {"letter S", 60, 0.001, letter('S')},
                                {"re-orient", 40, 0.02, [] {
                                   SynthOptions so;
                                   so.demos = 4;
                                   return synth_reorient(so);
                                 }}};
  for (const auto& c : cases) {
    const SynthDataset ds = c.data();
    std::vector<ManifoldDemo> demos = ds.demos;
    Manifold M = ds.manifold;
    if (M.tag() == "R3xS3") {
      demos.clear();
      for (const auto& d : ds.demos) demos.push_back(orientation_part(d));
      M = Manifold::sphere(3);
    }
    const BasisConfig b = BasisConfig::uniform(c.n, c.h);
    OrientationFitOptions strict;
    strict.mglm.eta0 = 0.005;
    strict.mglm.eta_max = 0.03;
    std::string verdict = "trained";
    bool ok = true;
    try {
      if (ds.manifold.tag() == "R3xS3") {
        std::vector<FullPoseDemo> fp;
        for (const auto& d : ds.demos) fp.push_back(to_fullpose(d));
        fit_fullpose(fp, b, {}, strict);
      } else {
        fit_orientation(M, demos, b, strict);
      }
    } catch (const ConvergenceError& e) {
      ok = false;
      verdict = std::string("ConvergenceError: ") + e.what();
    } catch (const std::exception& e) {
      ok = false;
      verdict = std::string("error: ") + e.what();
    }
    // the same fit with the budget-limited result kept
    OrientationFitOptions relaxed = strict;
    relaxed.require_convergence = false;
    std::vector<FitReport> reports;
    std::string diag;
    try {
      const OrientationPromp m = fit_orientation(M, demos, b, relaxed, &reports);
      bool finite = m.weights.mean.allFinite() && m.weights.cov.allFinite();
      for (double z : uniform_phases(50)) finite = finite && marginal(m, z).mean.allFinite();
      const double lo = Eigen::SelfAdjointEigenSolver<MatrixXd>(m.weights.cov).eigenvalues().minCoeff();
      double worst = 0.0;
      int converged = 0;
      for (const auto& r : reports) {
        worst = std::max(worst, r.final_error);
        converged += r.converged;
      }
      diag = fmt("budget-limited fit: finite %s, min cov eig %.1e, %d/%zu demos converged, max E %.3e",
                 finite ? "yes" : "no", lo, converged, reports.size(), worst);
    } catch (const std::exception& e) {
      diag = std::string("budget-limited fit failed: ") + e.what();
    }
    o.pass = o.pass && ok;
    o.lines.push_back(fmt("%-9s N=%d h=%g: %s", c.name.c_str(), c.n, c.h, verdict.c_str()));
    o.lines.push_back("          " + diag);
  }
  return o;
}

// ------------------------------------------------------------------ 8

int run(const std::string& args) {
  const std::string cmd = std::string(RPROMP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "rpromp_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  auto p = [&](const std::string& n) { return (root / n).string(); };
  bool ok = true;
  auto step = [&](const std::string& what, bool good) {
    ok = ok && good;
    if (!good) o.lines.push_back("failed: " + what);
  };

  std::vector<std::string> outputs;
  for (const char* run_id : {"a", "b"}) {
    const std::string r = run_id;
    step("synth " + r, run("synth --kind reorient-like --demos 4 --seed 7 --out " + p(r + "_demos")) == 0);
    std::string demos;
    for (int n = 0; n < 4; ++n) demos += " " + p(r + "_demos/demo_00" + std::to_string(n) + ".csv");
    step("train " + r, run("train" + demos + " --n-basis 20 --width 0.025 --allow-unconverged --out " + p(r + ".json")) == 0);
    step("reproduce " + r, run("reproduce --model " + p(r + ".json") + " --grid 50 --draws 3 --seed 11 --draws-out " +
                                   p(r + "_draws.csv") + " --out " + p(r + "_mean.csv")) == 0);
    step("condition " + r, run("condition --model " + p(r + ".json") +
                                   " --phase 0.85 --target 0.6,0.2,0.5,0.7071,0.7071,0,0 --var 1e-3 --out " +
                                   p(r + "_cond.json") + " --series " + p(r + "_cond.csv")) == 0);
    step("blend " + r, run("blend --model " + p(r + ".json") + " --model " + p(r + "_cond.json") + " --grid 30 --out " +
                               p(r + "_blend.csv")) == 0);
    step("compare " + r, run("compare" + demos + " --n-basis 20 --width 0.025 --allow-unconverged --time 1.5 --target "
                                 "0.7071,0.7071,0,0 --format json --out " + p(r + "_compare.json")) == 0);
  }
  int identical = 0, total = 0;
  for (const std::string f : {"_demos/demo_000.csv", "_demos/demo_003.csv", ".json", "_mean.csv", "_draws.csv",
                              "_cond.json", "_cond.csv", "_blend.csv", "_compare.json"}) {
    ++total;
    const std::string a = slurp(p("a" + f)), b = slurp(p("b" + f));
    const bool same = !a.empty() && a == b;
    identical += same;
    step("byte-identical " + f, same);
  }
  o.lines.push_back(fmt("repeated CLI runs: %d/%d outputs byte-identical", identical, total));

  // save/load round trip
  try {
    const ModelFile m = load_model(p("a.json"));
    save_model(p("resaved.json"), m);
    const ModelFile r = load_model(p("resaved.json"));
    const auto& x = std::get<FullPosePromp>(m.model);
    const auto& y = std::get<FullPosePromp>(r.model);
    bool same = true;
    for (double z : uniform_phases(101)) {
      const auto a = marginal(x, z), b = marginal(y, z);
      same = same && a.position.mean == b.position.mean && a.position.cov == b.position.cov &&
             a.orientation.mean == b.orientation.mean && a.orientation.cov == b.orientation.cov;
    }
    step("round-trip queries", same);
    step("round-trip file", slurp(p("a.json")) == slurp(p("resaved.json")));
    step("reproduce after round trip",
         run("reproduce --model " + p("resaved.json") + " --grid 50 --out " + p("resaved_mean.csv")) == 0 &&
             slurp(p("resaved_mean.csv")) == slurp(p("a_mean.csv")));
    o.lines.push_back(fmt("save/load round trip: queries %s", same ? "bit-identical" : "DIFFER"));
  } catch (const std::exception& e) {
    step(std::string("round trip: ") + e.what(), false);
  }

  // every emitted quaternion row is unit norm
  double worst = 0.0;
  std::ifstream in(p("a_mean.csv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    worst = std::max(worst, std::abs(Eigen::Vector4d(v[5], v[6], v[7], v[8]).norm() - 1.0));
  }
  step("unit quaternions", worst <= 1e-9);
  o.lines.push_back(fmt("max | |q| - 1 | in the mean series %.2e", worst));
  o.pass = ok;
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: none
  std::function<Outcome(bool)> run;
};

}  // namespace

int main(int argc, char** argv) {
  bool scan = false;
  std::vector<int> chosen;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--scan") {
      scan = true;
    } else {
      chosen.push_back(std::atoi(a.c_str()));
    }
  }
  const std::vector<Criterion> all{
      {1, "manifold operation suite", 5, [](bool) { return manifold_suite(); }},
      {2, "Euclidean reduction oracle", 30, [](bool) { return euclidean_reduction(); }},
      {3, "geodesic regression self-consistency", 60, mglm_self_consistency},
      {4, "Gaussian product oracle", 0, [](bool) { return product_oracle(); }},
      {5, "via-point conditioning", 30, [](bool) { return via_point(); }},
      {6, "comparison harness orderings", 120, [](bool) { return comparison(); }},
      {7, "reference hyperparameter settings run clean", 0, [](bool) { return reference_settings(); }},
      {8, "determinism and persistence", 0, [](bool) { return determinism(); }},
  };
  bool all_pass = true;
  for (const auto& c : all) {
    if (!chosen.empty() && std::find(chosen.begin(), chosen.end(), c.id) == chosen.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(scan);
    } catch (const std::exception& e) {
      o.pass = false;
      o.lines.push_back(std::string("unexpected exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.2fs", s);
    if (c.limit_s > 0) {
      timing += fmt(" (limit %gs)", c.limit_s);
      if (s >= c.limit_s) {
        o.pass = false;
        o.lines.push_back("runtime limit exceeded");
      }
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << "  [" << timing << "]\n";
    for (const auto& l : o.lines) std::cout << "      " << l << "\n";
    std::cout.flush();
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
