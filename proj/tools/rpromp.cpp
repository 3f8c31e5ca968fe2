// rpromp: command line front end for training, reproducing, conditioning,
// blending and comparing movement primitives on R^n, S^m and R3xS3.

#include "rpromp/baselines.hpp"
#include "rpromp/errors.hpp"
#include "rpromp/io.hpp"
#include "rpromp/metrics.hpp"
#include "rpromp/synth.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#ifndef RPROMP_VERSION
#define RPROMP_VERSION "0.0.0"
#endif

using namespace rpromp;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kFailure = 3, kIo = 4 };

struct Hyper {
  int n_basis = 40;
  double width = 0.02;
  double lambda = 1e-6;
  double lambda_reg = kDefaultRegularization;
  double eta = 0.005;
  double eta_max = 0.03;
  double tol = 1e-10;
  int max_iter = 2000;
  int grid = 100;
  bool allow_unconverged = false;

  void add(CLI::App* app) {
    app->add_option("--n-basis", n_basis, "Number of basis functions")->check(CLI::PositiveNumber);
    app->add_option("--width", width, "Basis width h")->check(CLI::PositiveNumber);
    app->add_option("--lambda", lambda, "Ridge factor of the Euclidean weight regression");
    app->add_option("--lambda-reg", lambda_reg, "Regularization added to the weight covariance");
    app->add_option("--eta", eta, "Initial geodesic regression step size")->check(CLI::PositiveNumber);
    app->add_option("--eta-max", eta_max, "Largest geodesic regression step size")->check(CLI::PositiveNumber);
    app->add_option("--tol", tol, "Relative error decrease that stops geodesic regression");
    app->add_option("--max-iter", max_iter, "Geodesic regression iteration budget")->check(CLI::PositiveNumber);
    app->add_option("--grid", grid, "Phase grid the demonstrations are resampled onto")->check(CLI::Range(2, 1000000));
    app->add_flag("--allow-unconverged", allow_unconverged,
                  "Keep geodesic regression fits that exhaust --max-iter instead of failing");
  }
  BasisConfig basis() const { return BasisConfig::uniform(n_basis, width); }
  EuclideanFitOptions euclidean() const {
    EuclideanFitOptions o;
    o.ridge = lambda;
    o.reg = lambda_reg;
    return o;
  }
  OrientationFitOptions orientation() const {
    OrientationFitOptions o;
    o.mglm.eta0 = eta;
    o.mglm.eta_max = eta_max;
    o.mglm.tol = tol;
    o.mglm.max_iter = max_iter;
    o.reg = lambda_reg;
    o.grid = grid;
    o.require_convergence = !allow_unconverged;
    return o;
  }
  json to_json() const {
    return {{"n_basis", n_basis}, {"width", width},     {"lambda", lambda},     {"lambda_reg", lambda_reg},
            {"eta", eta},         {"eta_max", eta_max}, {"tol", tol},           {"max_iter", max_iter},
            {"grid", grid},       {"allow_unconverged", allow_unconverged}};
  }
};

VectorXd parse_list(const std::string& text, const char* what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::logic_error&) {
      throw std::invalid_argument(std::string(what) + ": '" + cell + "' is not a number");
    }
  }
  return Eigen::Map<VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// Writes to a file, or stdout for "-".
template <class F>
void emit(const std::string& path, F write) {
  if (path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write(out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

struct Loaded {
  Manifold manifold = Manifold::euclidean(1);
  std::vector<ManifoldDemo> demos;
};

Loaded load_demos(const std::vector<std::string>& files) {
  Loaded out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    TrajectoryFile f = read_trajectory(files[i]);
    for (const auto& w : f.warnings) warn(w);
    if (i == 0) {
      out.manifold = f.manifold;
    } else if (!(f.manifold == out.manifold)) {
      throw std::invalid_argument(files[i] + ": manifold " + f.manifold.tag() + " differs from " + out.manifold.tag() +
                                  " in " + files[0]);
    }
    out.demos.push_back(std::move(f.demo));
  }
  return out;
}

double mean_duration(const std::vector<ManifoldDemo>& demos) {
  double d = 0.0;
  for (const auto& demo : demos) d += demo.times(demo.times.size() - 1) - demo.times(0);
  return d / static_cast<double>(demos.size());
}

double model_duration(const AnyPromp& m) {
  return std::visit(
      [](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FullPosePromp>) {
          return x.orientation.mean_duration;
        } else {
          return x.mean_duration;
        }
      },
      m);
}

std::vector<std::string> prefixed(const std::string& prefix, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(prefix + n);
  return out;
}

std::vector<std::string> tangent_names(int d) {
  std::vector<std::string> out;
  for (int i = 0; i < d; ++i) out.push_back("t" + std::to_string(i));
  return out;
}

// Column layout and one row of a marginal.
std::vector<std::string> marginal_columns(const ModelFile& mf) {
  std::vector<std::string> cols{"phase", "time"};
  const Manifold M = Manifold::parse(mf.tag);
  for (const auto& n : column_names(M)) cols.push_back(n);
  if (std::holds_alternative<EuclideanPromp>(mf.model)) {
    for (const auto& n : prefixed("std_", column_names(M))) cols.push_back(n);
  } else if (std::holds_alternative<OrientationPromp>(mf.model)) {
    for (const auto& n : prefixed("std_", tangent_names(M.dim()))) cols.push_back(n);
  } else {
    for (const auto& n : prefixed("std_", {"x", "y", "z"})) cols.push_back(n);
    for (const auto& n : prefixed("std_", tangent_names(3))) cols.push_back(n);
  }
  return cols;
}

VectorXd std_of(const MatrixXd& cov) { return cov.diagonal().cwiseMax(0.0).cwiseSqrt(); }

VectorXd concat(std::initializer_list<VectorXd> parts) {
  Eigen::Index n = 0;
  for (const auto& p : parts) n += p.size();
  VectorXd out(n);
  n = 0;
  for (const auto& p : parts) {
    out.segment(n, p.size()) = p;
    n += p.size();
  }
  return out;
}

VectorXd marginal_row(const AnyPromp& model, double z) {
  const double t = z * model_duration(model);
  return std::visit(
      [&](const auto& m) -> VectorXd {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, EuclideanPromp>) {
          const auto g = marginal(m, z);
          return concat({VectorXd::Constant(1, z), VectorXd::Constant(1, t), g.mean, std_of(g.cov)});
        } else if constexpr (std::is_same_v<T, OrientationPromp>) {
          const auto g = marginal(m, z);
          return concat({VectorXd::Constant(1, z), VectorXd::Constant(1, t), g.mean, std_of(g.cov)});
        } else {
          const auto g = marginal(m, z);
          return concat({VectorXd::Constant(1, z), VectorXd::Constant(1, t), g.position.mean, g.orientation.mean,
                         std_of(g.position.cov), std_of(g.orientation.cov)});
        }
      },
      model);
}

Series marginal_series(const ModelFile& mf, int grid) {
  const VectorXd z = uniform_phases(grid);
  Series s{marginal_columns(mf), MatrixXd(grid, static_cast<Eigen::Index>(marginal_columns(mf).size()))};
  for (int k = 0; k < grid; ++k) s.rows.row(k) = marginal_row(mf.model, z(k)).transpose();
  return s;
}

VectorXd draw(const EuclideanGaussian& g, std::mt19937_64& rng) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (g.cov + g.cov.transpose()));
  const MatrixXd root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd e(g.mean.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = normal(rng);
  return g.mean + root * e;
}

// Sampled trajectories: columns draw, phase, components.
Series draw_series(const ModelFile& mf, int grid, int draws, std::uint64_t seed) {
  const VectorXd z = uniform_phases(grid);
  const Manifold M = Manifold::parse(mf.tag);
  std::vector<std::string> cols{"draw", "phase"};
  for (const auto& n : column_names(M)) cols.push_back(n);
  Series s{cols, MatrixXd(static_cast<Eigen::Index>(draws) * grid, static_cast<Eigen::Index>(cols.size()))};
  std::mt19937_64 rng(seed);
  for (int d = 0; d < draws; ++d) {
    std::vector<VectorXd> rows(static_cast<std::size_t>(grid));
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, EuclideanPromp>) {
            const MatrixXd W = unstack_weights(draw(m.weights, rng), m.dim);
            for (int k = 0; k < grid; ++k) rows[static_cast<std::size_t>(k)] = W * phi(m.basis, z(k));
          } else if constexpr (std::is_same_v<T, OrientationPromp>) {
            const auto path = sample_trajectory(m, z, rng());
            for (int k = 0; k < grid; ++k) rows[static_cast<std::size_t>(k)] = path[static_cast<std::size_t>(k)];
          } else {
            const MatrixXd W = unstack_weights(draw(m.position.weights, rng), 3);
            const auto path = sample_trajectory(m.orientation, z, rng());
            for (int k = 0; k < grid; ++k) {
              rows[static_cast<std::size_t>(k)] = concat({W * phi(m.position.basis, z(k)), path[static_cast<std::size_t>(k)]});
            }
          }
        },
        mf.model);
    for (int k = 0; k < grid; ++k) {
      const Eigen::Index r = static_cast<Eigen::Index>(d) * grid + k;
      s.rows(r, 0) = d;
      s.rows(r, 1) = z(k);
      s.rows.row(r).tail(M.ambient_dim()) = rows[static_cast<std::size_t>(k)].transpose();
    }
  }
  return s;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const std::string& kind, SynthOptions o, const std::string& input, const std::string& out_dir) {
  if (kind == "import-2d" && input.empty()) throw std::invalid_argument("synth: import-2d needs --input");
  const SynthDataset ds = kind == "import-2d" ? synth_import(read_curve_2d(input), o) : synthesize(kind, o);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());
  for (std::size_t n = 0; n < ds.demos.size(); ++n) {
    char name[32];
    std::snprintf(name, sizeof name, "demo_%03zu.csv", n);
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    write_trajectory(path, ds.manifold, ds.demos[n]);
    std::cout << path << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- train

int cmd_train(const std::vector<std::string>& files, const Hyper& hp, const std::string& out) {
  const Loaded data = load_demos(files);
  const std::string tag = data.manifold.tag();
  ModelFile mf{tag, EuclideanPromp{}, json::object()};
  std::vector<FitReport> reports;
  if (data.manifold.is_euclidean()) {
    std::vector<EuclideanDemo> demos;
    for (const auto& d : data.demos) demos.push_back({d.times, to_matrix(d.points)});
    mf.model = fit_euclidean(demos, hp.basis(), hp.euclidean());
  } else if (tag == "S2" || tag == "S3") {
    mf.model = fit_orientation(data.manifold, data.demos, hp.basis(), hp.orientation(), &reports);
  } else if (tag == "R3xS3") {
    std::vector<FullPoseDemo> demos;
    for (const auto& d : data.demos) demos.push_back(to_fullpose(d));
    std::vector<ManifoldDemo> rot;
    for (const auto& d : data.demos) rot.push_back(orientation_part(d));
    FullPosePromp m;
    std::vector<EuclideanDemo> pos;
    for (const auto& d : demos) pos.push_back({d.times, d.positions});
    m.position = fit_euclidean(pos, hp.basis(), hp.euclidean());
    m.orientation = fit_orientation(Manifold::sphere(3), rot, hp.basis(), hp.orientation(), &reports);
    mf.model = m;
  } else {
    throw std::invalid_argument("train: unsupported manifold " + tag);
  }
  json checks = json::array();
  for (const auto& f : files) checks.push_back({{"file", std::filesystem::path(f).filename().string()}, {"fnv1a64", file_checksum(f)}});
  json fits = json::array();
  for (std::size_t n = 0; n < reports.size(); ++n) {
    const auto& r = reports[n];
    if (!r.converged) warn("geodesic regression on demonstration " + std::to_string(n) + " stopped at the iteration budget");
    fits.push_back({{"demo", n},
                    {"final_error", r.final_error},
                    {"iterations", r.iterations},
                    {"accepted", r.accepted},
                    {"converged", r.converged},
                    {"stop_reason", r.stop_reason}});
  }
  mf.metadata = {{"tool", "rpromp"},      {"tool_version", RPROMP_VERSION}, {"hyperparameters", hp.to_json()},
                 {"demos", checks},       {"fits", fits}};
  save_model(out, mf);
  return kOk;
}

// ------------------------------------------------------------ reproduce

int cmd_reproduce(const std::string& model, int grid, const std::string& format, const std::string& out, int draws,
                  std::uint64_t seed, const std::string& draws_out) {
  const ModelFile mf = load_model(model);
  const Series s = marginal_series(mf, grid);
  emit(out, [&](std::ostream& o) { write_series(o, s, format); });
  if (draws > 0) {
    if (draws_out.empty()) throw std::invalid_argument("reproduce: --draws needs --draws-out");
    const Series d = draw_series(mf, grid, draws, seed);
    emit(draws_out, [&](std::ostream& o) { write_series(o, d, format); });
  }
  return kOk;
}

// ------------------------------------------------------------ condition

struct ViaSpec {
  std::optional<double> phase;
  std::optional<double> time;
  std::string target;
  double variance = 1e-3;
  std::string cov;

  void add(CLI::App* app, bool require_target = true) {
    auto* p = app->add_option("--phase", phase, "Via-point phase in [0, 1]");
    auto* t = app->add_option("--time", time, "Via-point time in seconds from the start");
    p->excludes(t);
    auto* tg = app->add_option("--target", target, "Target components, comma separated, in file column order");
    if (require_target) tg->required();
    app->add_option("--var", variance, "Isotropic via-point variance");
    app->add_option("--cov", cov, "Full via-point covariance, row-major, intrinsic coordinates");
  }
  double resolve_phase(double duration) const {
    if (phase) {
      if (*phase < 0.0 || *phase > 1.0) throw std::invalid_argument("--phase must lie in [0, 1]");
      return *phase;
    }
    if (time) return phase_at_time(*time, duration);
    throw std::invalid_argument("need --phase or --time");
  }
  MatrixXd covariance(int d) const {
    if (cov.empty()) {
      if (!(variance > 0.0)) throw std::invalid_argument("--var must be positive");
      return variance * MatrixXd::Identity(d, d);
    }
    const VectorXd v = parse_list(cov, "--cov");
    if (v.size() != d * d) throw std::invalid_argument("--cov needs " + std::to_string(d * d) + " entries");
    return Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>>(v.data(), d, d);
  }
};

int cmd_condition(const std::string& model, const ViaSpec& via, const std::string& out, const std::string& series,
                  int grid, const std::string& format) {
  ModelFile mf = load_model(model);
  const Manifold M = Manifold::parse(mf.tag);
  const double z = via.resolve_phase(model_duration(mf.model));
  const VectorXd target = parse_list(via.target, "--target");
  if (target.size() != M.ambient_dim()) {
    throw std::invalid_argument("--target needs " + std::to_string(M.ambient_dim()) + " components for " + mf.tag);
  }
  const MatrixXd cov = via.covariance(M.dim());
  json report = {{"phase", z}};
  std::visit(
      [&](auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, EuclideanPromp>) {
          report["prior_distance"] = (marginal(m, z).mean - target).norm();
          m = condition(m, ViaPoint{z, target, cov});
          report["distance"] = (marginal(m, z).mean - target).norm();
        } else if constexpr (std::is_same_v<T, OrientationPromp>) {
          report["prior_distance"] = M.distance(marginal(m, z).mean, M.project(target));
          m = condition(m, ViaPoint{z, target, cov});
          report["distance"] = M.distance(marginal(m, z).mean, M.project(target));
        } else {
          if (cov.topRightCorner(3, 3).cwiseAbs().maxCoeff() > 0.0) {
            throw std::invalid_argument("--cov: position and orientation blocks must be uncorrelated");
          }
          const Manifold S3 = Manifold::sphere(3);
          const VectorXd q = S3.project(target.tail<4>());
          FullPoseViaPoint v{ViaPoint{z, target.head<3>(), cov.topLeftCorner(3, 3)},
                             ViaPoint{z, q, cov.bottomRightCorner(3, 3)}};
          const auto before = marginal(m, z);
          report["prior_position_distance"] = (before.position.mean - target.head<3>()).norm();
          report["prior_orientation_distance"] = S3.distance(before.orientation.mean, q);
          m = condition(m, v);
          const auto after = marginal(m, z);
          report["position_distance"] = (after.position.mean - target.head<3>()).norm();
          report["orientation_distance"] = S3.distance(after.orientation.mean, q);
        }
      },
      mf.model);
  mf.metadata["conditioned_on"] = {{"phase", z}, {"target", std::vector<double>(target.data(), target.data() + target.size())}};
  save_model(out, mf);
  if (!series.empty()) emit(series, [&](std::ostream& o) { write_series(o, marginal_series(mf, grid), format); });
  if (format == "json") {
    std::cout << report.dump() << "\n";
  } else {
    for (const auto& [k, v] : report.items()) std::cout << k << "," << format_number(v.get<double>()) << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- blend

struct Schedule {
  enum Kind { Const, Sigmoid, ReverseSigmoid } kind = Const;
  double a = 1.0;
  double k = 0.0;

  static Schedule parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    auto num = [&](std::size_t i) {
      const VectorXd v = parse_list(parts.at(i), "--alpha");
      if (v.size() != 1) throw std::invalid_argument("--alpha: bad number in '" + text + "'");
      return v(0);
    };
    Schedule s;
    if (parts.size() == 2 && parts[0] == "const") {
      s.a = num(1);
      if (s.a < 0.0) throw std::invalid_argument("--alpha: weights must be nonnegative");
    } else if (parts.size() == 3 && (parts[0] == "sigmoid" || parts[0] == "rsigmoid")) {
      s.kind = parts[0] == "sigmoid" ? Sigmoid : ReverseSigmoid;
      s.a = num(1);
      s.k = num(2);
    } else {
      throw std::invalid_argument("--alpha: expected const:v, sigmoid:mid:k or rsigmoid:mid:k, got '" + text + "'");
    }
    return s;
  }
  double at(double z) const {
    const double sig = 1.0 / (1.0 + std::exp(-k * (z - a)));
    return kind == Const ? a : kind == Sigmoid ? sig : 1.0 - sig;
  }
};

int cmd_blend(const std::vector<std::string>& files, std::vector<std::string> alpha_specs, int grid,
              const std::string& format, const std::string& out, double tol, int max_iter) {
  std::vector<ModelFile> models;
  for (const auto& f : files) models.push_back(load_model(f));
  for (std::size_t i = 1; i < models.size(); ++i) {
    if (models[i].tag != models[0].tag || models[i].model.index() != models[0].model.index()) {
      throw std::invalid_argument(files[i] + ": model kind differs from " + files[0]);
    }
  }
  if (alpha_specs.empty()) {
    if (models.size() == 2) {
      alpha_specs = {"rsigmoid:0.5:20", "sigmoid:0.5:20"};
    } else {
      alpha_specs.assign(models.size(), "const:1");
    }
  }
  if (alpha_specs.size() != models.size()) throw std::invalid_argument("--alpha: need one schedule per model");
  std::vector<Schedule> sched;
  for (const auto& s : alpha_specs) sched.push_back(Schedule::parse(s));

  std::vector<std::string> cols = marginal_columns(models[0]);
  cols.erase(cols.begin() + 1);  // no time column
  for (std::size_t i = 0; i < models.size(); ++i) cols.push_back("alpha_" + std::to_string(i));
  const bool riemannian = !std::holds_alternative<EuclideanPromp>(models[0].model);
  if (riemannian) cols.push_back("iterations");

  ProductOptions po;
  po.tol = tol;
  po.max_iter = max_iter;
  const VectorXd z = uniform_phases(grid);
  Series s{cols, MatrixXd(grid, static_cast<Eigen::Index>(cols.size()))};
  for (int k = 0; k < grid; ++k) {
    std::vector<double> alphas;
    for (const auto& sc : sched) alphas.push_back(sc.at(z(k)));
    VectorXd row;
    VectorXd a = Eigen::Map<VectorXd>(alphas.data(), static_cast<Eigen::Index>(alphas.size()));
    std::visit(
        [&](const auto& first) {
          using T = std::decay_t<decltype(first)>;
          std::vector<T> ms;
          for (const auto& m : models) ms.push_back(std::get<T>(m.model));
          if constexpr (std::is_same_v<T, EuclideanPromp>) {
            const auto g = blend(ms, alphas, z(k));
            row = concat({VectorXd::Constant(1, z(k)), g.mean, std_of(g.cov), a});
          } else if constexpr (std::is_same_v<T, OrientationPromp>) {
            const auto r = blend(ms, alphas, z(k), po);
            row = concat({VectorXd::Constant(1, z(k)), r.gaussian.mean, std_of(r.gaussian.cov), a,
                          VectorXd::Constant(1, r.iterations)});
          } else {
            std::vector<OrientationPromp> rot;
            std::vector<EuclideanPromp> pos;
            for (const auto& m : ms) {
              rot.push_back(m.orientation);
              pos.push_back(m.position);
            }
            const auto p = blend(pos, alphas, z(k));
            const auto r = blend(rot, alphas, z(k), po);
            row = concat({VectorXd::Constant(1, z(k)), p.mean, r.gaussian.mean, std_of(p.cov), std_of(r.gaussian.cov), a,
                          VectorXd::Constant(1, r.iterations)});
          }
        },
        models[0].model);
    s.rows.row(k) = row.transpose();
  }
  emit(out, [&](std::ostream& o) { write_series(o, s, format); });
  return kOk;
}

// -------------------------------------------------------------- compare

int cmd_compare(const std::vector<std::string>& files, const ViaSpec& via, const std::string& holdout, const Hyper& hp,
                int eval_grid, const std::string& format, const std::string& out) {
  const Loaded data = load_demos(files);
  const std::string tag = data.manifold.tag();
  if (tag != "S3" && tag != "R3xS3") throw std::invalid_argument("compare: demonstrations must be S3 or R3xS3, got " + tag);
  std::vector<ManifoldDemo> demos;
  for (const auto& d : data.demos) demos.push_back(orientation_part(d));
  const double z = via.resolve_phase(mean_duration(demos));
  const Manifold S3 = Manifold::sphere(3);

  Eigen::Vector4d target;
  if (!holdout.empty()) {
    if (!via.target.empty()) throw std::invalid_argument("compare: give either --target or --holdout");
    const TrajectoryFile h = read_trajectory(holdout);
    const ManifoldDemo hd = orientation_part(h.demo);
    if (hd.points.front().size() != 4) throw std::invalid_argument(holdout + ": not an S3 or R3xS3 trajectory");
    const auto pts = preprocess_quaternions(hd.points);
    target = resample(S3, phase_from_times(hd.times), pts, VectorXd::Constant(1, z)).front();
  } else {
    const VectorXd t = parse_list(via.target, "--target");
    if (t.size() == 7) {
      target = t.tail<4>();
    } else if (t.size() == 4) {
      target = t;
    } else {
      throw std::invalid_argument("--target needs 4 quaternion components (or a 7-component pose)");
    }
  }
  if (!via.cov.empty()) throw std::invalid_argument("compare: use --var (isotropic) for the via-point");

  ComparisonOptions co;
  co.riemannian = hp.orientation();
  co.euclidean = hp.euclidean();
  co.grid = eval_grid;
  const ComparisonReport rep = compare_approaches(demos, hp.basis(), z, target, via.variance, co);

  Series s{{"jerkiness", "tracking", "deviation"}, MatrixXd(3, 3)};
  for (int i = 0; i < 3; ++i) {
    s.rows.row(i) << rep.rows[static_cast<std::size_t>(i)].jerkiness, rep.rows[static_cast<std::size_t>(i)].tracking,
        rep.rows[static_cast<std::size_t>(i)].deviation;
  }
  json meta = {{"via_phase", rep.via_phase},
               {"via_variance", rep.variance},
               {"via_target", std::vector<double>(target.data(), target.data() + 4)},
               {"euler_convention", kEulerConvention},
               {"jerkiness", "sum over quaternion components of squared third differences / dt^6 * dt"},
               {"unitnorm_min_raw_norm", rep.unitnorm_min_raw_norm},
               {"hyperparameters", hp.to_json()}};
  emit(out, [&](std::ostream& o) {
    if (format == "json") {
      json rows = json::array();
      for (const auto& r : rep.rows) {
        rows.push_back({{"approach", r.approach}, {"jerkiness", r.jerkiness}, {"tracking", r.tracking}, {"deviation", r.deviation}});
      }
      o << json{{"metrics", rows}, {"metadata", meta}}.dump() << "\n";
    } else {
      for (const auto& [k, v] : meta.items()) {
        if (k != "hyperparameters") o << "# " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
      }
      o << "approach,jerkiness,tracking,deviation\n";
      for (const auto& r : rep.rows) {
        o << r.approach << "," << format_number(r.jerkiness) << "," << format_number(r.tracking) << ","
          << format_number(r.deviation) << "\n";
      }
    }
  });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic movement primitives on Riemannian manifolds"};
  app.set_version_flag("--version", RPROMP_VERSION);
  app.require_subcommand(1);
  std::string format = "csv";
  std::uint64_t seed = 1;

  auto* synth = app.add_subcommand("synth", "Generate synthetic demonstrations");
  std::string kind, input, out_dir;
  SynthOptions so;
  std::string letter = "S";
  synth->add_option("--kind", kind, "letter-curve, reorient-like, key-turn-like or import-2d")
      ->required()
      ->check(CLI::IsMember({"letter-curve", "reorient-like", "key-turn-like", "import-2d"}));
  synth->add_option("--demos", so.demos, "Number of demonstrations")->check(CLI::PositiveNumber);
  synth->add_option("--samples", so.samples, "Samples per demonstration");
  synth->add_option("--duration", so.duration, "Nominal duration in seconds");
  synth->add_option("--noise", so.noise, "Per-demo perturbation scale in radians");
  synth->add_option("--angle", so.angle_deg, "Total rotation of pose skills in degrees");
  synth->add_option("--radius", so.radius, "Lift radius of 2D curves on S2");
  synth->add_option("--scale", so.scale, "Explicit 2D scale for import-2d");
  synth->add_option("--letter", letter, "Letter for letter-curve")->check(CLI::IsMember({"S", "I", "J", "G"}));
  synth->add_option("--input", input, "2D curve CSV for import-2d");
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--out", out_dir, "Output directory")->required();

  Hyper hp;
  auto* train = app.add_subcommand("train", "Fit a model to demonstration files");
  std::vector<std::string> demo_files;
  std::string model_out;
  train->add_option("demos", demo_files, "Demonstration files")->required()->check(CLI::ExistingFile);
  hp.add(train);
  train->add_option("--out", model_out, "Model file to write")->required();

  auto* repro = app.add_subcommand("reproduce", "Emit the marginal mean and std series of a model");
  std::string model_in, out = "-", draws_out;
  int grid = 100;
  int draws = 0;
  repro->add_option("--model", model_in, "Model file")->required();
  repro->add_option("--grid", grid, "Number of phases")->check(CLI::Range(2, 10000000));
  repro->add_option("--draws", draws, "Number of sampled trajectories")->check(CLI::NonNegativeNumber);
  repro->add_option("--draws-out", draws_out, "File for sampled trajectories");
  repro->add_option("--seed", seed, "Random seed for --draws");
  repro->add_option("--out", out, "Series output file, - for stdout");

  auto* cond = app.add_subcommand("condition", "Condition a model on a via-point");
  ViaSpec via;
  std::string series;
  cond->add_option("--model", model_in, "Model file")->required();
  via.add(cond);
  cond->add_option("--out", model_out, "Conditioned model file")->required();
  cond->add_option("--series", series, "Also write the conditioned marginal series here");
  cond->add_option("--grid", grid, "Phases of --series")->check(CLI::Range(2, 10000000));

  auto* bl = app.add_subcommand("blend", "Blend models with phase-dependent weights");
  std::vector<std::string> model_files, alphas;
  double tol = 1e-9;
  int max_iter = 100;
  bl->add_option("--model", model_files, "Model files")->required();
  bl->add_option("--alpha", alphas, "Weight schedule per model: const:v, sigmoid:mid:k, rsigmoid:mid:k");
  bl->add_option("--grid", grid, "Number of phases")->check(CLI::Range(2, 10000000));
  bl->add_option("--tol", tol, "Gaussian product tolerance");
  bl->add_option("--max-iter", max_iter, "Gaussian product iteration budget")->check(CLI::PositiveNumber);
  bl->add_option("--out", out, "Series output file, - for stdout");

  auto* cmp = app.add_subcommand("compare", "Compare Riemannian, Euler and unit-norm models on a via-point");
  Hyper chp;
  ViaSpec cvia;
  std::string holdout;
  int eval_grid = 200;
  cmp->add_option("demos", demo_files, "Demonstration files")->required()->check(CLI::ExistingFile);
  chp.add(cmp);
  cvia.add(cmp, false);
  cmp->add_option("--holdout", holdout, "Take the target from this demonstration at the via phase");
  cmp->add_option("--eval-grid", eval_grid, "Evaluation grid")->check(CLI::Range(4, 10000000));
  cmp->add_option("--out", out, "Report output file, - for stdout");

  for (auto* sub : {repro, cond, bl, cmp}) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  }
  for (auto* sub : {train, cond, bl, cmp}) sub->add_option("--seed", seed, "Random seed (unused by this command)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalid;
  }

  try {
    if (*synth) {
      so.seed = seed;
      so.letter = letter.front();
      return cmd_synth(kind, so, input, out_dir);
    }
    if (*train) return cmd_train(demo_files, hp, model_out);
    if (*repro) return cmd_reproduce(model_in, grid, format, out, draws, seed, draws_out);
    if (*cond) return cmd_condition(model_in, via, model_out, series, grid, format);
    if (*bl) return cmd_blend(model_files, alphas, grid, format, out, tol, max_iter);
    if (*cmp) return cmd_compare(demo_files, cvia, holdout, chp, eval_grid, format, out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const SingularityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kInvalid;
}
