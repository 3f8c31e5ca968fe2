#include "rpromp/mglm.hpp"

#include "rpromp/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rpromp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_inputs(const Manifold& M, const GeodesicModel& model, const std::vector<Point>& traj,
                  const VectorXd& phases) {
  if (traj.size() != static_cast<std::size_t>(phases.size())) {
    throw std::invalid_argument("mglm: trajectory length differs from phase count");
  }
  if (model.weights.rows() != M.dim() || model.weights.cols() != model.basis.n_basis) {
    throw std::invalid_argument("mglm: weight matrix has the wrong shape");
  }
}

// Residuals Log_{yhat_t}(y_t) transported to p, one column per sample.
MatrixXd residuals(const Manifold& M, const Point& p, const MatrixXd& W, const std::vector<Point>& traj,
                   const MatrixXd& P) {
  MatrixXd R(M.dim(), static_cast<Eigen::Index>(traj.size()));
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    const Point yhat = M.exp(p, W * P.row(ti).transpose());
    R.col(ti) = M.transport(yhat, p, M.log(yhat, traj[t]));
  }
  return R;
}

}  // namespace

double reconstruction_error(const Manifold& M, const GeodesicModel& model, const std::vector<Point>& traj,
                            const VectorXd& phases) {
  check_inputs(M, model, traj, phases);
  return 0.5 * residuals(M, model.base, model.weights, traj, phi_matrix(model.basis, phases)).squaredNorm();
}

MglmGradients gradients(const Manifold& M, const GeodesicModel& model, const std::vector<Point>& traj,
                        const VectorXd& phases) {
  check_inputs(M, model, traj, phases);
  const MatrixXd P = phi_matrix(model.basis, phases);
  const MatrixXd R = residuals(M, model.base, model.weights, traj, P);
  return {-R.rowwise().sum(), -R * P};
}

MglmFit fit_mglm(const Manifold& M, const std::vector<Point>& traj, const VectorXd& phases, const BasisConfig& basis,
                 const MglmOptions& options) {
  basis.validate();
  if (traj.size() < 2) throw std::invalid_argument("fit_mglm: need at least two samples");
  if (traj.size() != static_cast<std::size_t>(phases.size())) {
    throw std::invalid_argument("fit_mglm: trajectory length differs from phase count");
  }
  if (!(options.eta0 > 0.0) || !(options.eta_max >= options.eta0)) {
    throw std::invalid_argument("fit_mglm: need 0 < eta0 <= eta_max");
  }
  const bool fixed = options.fixed_base.has_value();
  const MatrixXd P = phi_matrix(basis, phases);

  Point p = fixed ? *options.fixed_base : traj.front();
  M.check_point(p, 1e-6);
  MatrixXd W = MatrixXd::Zero(M.dim(), basis.n_basis);

  auto error_at = [&](const Point& base, const MatrixXd& weights) {
    try {
      return 0.5 * residuals(M, base, weights, traj, P).squaredNorm();
    } catch (const SingularityError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  FitReport report;
  double E = error_at(p, W);
  if (!std::isfinite(E)) throw SingularityError("fit_mglm: a sample is antipodal to the initial base point");
  report.error_history.push_back(E);

  double eta = options.eta0;
  MatrixXd R = residuals(M, p, W, traj, P);
  VectorXd grad_p = -R.rowwise().sum();
  MatrixXd grad_W = -R * P;

  report.stop_reason = "iteration budget exhausted";
  if (E == 0.0) {
    report.converged = true;
    report.stop_reason = "zero error";
  }
  while (!report.converged && report.iterations < options.max_iter) {
    ++report.iterations;
    report.step_sizes.push_back(eta);
    Point p_hat = p;
    MatrixXd W_hat = W - eta * grad_W;
    if (!fixed) {
      p_hat = M.exp(p, -eta * grad_p);
      W_hat = M.transport_matrix(p, p_hat) * W_hat;
    }
    const double E_hat = error_at(p_hat, W_hat);
    if (E_hat < E) {
      p = std::move(p_hat);
      W = std::move(W_hat);
      E = E_hat;
      report.error_history.push_back(E);
      ++report.accepted;
      eta = std::min(2.0 * eta, options.eta_max);
      if (E == 0.0) {
        report.converged = true;
        report.stop_reason = "zero error";
        break;
      }
      if (report.accepted >= options.window) {
        const double before = report.error_history[report.error_history.size() - 1 - options.window];
        if (before - E <= options.tol * before) {
          report.converged = true;
          report.stop_reason = "relative error change below tolerance";
          break;
        }
      }
      R = residuals(M, p, W, traj, P);
      grad_p = -R.rowwise().sum();
      grad_W = -R * P;
    } else {
      eta *= 0.5;
      if (eta < options.eta_min) {
        report.converged = true;
        report.stop_reason = "step size underflow";
        break;
      }
    }
  }
  report.final_error = E;
  return {{p, W, basis}, report};
}

}  // namespace rpromp
