#include "rpromp/manifold.hpp"

#include "rpromp/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rpromp {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Orthonormal basis of x-perp: canonical axes minus the one most aligned with
// x (lowest index on ties), projected and Gram-Schmidt'd in index order.
MatrixXd sphere_basis(const VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::Index drop = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs(x(i)) > std::abs(x(drop))) drop = i;
  }
  MatrixXd basis(n, n - 1);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == drop) continue;
    VectorXd v = VectorXd::Unit(n, i);
    // two passes of modified Gram-Schmidt keep orthogonality at round-off level
    for (int pass = 0; pass < 2; ++pass) {
      v -= x.dot(v) * x;
      for (Eigen::Index j = 0; j < col; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    }
    basis.col(col++) = v.normalized();
  }
  return basis;
}

VectorXd sphere_log_ambient(const VectorXd& x, const VectorXd& y) {
  const double c = x.dot(y);
  if (c < -1.0 + kAntipodalTol) {
    throw SingularityError("log map undefined: points are antipodal on a sphere factor");
  }
  VectorXd r = y - c * x;
  const double s = r.norm();
  if (s == 0.0) return VectorXd::Zero(x.size());
  const double theta = std::atan2(s, c);
  return (theta / s) * r;
}

VectorXd sphere_exp_ambient(const VectorXd& x, const VectorXd& u) {
  const double theta = u.norm();
  if (theta < kTinyNorm) return x;
  VectorXd y = x * std::cos(theta) + u * (std::sin(theta) / theta);
  return y / y.norm();
}

double sphere_distance(const VectorXd& x, const VectorXd& y) {
  if (x == y) return 0.0;
  const double c = x.dot(y);
  const double s = (y - c * x).norm();
  return std::atan2(s, c);
}

// Ambient transport matrix on the sphere, I + ((cos t - 1) ub - sin t x) ub^T.
MatrixXd sphere_transport_ambient(const VectorXd& x, const VectorXd& y) {
  const VectorXd u = sphere_log_ambient(x, y);
  const double theta = u.norm();
  const Eigen::Index n = x.size();
  if (theta < kTinyNorm) return MatrixXd::Identity(n, n);
  const VectorXd ub = u / theta;
  return MatrixXd::Identity(n, n) + ((std::cos(theta) - 1.0) * ub - std::sin(theta) * x) * ub.transpose();
}

}  // namespace

Manifold::Manifold(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("manifold needs at least one factor");
  for (const auto& f : factors_) {
    if (f.dim < 1) throw std::invalid_argument("manifold factor dimension must be positive");
    dim_ += f.dim;
    ambient_dim_ += f.ambient_dim();
  }
}

Manifold Manifold::euclidean(int n) { return Manifold({Factor{FactorKind::Euclidean, n}}); }

Manifold Manifold::sphere(int m) { return Manifold({Factor{FactorKind::Sphere, m}}); }

Manifold Manifold::product(const std::vector<Manifold>& parts) {
  std::vector<Factor> all;
  for (const auto& p : parts) {
    if (p.factors_.size() != 1) throw std::invalid_argument("product factors must not be products");
    all.push_back(p.factors_.front());
  }
  return Manifold(std::move(all));
}

Manifold Manifold::parse(std::string_view tag) {
  std::vector<Factor> factors;
  std::size_t pos = 0;
  while (pos <= tag.size()) {
    const std::size_t next = tag.find('x', pos);
    const std::string_view part = tag.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (part.size() < 2 || (part[0] != 'R' && part[0] != 'S')) {
      throw std::invalid_argument("bad manifold tag '" + std::string(tag) + "'");
    }
    int n = 0;
    for (char ch : part.substr(1)) {
      if (ch < '0' || ch > '9') throw std::invalid_argument("bad manifold tag '" + std::string(tag) + "'");
      n = n * 10 + (ch - '0');
    }
    factors.push_back({part[0] == 'R' ? FactorKind::Euclidean : FactorKind::Sphere, n});
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return Manifold(std::move(factors));
}

std::string Manifold::tag() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) os << 'x';
    os << (factors_[i].kind == FactorKind::Sphere ? 'S' : 'R') << factors_[i].dim;
  }
  return os.str();
}

bool Manifold::is_euclidean() const {
  for (const auto& f : factors_) {
    if (f.kind != FactorKind::Euclidean) return false;
  }
  return true;
}

void Manifold::check_size(const VectorXd& v, int expected, const char* what) const {
  if (v.size() != expected) {
    std::ostringstream os;
    os << what << " has size " << v.size() << ", expected " << expected << " on " << tag();
    throw std::invalid_argument(os.str());
  }
}

double Manifold::distance(const Point& x, const Point& y) const {
  check_size(x, ambient_dim_, "point");
  check_size(y, ambient_dim_, "point");
  double sq = 0.0;
  int a = 0;
  for (const auto& f : factors_) {
    const int n = f.ambient_dim();
    const double d = f.kind == FactorKind::Sphere ? sphere_distance(x.segment(a, n), y.segment(a, n))
                                                  : (x.segment(a, n) - y.segment(a, n)).norm();
    if (factors_.size() == 1) return d;
    sq += d * d;
    a += n;
  }
  return std::sqrt(sq);
}

Point Manifold::exp(const Point& x, const Tangent& u) const {
  check_size(x, ambient_dim_, "point");
  check_size(u, dim_, "tangent");
  Point y(ambient_dim_);
  int a = 0, t = 0;
  for (const auto& f : factors_) {
    const int n = f.ambient_dim();
    if (f.kind == FactorKind::Sphere) {
      const VectorXd xs = x.segment(a, n);
      y.segment(a, n) = sphere_exp_ambient(xs, sphere_basis(xs) * u.segment(t, f.dim));
    } else {
      y.segment(a, n) = x.segment(a, n) + u.segment(t, f.dim);
    }
    a += n;
    t += f.dim;
  }
  return y;
}

Tangent Manifold::log(const Point& x, const Point& y) const {
  check_size(x, ambient_dim_, "point");
  check_size(y, ambient_dim_, "point");
  Tangent u(dim_);
  int a = 0, t = 0;
  for (const auto& f : factors_) {
    const int n = f.ambient_dim();
    if (f.kind == FactorKind::Sphere) {
      const VectorXd xs = x.segment(a, n);
      u.segment(t, f.dim) = sphere_basis(xs).transpose() * sphere_log_ambient(xs, y.segment(a, n));
    } else {
      u.segment(t, f.dim) = y.segment(a, n) - x.segment(a, n);
    }
    a += n;
    t += f.dim;
  }
  return u;
}

MatrixXd Manifold::transport_matrix(const Point& x, const Point& y) const {
  check_size(x, ambient_dim_, "point");
  check_size(y, ambient_dim_, "point");
  MatrixXd T = MatrixXd::Zero(dim_, dim_);
  int a = 0, t = 0;
  for (const auto& f : factors_) {
    const int n = f.ambient_dim();
    if (f.kind == FactorKind::Sphere) {
      const VectorXd xs = x.segment(a, n);
      const VectorXd ys = y.segment(a, n);
      T.block(t, t, f.dim, f.dim) =
          sphere_basis(ys).transpose() * sphere_transport_ambient(xs, ys) * sphere_basis(xs);
    } else {
      T.block(t, t, f.dim, f.dim).setIdentity();
    }
    a += n;
    t += f.dim;
  }
  return T;
}

Tangent Manifold::transport(const Point& x, const Point& y, const Tangent& v) const {
  check_size(v, dim_, "tangent");
  if (is_euclidean()) return v;
  return transport_matrix(x, y) * v;
}

MatrixXd Manifold::transport_spd(const Point& x, const Point& y, const MatrixXd& V) const {
  if (V.rows() != dim_ || V.cols() != dim_) {
    throw std::invalid_argument("transport_spd: matrix size does not match manifold dimension");
  }
  const double scale = std::max(1.0, V.cwiseAbs().maxCoeff());
  if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("transport_spd: matrix is not symmetric");
  }
  const MatrixXd T = transport_matrix(x, y);
  // square-root factor V = L L^T; transport the columns of L
  MatrixXd L;
  Eigen::LLT<MatrixXd> llt(V);
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (V + V.transpose()));
    L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  const MatrixXd TL = T * L;
  const MatrixXd out = TL * TL.transpose();
  return 0.5 * (out + out.transpose());
}

MatrixXd Manifold::tangent_basis(const Point& x) const {
  check_size(x, ambient_dim_, "point");
  MatrixXd B = MatrixXd::Zero(ambient_dim_, dim_);
  int a = 0, t = 0;
  for (const auto& f : factors_) {
    const int n = f.ambient_dim();
    if (f.kind == FactorKind::Sphere) {
      B.block(a, t, n, f.dim) = sphere_basis(x.segment(a, n));
    } else {
      B.block(a, t, n, f.dim).setIdentity();
    }
    a += n;
    t += f.dim;
  }
  return B;
}

Point Manifold::project(const Point& x) const {
  check_size(x, ambient_dim_, "point");
  Point y = x;
  int a = 0;
  for (const auto& f : factors_) {
    const int n = f.ambient_dim();
    if (f.kind == FactorKind::Sphere) {
      const double nrm = y.segment(a, n).norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw std::invalid_argument("cannot project a zero or non-finite vector onto a sphere");
      }
      y.segment(a, n) /= nrm;
    }
    a += n;
  }
  return y;
}

void Manifold::check_point(const Point& x, double tol) const {
  check_size(x, ambient_dim_, "point");
  if (!x.allFinite()) throw std::invalid_argument("point has non-finite coordinates");
  int a = 0;
  for (const auto& f : factors_) {
    const int n = f.ambient_dim();
    if (f.kind == FactorKind::Sphere && std::abs(x.segment(a, n).norm() - 1.0) > tol) {
      throw std::invalid_argument("sphere factor of point is not unit norm");
    }
    a += n;
  }
}

Point Manifold::random_point(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Point x(ambient_dim_);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
  return project(x);
}

Tangent Manifold::random_tangent(const Point& x, double scale, std::mt19937_64& rng) const {
  check_size(x, ambient_dim_, "point");
  if (!(scale > 0.0)) throw std::invalid_argument("random_tangent: scale must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  Tangent u(dim_);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = scale * normal(rng);
  return u;
}

}  // namespace rpromp
