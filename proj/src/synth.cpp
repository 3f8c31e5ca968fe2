#include "rpromp/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rpromp {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

double min_jerk(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

// Smooth per-demo offset c_0 / 2 + sum_k c_k sin(k pi s), evaluated on demand.
class SmoothOffset {
 public:
  SmoothOffset(int dim, double scale, std::mt19937_64& rng) : coeffs_(dim, 4) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < dim; ++i) coeffs_(i, k) = scale * normal(rng);
    }
  }
  VectorXd operator()(double s) const {
    Eigen::Vector4d b(0.5, std::sin(kPi * s), std::sin(2.0 * kPi * s), std::sin(3.0 * kPi * s));
    return coeffs_ * b;
  }

 private:
  MatrixXd coeffs_;
};

void check_options(const SynthOptions& o) {
  if (o.demos < 1) throw std::invalid_argument("synth: demos must be >= 1");
  if (o.samples < 4) throw std::invalid_argument("synth: samples must be >= 4");
  if (!(o.duration > 0.0)) throw std::invalid_argument("synth: duration must be positive");
  if (!(o.noise >= 0.0)) throw std::invalid_argument("synth: noise must be nonnegative");
  if (!(o.radius > 0.0)) throw std::invalid_argument("synth: radius must be positive");
}

VectorXd demo_times(const SynthOptions& o, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double jitter = o.noise > 0.0 ? std::max(0.5, 1.0 + o.noise * normal(rng)) : 1.0;
  return VectorXd::LinSpaced(o.samples, 0.0, o.duration * jitter);
}

Point north_exp(const Vector2d& u) {
  const double r = u.norm();
  if (r >= kPi) throw std::invalid_argument("lift_2d: scaled curve reaches radius pi");
  Point x(3);
  if (r < 1e-15) {
    x << 0.0, 0.0, 1.0;
    return x;
  }
  const double s = std::sin(r) / r;
  x << s * u(0), s * u(1), std::cos(r);
  return x / x.norm();
}

struct Placement {
  Vector2d center;
  double factor;
};

Placement place(const MatrixXd& curve, double radius, std::optional<double> scale) {
  if (curve.rows() < 2 || curve.cols() != 2) throw std::invalid_argument("lift_2d: need a T x 2 curve with T >= 2");
  if (!curve.allFinite()) throw std::invalid_argument("lift_2d: curve has non-finite entries");
  const Vector2d lo = curve.colwise().minCoeff();
  const Vector2d hi = curve.colwise().maxCoeff();
  Placement pl{0.5 * (lo + hi), 1.0};
  const double extent = (curve.rowwise() - pl.center.transpose()).rowwise().norm().maxCoeff();
  if (scale) {
    if (!(*scale > 0.0)) throw std::invalid_argument("lift_2d: scale must be positive");
    pl.factor = *scale;
  } else {
    if (!(extent > 0.0)) throw std::invalid_argument("lift_2d: curve has zero extent");
    pl.factor = radius / extent;
  }
  if (extent * pl.factor >= kPi) throw std::invalid_argument("lift_2d: scaled curve reaches radius pi");
  return pl;
}

Eigen::Quaterniond rotvec(const Vector3d& v) {
  const double a = v.norm();
  if (a < 1e-15) return Eigen::Quaterniond::Identity();
  return Eigen::Quaterniond(Eigen::AngleAxisd(a, v / a));
}

Point pose(const Vector3d& pos, const Eigen::Quaterniond& q) {
  Point x(7);
  Eigen::Quaterniond n = q.normalized();
  x << pos, n.w(), n.x(), n.y(), n.z();
  return x;
}

// Shared driver of the two pose skills.
template <class Nominal>
SynthDataset pose_skill(const SynthOptions& o, Nominal nominal) {
  check_options(o);
  std::mt19937_64 rng(o.seed);
  SynthDataset out{Manifold::parse("R3xS3"), {}};
  for (int n = 0; n < o.demos; ++n) {
    const VectorXd times = demo_times(o, rng);
    const SmoothOffset pos_noise(3, 0.2 * o.noise, rng);
    const SmoothOffset rot_noise(3, o.noise, rng);
    ManifoldDemo demo{times, {}};
    for (int t = 0; t < o.samples; ++t) {
      const double s = static_cast<double>(t) / (o.samples - 1);
      auto [p, q] = nominal(s);
      demo.points.push_back(pose(p + pos_noise(s), q * rotvec(rot_noise(s))));
    }
    out.demos.push_back(std::move(demo));
  }
  return out;
}

}  // namespace

Vector2d letter_point(char letter, double s) {
  s = std::clamp(s, 0.0, 1.0);
  switch (letter) {
    case 'I':
      return {0.0, 1.0 - 2.0 * s};
    case 'S': {
      if (s <= 0.5) {
        const double a = 1.5 * kPi * (s / 0.5);
        return {0.5 * std::cos(a), 0.5 + 0.5 * std::sin(a)};
      }
      const double a = 0.5 * kPi - 1.5 * kPi * ((s - 0.5) / 0.5);
      return {0.5 * std::cos(a), -0.5 + 0.5 * std::sin(a)};
    }
    case 'J': {
      // stem then hook, split by arc length
      const double stem = 1.5;
      const double hook = 0.4 * kPi;
      const double l = s * (stem + hook);
      if (l <= stem) return {0.4, 1.0 - l};
      const double a = -kPi * (l - stem) / hook;
      return {0.4 * std::cos(a), -0.5 + 0.4 * std::sin(a)};
    }
    case 'G': {
      const double arc = 1.75 * kPi;
      const double bar = 0.8;
      const double l = s * (arc + bar);
      if (l <= arc) {
        const double a = 0.25 * kPi + l;
        return {std::cos(a), std::sin(a)};
      }
      return {1.0 - (l - arc), 0.0};
    }
    default:
      throw std::invalid_argument(std::string("letter_point: unsupported letter '") + letter + "'");
  }
}

std::vector<Point> lift_2d(const MatrixXd& curve, double radius, std::optional<double> scale) {
  const Placement pl = place(curve, radius, scale);
  std::vector<Point> out;
  for (Eigen::Index t = 0; t < curve.rows(); ++t) {
    out.push_back(north_exp(pl.factor * (curve.row(t).transpose() - pl.center)));
  }
  return out;
}

SynthDataset synth_letter(const SynthOptions& o) {
  check_options(o);
  MatrixXd nominal(o.samples, 2);
  for (int t = 0; t < o.samples; ++t) nominal.row(t) = letter_point(o.letter, min_jerk(t / (o.samples - 1.0)));
  return synth_import(nominal, o);
}

SynthDataset synth_import(const MatrixXd& curve, const SynthOptions& o) {
  check_options(o);
  MatrixXd xy = curve;
  std::optional<VectorXd> given_times;
  if (curve.cols() == 3) {
    given_times = curve.col(0);
    xy = curve.rightCols(2);
  }
  const Placement pl = place(xy, o.radius, o.scale);
  std::mt19937_64 rng(o.seed);
  SynthDataset out{Manifold::sphere(2), {}};
  const auto T = xy.rows();
  for (int n = 0; n < o.demos; ++n) {
    VectorXd times = given_times ? *given_times : VectorXd::LinSpaced(T, 0.0, o.duration);
    if (o.noise > 0.0) {
      std::normal_distribution<double> normal(0.0, 1.0);
      times = (times.array() - times(0)) * std::max(0.5, 1.0 + o.noise * normal(rng)) + times(0);
    }
    const SmoothOffset offset(2, o.noise, rng);
    ManifoldDemo demo{times, {}};
    for (Eigen::Index t = 0; t < T; ++t) {
      const double s = static_cast<double>(t) / static_cast<double>(T - 1);
      demo.points.push_back(north_exp(pl.factor * (xy.row(t).transpose() - pl.center) + offset(s)));
    }
    out.demos.push_back(std::move(demo));
  }
  return out;
}

SynthDataset synth_reorient(const SynthOptions& o) {
  const double angle = o.angle_deg * kPi / 180.0;
  const Vector3d axis = Vector3d(0.3, 1.0, 0.2).normalized();
  const Vector3d a(0.4, -0.2, 0.3);
  const Vector3d b(0.6, 0.2, 0.5);
  const Eigen::Quaterniond q0(Eigen::AngleAxisd(0.3, Vector3d::UnitZ()));
  return pose_skill(o, [&](double s) {
    const double m = min_jerk(s);
    const Vector3d p = a + m * (b - a) + Vector3d(0.0, 0.0, 0.1 * std::sin(kPi * m));
    return std::pair{p, q0 * rotvec(angle * m * axis)};
  });
}

SynthDataset synth_keyturn(const SynthOptions& o) {
  const double angle = o.angle_deg * kPi / 180.0;
  const Vector3d start(0.5, 0.0, 0.35);
  const Vector3d lock(0.5, 0.0, 0.25);
  const Eigen::Quaterniond q0(Eigen::AngleAxisd(kPi, Vector3d::UnitX()));
  return pose_skill(o, [&](double s) {
    const double approach = min_jerk(s / 0.3);
    const double turn = min_jerk((s - 0.3) / 0.7);
    const Vector3d p = start + approach * (lock - start);
    return std::pair{p, q0 * rotvec(-angle * turn * Vector3d::UnitZ())};
  });
}

SynthDataset synthesize(const std::string& kind, const SynthOptions& options) {
  if (kind == "letter-curve") return synth_letter(options);
  if (kind == "reorient-like") return synth_reorient(options);
  if (kind == "key-turn-like") return synth_keyturn(options);
  throw std::invalid_argument("synthesize: unknown kind '" + kind + "'");
}

FullPoseDemo to_fullpose(const ManifoldDemo& demo) {
  FullPoseDemo out{demo.times, MatrixXd(static_cast<Eigen::Index>(demo.points.size()), 3), {}};
  for (std::size_t t = 0; t < demo.points.size(); ++t) {
    if (demo.points[t].size() != 7) throw std::invalid_argument("to_fullpose: expected 7-component pose samples");
    out.positions.row(static_cast<Eigen::Index>(t)) = demo.points[t].head<3>().transpose();
    out.rotations.push_back(demo.points[t].tail<4>());
  }
  return out;
}

ManifoldDemo orientation_part(const ManifoldDemo& demo) {
  ManifoldDemo out{demo.times, {}};
  for (const auto& x : demo.points) out.points.push_back(x.size() == 7 ? VectorXd(x.tail<4>()) : x);
  return out;
}

}  // namespace rpromp
