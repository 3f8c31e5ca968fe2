#include "doctest.h"

#include "rpromp/baselines.hpp"
#include "rpromp/metrics.hpp"
#include "rpromp/synth.hpp"

#include <numbers>
#include <random>

using namespace rpromp;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::Vector4d;
using Eigen::VectorXd;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("euler conversions") {
  CHECK(quat_to_euler(Vector4d(1, 0, 0, 0)).ypr.norm() == 0.0);
  const Vector4d yaw90(std::cos(kPi / 4), 0, 0, std::sin(kPi / 4));
  CHECK((quat_to_euler(yaw90).ypr - Vector3d(kPi / 2, 0, 0)).norm() < 1e-15);
  const Manifold S3 = Manifold::sphere(3);
  std::mt19937_64 rng(21);
  int tested = 0;
  for (int k = 0; k < 10000; ++k) {
    const Vector4d q = S3.random_point(rng);
    const auto e = quat_to_euler(q);
    if (std::abs(std::abs(e.ypr(1)) - kPi / 2) < 1e-3) continue;
    const Vector4d back = euler_to_quat(e.ypr);
    CHECK(std::min((back - q).norm(), (back + q).norm()) < 1e-9);
    ++tested;
  }
  CHECK(tested > 9900);
  const auto lock = quat_to_euler(euler_to_quat(Vector3d(0.4, kPi / 2, 0.0)));
  CHECK(lock.gimbal_lock);
  CHECK(lock.ypr(2) == 0.0);
}

TEST_CASE("angle unwrapping keeps steps in (-pi, pi]") {
  MatrixXd a(4, 1);
  a << 3.0, -3.0, 3.1, -3.1;
  const MatrixXd u = unwrap_angles(a);
  for (int k = 1; k < 4; ++k) CHECK(std::abs(u(k, 0) - u(k - 1, 0)) <= kPi);
  CHECK(u(1, 0) == doctest::Approx(-3.0 + 2 * kPi));
}

TEST_CASE("jerkiness") {
  const VectorXd t = VectorXd::LinSpaced(20, 0.0, 1.9);
  CHECK(jerkiness(MatrixXd::Constant(20, 4, 0.5), t) == 0.0);
  MatrixXd cubic(20, 1);
  cubic.col(0) = t.array().cube().matrix();
  // third difference of t^3 with step dt is 6 dt^3, so jerk is 6 everywhere
  CHECK(jerkiness(cubic, t) == doctest::Approx(36.0 * 17 * 0.1).epsilon(1e-9));
  MatrixXd path(20, 4);
  for (int k = 0; k < 20; ++k) path.row(k) << std::cos(0.1 * k * k), std::sin(0.1 * k), 0.3 * k, 0.0;
  CHECK(jerkiness(path, 2.0 * t) == doctest::Approx(std::pow(2.0, -5) * jerkiness(path, t)).epsilon(1e-12));
  VectorXd bad = t;
  bad(5) += 0.01;
  CHECK_THROWS_AS(jerkiness(path, bad), std::invalid_argument);
  CHECK_THROWS_AS(jerkiness(MatrixXd(path.topRows(3)), VectorXd(t.head(3))), std::invalid_argument);
}

TEST_CASE("tracking and deviation") {
  const Manifold S3 = Manifold::sphere(3);
  const Vector4d a(1, 0, 0, 0);
  const Vector4d b(std::cos(0.2), std::sin(0.2), 0, 0);
  const std::vector<Point> traj{a, a, b, a};
  const VectorXd z = uniform_phases(4);
  CHECK(tracking_accuracy(S3, traj, z, 0.6, b) == 0.0);
  CHECK(tracking_accuracy(S3, traj, z, 0.0, b) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(deviation_from_mean(S3, traj, traj) == 0.0);
  const std::vector<Point> flat{a, a, a, a};
  CHECK(deviation_from_mean(S3, traj, flat) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(deviation_from_mean(S3, traj, {a}), std::invalid_argument);
}

TEST_CASE("constant orientation: all approaches agree") {
  const Vector4d q = Vector4d(0.9, 0.1, -0.3, 0.2).normalized();
  std::vector<ManifoldDemo> demos;
  for (int n = 0; n < 3; ++n) demos.push_back({VectorXd::LinSpaced(40, 0.0, 2.0), std::vector<Point>(40, q)});
  const BasisConfig b = BasisConfig::uniform(10, 0.02);
  OrientationFitOptions ro;
  ro.require_convergence = false;
  const VectorXd z = uniform_phases(30);
  const auto r = mean_path(fit_orientation(Manifold::sphere(3), demos, b, ro), z);
  const auto e = mean_path(fit_euler(demos, b), z);
  const auto u = mean_path(fit_unitnorm(demos, b), z);
  for (int k = 0; k < 30; ++k) {
    CHECK((r[static_cast<std::size_t>(k)] - q).norm() < 1e-6);
    CHECK((e[static_cast<std::size_t>(k)] - q).norm() < 1e-6);
    CHECK((u[static_cast<std::size_t>(k)] - q).norm() < 1e-6);
  }
}

TEST_CASE("small rotations: all approaches agree locally") {
  SynthOptions so;
  so.angle_deg = 5.0;
  so.noise = 0.01;
  so.seed = 7;
  std::vector<ManifoldDemo> demos;
  for (const auto& d : synth_reorient(so).demos) demos.push_back(orientation_part(d));
  const BasisConfig b = BasisConfig::uniform(20, 0.02);
  OrientationFitOptions ro;
  ro.require_convergence = false;
  const Manifold S3 = Manifold::sphere(3);
  const VectorXd z = uniform_phases(40);
  const auto r = mean_path(fit_orientation(S3, demos, b, ro), z);
  const auto e = mean_path(fit_euler(demos, b), z);
  const auto u = mean_path(fit_unitnorm(demos, b), z);
  for (int k = 0; k < 40; ++k) {
    const auto i = static_cast<std::size_t>(k);
    CHECK(std::abs(e[i].norm() - 1.0) < 1e-9);
    CHECK(std::abs(u[i].norm() - 1.0) < 1e-9);
    CHECK(S3.distance(r[i], e[i]) < 1e-2);
    CHECK(S3.distance(r[i], u[i]) < 1e-2);
  }
}

TEST_CASE("large rotation: chord shrinkage and conditioning smoke") {
  SynthOptions so;
  so.seed = 1;
  std::vector<ManifoldDemo> demos;
  for (const auto& d : synth_reorient(so).demos) demos.push_back(orientation_part(d));
  const BasisConfig b = BasisConfig::uniform(40, 0.02);
  const auto unit = fit_unitnorm(demos, b);
  CHECK(raw_mean_norms(unit, uniform_phases(200)).minCoeff() < 1.0 - 1e-4);
  const auto euler = fit_euler(demos, b);
  const Vector4d target = mean_path(unit, VectorXd::Constant(1, 0.85)).front();
  const auto ec = condition(euler, 0.85, target, 1e-3);
  const auto uc = condition(unit, 0.85, target, 1e-3);
  CHECK(mean_path(ec, uniform_phases(10)).size() == 10);
  CHECK(mean_path(uc, uniform_phases(10)).size() == 10);
  const auto J = euler_jacobian(target);
  CHECK(std::abs(J.determinant()) > 0.5);
}
