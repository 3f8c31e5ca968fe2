#pragma once

#include <Eigen/Dense>

#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace rpromp {

/// Points are stored in ambient coordinates (unit vectors for sphere factors).
using Point = Eigen::VectorXd;

/// Tangent vectors are stored in intrinsic coordinates, i.e. as coefficients
/// against the deterministic orthonormal basis returned by
/// Manifold::tangent_basis() at the base point.
using Tangent = Eigen::VectorXd;

/// Sphere factors reject pairs with x.y below -1 + kAntipodalTol.
inline constexpr double kAntipodalTol = 1e-8;

/// Tangent norms below this are treated as zero in exp/transport.
inline constexpr double kTinyNorm = 1e-12;

enum class FactorKind { Euclidean, Sphere };

struct Factor {
  FactorKind kind;
  int dim;  // intrinsic dimension

  int ambient_dim() const { return kind == FactorKind::Sphere ? dim + 1 : dim; }
  bool operator==(const Factor&) const = default;
};

/// Euclidean space R^n, sphere S^m, or a flat product of those.
///
/// A non-product manifold is a product with a single factor. All operations
/// on a product act factor-wise and concatenate, so R^3 x S^3 has ambient
/// dimension 7 and intrinsic dimension 6.
class Manifold {
 public:
  static Manifold euclidean(int n);
  static Manifold sphere(int m);
  static Manifold product(const std::vector<Manifold>& parts);

  /// Parses tags such as "R3", "S2", "S3" and "R3xS3".
  static Manifold parse(std::string_view tag);

  std::string tag() const;
  const std::vector<Factor>& factors() const { return factors_; }
  int dim() const { return dim_; }
  int ambient_dim() const { return ambient_dim_; }
  bool is_euclidean() const;
  bool operator==(const Manifold& other) const { return factors_ == other.factors_; }

  double distance(const Point& x, const Point& y) const;
  Point exp(const Point& x, const Tangent& u) const;
  Tangent log(const Point& x, const Point& y) const;
  Tangent transport(const Point& x, const Point& y, const Tangent& v) const;

  /// Matrix T with transport(x, y, v) == T * v. Orthogonal.
  Eigen::MatrixXd transport_matrix(const Point& x, const Point& y) const;

  /// Transports a symmetric positive semidefinite matrix expressed in the
  /// intrinsic coordinates at x to those at y, by transporting the columns of
  /// a square-root factor.
  Eigen::MatrixXd transport_spd(const Point& x, const Point& y, const Eigen::MatrixXd& V) const;

  /// ambient_dim x dim matrix with orthonormal columns spanning T_x M.
  Eigen::MatrixXd tangent_basis(const Point& x) const;

  /// Ambient representation of an intrinsic tangent vector.
  Eigen::VectorXd to_ambient(const Point& x, const Tangent& u) const {
    return tangent_basis(x) * u;
  }

  /// Renormalizes sphere factors. Throws on a zero-norm factor.
  Point project(const Point& x) const;

  /// Throws std::invalid_argument if x is not a point of this manifold
  /// (wrong size, or a sphere factor off unit norm by more than tol).
  void check_point(const Point& x, double tol = 1e-9) const;

  Point random_point(std::mt19937_64& rng) const;
  Tangent random_tangent(const Point& x, double scale, std::mt19937_64& rng) const;

 private:
  explicit Manifold(std::vector<Factor> factors);
  void check_size(const Eigen::VectorXd& v, int expected, const char* what) const;

  std::vector<Factor> factors_;
  int dim_ = 0;
  int ambient_dim_ = 0;
};

}  // namespace rpromp
