#pragma once

#include <string>
#include <vector>

#include "hierent/linalg.hpp"

namespace hierent {

inline constexpr int kMaxDimension = 8;
inline constexpr double kHyperbolicityTolerance = 1e-9;
inline constexpr double kDefaultAmplitudeCap = 0.1;

// Point on the d-torus; coordinates always reduced to [0, 1).
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(Vector coords);
  TorusPoint(std::initializer_list<double> coords);

  int dimension() const noexcept { return static_cast<int>(coords_.size()); }
  const Vector& coords() const noexcept { return coords_; }
  double operator[](int i) const { return coords_(i); }

 private:
  Vector coords_;
};

// Reduce every coordinate into [0, 1).
Vector reduce_mod1(Vector x);

// Minimal representative of a displacement, each entry in [-1/2, 1/2].
Vector minimal_displacement(Vector delta);

double torus_distance(const TorusPoint& p, const TorusPoint& q);

enum class MapKind { linear, perturbed };
enum class Direction { forward, inverse };

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// Invertible torus map f = (A o s)^power with s a sine shear
// s(x) = x + amplitude * sin(2 pi x[read]) e[write].
//
// All "lift" methods act on the universal cover R^d: the lift commutes with
// integer translations up to the action of A, so differences of lifted points
// are meaningful displacements.
class TorusMap {
 public:
  int dimension() const noexcept { return dimension_; }
  MapKind kind() const noexcept { return kind_; }
  const IntMatrix& matrix() const noexcept { return matrix_; }
  const IntMatrix& inverse_matrix() const noexcept { return inverse_matrix_; }
  const Matrix& matrix_real() const noexcept { return a_; }
  double amplitude() const noexcept { return amplitude_; }
  int shear_read() const noexcept { return shear_read_; }
  int shear_write() const noexcept { return shear_write_; }
  // Number of base-map applications per step of this map.
  int power() const noexcept { return power_; }
  bool is_linear() const noexcept { return kind_ == MapKind::linear || amplitude_ == 0.0; }

  // f^m as a map in its own right (Jacobians chain-ruled along orbits).
  TorusMap iterate(int m) const;

  TorusPoint step(const TorusPoint& p, Direction direction) const;
  Vector forward_lift(const Vector& x) const;
  Vector inverse_lift(const Vector& x) const;

  Matrix jacobian(const Vector& x) const;
  // Jacobian of f^{-1} evaluated at x.
  Matrix inverse_jacobian(const Vector& x) const;

  // f(b + v) - f(b) evaluated without cancellation, for displacements of any
  // scale.
  Vector forward_displacement(const Vector& base, const Vector& v) const;

  // One base-map application (power ignored); building blocks for kernels.
  Vector base_forward_lift(const Vector& x) const;
  Matrix base_jacobian(const Vector& x) const;

  // |det Df(x)|.
  double jacobian_determinant(const Vector& x) const;

 private:
  friend TorusMap make_linear_system(const IntMatrix& matrix);
  friend TorusMap make_perturbed_system(const IntMatrix& matrix, double amplitude, double cap);

  int dimension_ = 0;
  MapKind kind_ = MapKind::linear;
  IntMatrix matrix_;
  IntMatrix inverse_matrix_;
  Matrix a_;
  Matrix a_inverse_;
  double amplitude_ = 0.0;
  int shear_read_ = 1;
  int shear_write_ = 0;
  int power_ = 1;
};

IntMatrix int_matrix(const std::vector<std::vector<long long>>& rows);

// Exact integer determinant (fraction-free elimination).
long long integer_determinant(const IntMatrix& m);

TorusMap make_linear_system(const IntMatrix& matrix);
TorusMap make_perturbed_system(const IntMatrix& matrix, double amplitude, double cap = kDefaultAmplitudeCap);

TorusPoint step(const TorusMap& map, const TorusPoint& p, Direction direction);

namespace catalog {
IntMatrix cat_matrix();
// diag(A^2, A) for the cat matrix A.
IntMatrix block_matrix();
}  // namespace catalog

}  // namespace hierent
