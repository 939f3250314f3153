#include "hierent/systems.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <numbers>

#include <fmt/format.h>

#include "hierent/error.hpp"

namespace hierent {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap01(double v) {
  double r = v - std::floor(v);
  // floor can round v - floor(v) up to exactly 1 for tiny negative v.
  if (r >= 1.0) r = 0.0;
  return r;
}

}  // namespace

TorusPoint::TorusPoint(Vector coords) : coords_(reduce_mod1(std::move(coords))) {}

TorusPoint::TorusPoint(std::initializer_list<double> coords) {
  coords_.resize(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) coords_(i++) = c;
  coords_ = reduce_mod1(std::move(coords_));
}

Vector reduce_mod1(Vector x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = wrap01(x(i));
  return x;
}

Vector minimal_displacement(Vector delta) {
  for (Eigen::Index i = 0; i < delta.size(); ++i) delta(i) -= std::nearbyint(delta(i));
  return delta;
}

double torus_distance(const TorusPoint& p, const TorusPoint& q) {
  if (p.dimension() != q.dimension())
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("points of dimension {} and {}", p.dimension(), q.dimension()));
  return minimal_displacement(p.coords() - q.coords()).norm();
}

IntMatrix int_matrix(const std::vector<std::vector<long long>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  IntMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n)
      throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

long long integer_determinant(const IntMatrix& input) {
  const auto n = static_cast<std::size_t>(input.rows());
  if (n == 0) return 1;
  std::vector<std::vector<__int128>> m(n, std::vector<__int128>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = input(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  __int128 sign = 1;
  __int128 previous = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / previous;
    previous = m[k][k];
  }
  return static_cast<long long>(sign * m[n - 1][n - 1]);
}

namespace {

using Poly = std::vector<__int128>;  // coefficients, lowest degree first

// Faddeev-LeVerrier in exact integer arithmetic: det(xI - A), monic.
Poly characteristic_polynomial(const IntMatrix& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  using Big = std::vector<std::vector<__int128>>;
  Big m(n, std::vector<__int128>(n, 0));
  Poly c(n + 1, 0);
  c[n] = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    Big next(n, std::vector<__int128>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l)
          next[i][j] += static_cast<__int128>(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l))) * m[l][j];
      next[i][i] += c[n - k + 1];
    }
    __int128 trace = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        trace += static_cast<__int128>(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l))) * next[l][i];
    c[n - k] = -trace / static_cast<__int128>(k);
    m = std::move(next);
  }
  return c;
}

// Remainder of p modulo a monic divisor.
Poly poly_mod(Poly p, const Poly& monic) {
  const std::size_t dm = monic.size() - 1;
  while (p.size() > dm && !p.empty()) {
    const __int128 lead = p.back();
    const std::size_t shift = p.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) p[shift + i] -= lead * monic[i];
    p.pop_back();
  }
  return p;
}

Poly poly_div(Poly p, const Poly& monic) {
  const std::size_t dm = monic.size() - 1;
  Poly q(p.size() - dm, 0);
  for (std::size_t s = q.size(); s-- > 0;) {
    q[s] = p[s + dm];
    for (std::size_t i = 0; i <= dm; ++i) p[s + i] -= q[s] * monic[i];
  }
  return q;
}

// Cyclotomic polynomials Phi_1 .. Phi_30; every n with phi(n) <= 8 is <= 30.
const std::vector<Poly>& cyclotomics() {
  static const std::vector<Poly> table = [] {
    std::vector<Poly> phi(31);
    for (std::size_t n = 1; n <= 30; ++n) {
      Poly p(n + 1, 0);
      p[0] = -1;
      p[n] = 1;
      for (std::size_t d = 1; d < n; ++d)
        if (n % d == 0) p = poly_div(p, phi[d]);
      phi[n] = p;
    }
    return phi;
  }();
  return table;
}

// A root of unity among the eigenvalues, detected exactly. These are the
// only eigenvalues of modulus one that can be repeated (and so defeat a
// floating-point modulus test); the others are simple roots of Salem factors.
bool has_root_of_unity(const IntMatrix& matrix) {
  const Poly p = characteristic_polynomial(matrix);
  const auto& phi = cyclotomics();
  for (std::size_t n = 1; n < phi.size(); ++n) {
    if (phi[n].size() > p.size()) continue;
    const Poly r = poly_mod(p, phi[n]);
    if (std::all_of(r.begin(), r.end(), [](__int128 v) { return v == 0; })) return true;
  }
  return false;
}

void validate_matrix(const IntMatrix& matrix) {
  const auto d = matrix.rows();
  if (d == 0 || matrix.cols() != d)
    throw Error(ErrorKind::DimensionMismatch, "matrix must be square and non-empty");
  if (d > kMaxDimension)
    throw Error(ErrorKind::DimensionMismatch, fmt::format("dimension {} exceeds {}", d, kMaxDimension));
  const long long det = integer_determinant(matrix);
  if (det != 1 && det != -1)
    throw Error(ErrorKind::NonUnimodular, fmt::format("matrix not unimodular (det = {})", det));
  if (has_root_of_unity(matrix)) throw Error(ErrorKind::NotHyperbolic, "eigenvalue is a root of unity");
  Eigen::EigenSolver<Matrix> solver(matrix.cast<double>(), false);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double modulus = std::abs(solver.eigenvalues()(i));
    if (std::abs(modulus - 1.0) <= kHyperbolicityTolerance)
      throw Error(ErrorKind::NotHyperbolic, fmt::format("eigenvalue of modulus {:.12g}", modulus));
  }
}

IntMatrix integer_inverse(const IntMatrix& matrix) {
  const auto d = matrix.rows();
  const Matrix inv = matrix.cast<double>().inverse();
  IntMatrix result(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) result(i, j) = std::llround(inv(i, j));
  if (matrix * result != IntMatrix::Identity(d, d))
    throw Error(ErrorKind::NonUnimodular, "integer inverse could not be formed");
  return result;
}

}  // namespace

TorusMap make_linear_system(const IntMatrix& matrix) {
  validate_matrix(matrix);
  TorusMap map;
  map.dimension_ = static_cast<int>(matrix.rows());
  map.kind_ = MapKind::linear;
  map.matrix_ = matrix;
  map.inverse_matrix_ = integer_inverse(matrix);
  map.a_ = matrix.cast<double>();
  map.a_inverse_ = map.inverse_matrix_.cast<double>();
  map.amplitude_ = 0.0;
  return map;
}

TorusMap make_perturbed_system(const IntMatrix& matrix, double amplitude, double cap) {
  if (matrix.rows() != 2)
    throw Error(ErrorKind::DimensionMismatch, "perturbed systems are two-dimensional");
  if (!(amplitude >= 0.0))
    throw Error(ErrorKind::PreconditionViolated, "amplitude must be non-negative");
  if (amplitude > cap)
    throw Error(ErrorKind::AmplitudeTooLarge, fmt::format("amplitude {} exceeds cap {}", amplitude, cap));
  TorusMap map = make_linear_system(matrix);
  map.kind_ = MapKind::perturbed;
  map.amplitude_ = amplitude;
  map.shear_read_ = 1;
  map.shear_write_ = 0;
  return map;
}

TorusMap TorusMap::iterate(int m) const {
  if (m < 1) throw Error(ErrorKind::PreconditionViolated, "power must be >= 1");
  TorusMap copy = *this;
  copy.power_ = power_ * m;
  return copy;
}

Vector TorusMap::base_forward_lift(const Vector& x) const {
  Vector sheared = x;
  if (amplitude_ != 0.0) sheared(shear_write_) += amplitude_ * std::sin(kTwoPi * x(shear_read_));
  return a_ * sheared;
}

Matrix TorusMap::base_jacobian(const Vector& x) const {
  if (amplitude_ == 0.0) return a_;
  Matrix shear = Matrix::Identity(dimension_, dimension_);
  shear(shear_write_, shear_read_) = kTwoPi * amplitude_ * std::cos(kTwoPi * x(shear_read_));
  return a_ * shear;
}

Vector TorusMap::forward_lift(const Vector& x) const {
  Vector y = x;
  for (int s = 0; s < power_; ++s) y = base_forward_lift(y);
  return y;
}

Vector TorusMap::inverse_lift(const Vector& x) const {
  Vector y = x;
  for (int s = 0; s < power_; ++s) {
    y = a_inverse_ * y;
    if (amplitude_ != 0.0) y(shear_write_) -= amplitude_ * std::sin(kTwoPi * y(shear_read_));
  }
  return y;
}

TorusPoint TorusMap::step(const TorusPoint& p, Direction direction) const {
  if (p.dimension() != dimension_)
    throw Error(ErrorKind::DimensionMismatch, "point dimension does not match map");
  return TorusPoint(direction == Direction::forward ? forward_lift(p.coords()) : inverse_lift(p.coords()));
}

TorusPoint step(const TorusMap& map, const TorusPoint& p, Direction direction) { return map.step(p, direction); }

Matrix TorusMap::jacobian(const Vector& x) const {
  Matrix j = Matrix::Identity(dimension_, dimension_);
  Vector y = x;
  for (int s = 0; s < power_; ++s) {
    j = base_jacobian(y) * j;
    if (s + 1 < power_) y = base_forward_lift(y);
  }
  return j;
}

Matrix TorusMap::inverse_jacobian(const Vector& x) const {
  Matrix j = Matrix::Identity(dimension_, dimension_);
  Vector y = x;
  for (int s = 0; s < power_; ++s) {
    Vector z = a_inverse_ * y;
    Matrix unshear = Matrix::Identity(dimension_, dimension_);
    if (amplitude_ != 0.0) {
      unshear(shear_write_, shear_read_) = -kTwoPi * amplitude_ * std::cos(kTwoPi * z(shear_read_));
      z(shear_write_) -= amplitude_ * std::sin(kTwoPi * z(shear_read_));
    }
    j = unshear * a_inverse_ * j;
    y = z;
  }
  return j;
}

Vector TorusMap::forward_displacement(const Vector& base, const Vector& v) const {
  Vector b = base;
  Vector w = v;
  for (int s = 0; s < power_; ++s) {
    if (amplitude_ != 0.0) {
      const double vr = w(shear_read_);
      // sin(2pi(b+v)) - sin(2pi b) = 2 sin(pi v) cos(2pi b + pi v)
      w(shear_write_) += 2.0 * amplitude_ * std::sin(std::numbers::pi * vr) *
                         std::cos(kTwoPi * b(shear_read_) + std::numbers::pi * vr);
    }
    w = a_ * w;
    if (s + 1 < power_) b = base_forward_lift(b);
  }
  return w;
}

double TorusMap::jacobian_determinant(const Vector& x) const { return std::abs(jacobian(x).determinant()); }

namespace catalog {

IntMatrix cat_matrix() { return int_matrix({{2, 1}, {1, 1}}); }

IntMatrix block_matrix() {
  return int_matrix({{5, 3, 0, 0}, {3, 2, 0, 0}, {0, 0, 2, 1}, {0, 0, 1, 1}});
}

}  // namespace catalog
}  // namespace hierent
