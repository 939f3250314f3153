#include "hierent/linalg.hpp"

#include <cmath>
#include <numbers>

#include "hierent/error.hpp"

namespace hierent {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace linalg {

Matrix orthonormalize(const Matrix& columns, Vector* r_diagonal) {
  const auto rows = columns.rows();
  const auto cols = columns.cols();
  Eigen::HouseholderQR<Matrix> qr(columns);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix& packed = qr.matrixQR();
  if (r_diagonal) r_diagonal->resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    double r = packed(j, j);
    if (r < 0.0) {
      q.col(j) = -q.col(j);
      r = -r;
    }
    if (r_diagonal) (*r_diagonal)(j) = r;
  }
  return q;
}

Matrix orthogonal_complement(const Matrix& basis) {
  const auto d = basis.rows();
  const auto k = basis.cols();
  if (k == d) return Matrix(d, 0);
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix full = qr.householderQ() * Matrix::Identity(d, d);
  return full.rightCols(d - k);
}

Matrix random_frame(int d, int k, Rng& rng) {
  Matrix m(d, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < d; ++i) m(i, j) = rng.normal();
  return orthonormalize(m);
}

double subspace_distance(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols() || a.rows() != b.rows())
    throw Error(ErrorKind::DimensionMismatch, "subspaces of different shape");
  if (a.cols() == 0) return 0.0;
  const Matrix residual = a - b * (b.transpose() * a);
  return largest_singular_value(residual);
}

double smallest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

double largest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix dominant_subspace(const Matrix& a, int k, int max_iterations) {
  const auto d = static_cast<int>(a.rows());
  if (k == 0) return Matrix(d, 0);
  if (k == d) return Matrix::Identity(d, d);
  // Deterministic start: a fixed pseudo-random frame.
  Rng rng(0x5eedULL);
  Matrix q = random_frame(d, k, rng);
  for (int it = 0; it < max_iterations; ++it) {
    Matrix next = orthonormalize(a * q);
    const double change = subspace_distance(next, q);
    q = std::move(next);
    if (change < 1e-15 && it > 8) break;
  }
  return q;
}

}  // namespace linalg
}  // namespace hierent
