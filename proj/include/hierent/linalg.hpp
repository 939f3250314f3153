#pragma once

#include <Eigen/Dense>

#include "hierent/rng.hpp"

namespace hierent {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace linalg {

// Thin QR with the sign convention diag(R) > 0; returns the orthonormal factor
// and writes the R diagonal into `r_diagonal` when non-null.
Matrix orthonormalize(const Matrix& columns, Vector* r_diagonal = nullptr);

// Orthonormal basis of the orthogonal complement of span(basis).
Matrix orthogonal_complement(const Matrix& basis);

// Random d x k matrix with orthonormal columns.
Matrix random_frame(int d, int k, Rng& rng);

// sin of the largest principal angle between two subspaces of equal dimension.
double subspace_distance(const Matrix& a, const Matrix& b);

double smallest_singular_value(const Matrix& m);
double largest_singular_value(const Matrix& m);

// Dominant k-dimensional invariant subspace of a constant matrix by
// orthogonal iteration; requires a modulus gap after the k-th eigenvalue.
Matrix dominant_subspace(const Matrix& a, int k, int max_iterations = 2000);

}  // namespace linalg
}  // namespace hierent
