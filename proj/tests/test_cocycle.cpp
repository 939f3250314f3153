#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "hierent/cocycle.hpp"
#include "hierent/error.hpp"

using namespace hierent;

namespace {

const double kLogGolden = std::log((3.0 + std::sqrt(5.0)) / 2.0);

// Benettin with classical Gram-Schmidt, independent of the library QR.
std::vector<double> gram_schmidt_exponents(const TorusMap& map, Vector x, int steps) {
  const int d = map.dimension();
  Matrix q = Matrix::Identity(d, d);
  std::vector<double> sums(static_cast<std::size_t>(d), 0.0);
  for (int n = 0; n < steps; ++n) {
    Matrix v = map.jacobian(x) * q;
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < j; ++i) v.col(j) -= v.col(i).dot(v.col(j)) * v.col(i);
      const double norm = v.col(j).norm();
      v.col(j) /= norm;
      sums[static_cast<std::size_t>(j)] += std::log(norm);
    }
    q = v;
    x = reduce_mod1(map.forward_lift(x));
  }
  for (double& s : sums) s /= steps;
  std::sort(sums.begin(), sums.end(), std::greater<>());
  return sums;
}

}  // namespace

TEST(Cocycle, CatSpectrumAnalytic) {
  const TorusMap cat = make_linear_system(catalog::cat_matrix());
  const LyapunovSpectrum s = lyapunov_spectrum(cat, {10000, 1000, 1, 0.05});
  ASSERT_EQ(s.exponents.size(), 2u);
  EXPECT_NEAR(s.exponents[0].value, kLogGolden, 1e-3);
  EXPECT_NEAR(s.exponents[1].value, -kLogGolden, 1e-3);
  EXPECT_EQ(s.u, 1);
  EXPECT_NEAR(s.delta_star, 2 * kLogGolden, 1e-3);
  const HierarchyIndex h = hierarchy_indices(s, 1);
  EXPECT_EQ(h.u_of_i, 1);
  EXPECT_EQ(h.I_of_i, 1);
}

TEST(Cocycle, BlockSpectrumAndHierarchy) {
  const TorusMap block = make_linear_system(catalog::block_matrix());
  const LyapunovSpectrum s = lyapunov_spectrum(block, {10000, 1000, 1, 0.05});
  ASSERT_EQ(s.exponents.size(), 4u);
  const double expected[] = {2 * kLogGolden, kLogGolden, -kLogGolden, -2 * kLogGolden};
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(s.exponents[static_cast<std::size_t>(j)].value, expected[j], 1e-3);
  EXPECT_EQ(s.u, 2);
  EXPECT_EQ(hierarchy_indices(s, 1).I_of_i, 2);
  EXPECT_EQ(hierarchy_indices(s, 2).I_of_i, 1);
  EXPECT_NEAR(unstable_sum(s, 1), 3 * kLogGolden, 2e-3);
  EXPECT_NEAR(unstable_sum(s, 2), 2 * kLogGolden, 2e-3);
  EXPECT_THROW(hierarchy_indices(s, 3), Error);
  EXPECT_THROW(hierarchy_indices(s, 0), Error);
}

TEST(Cocycle, PerturbedMatchesGramSchmidtOracle) {
  const TorusMap f = make_perturbed_system(catalog::cat_matrix(), 0.05);
  const LyapunovSpectrum s = lyapunov_spectrum(f, {100000, 1000, 1, 0.05});
  ASSERT_EQ(s.exponents.size(), 2u);
  EXPECT_LE(std::abs(s.exponents[0].value + s.exponents[1].value), 1e-3);
  Vector x(2);
  x << 0.3141, 0.2718;
  const std::vector<double> oracle = gram_schmidt_exponents(f, x, 100000);
  EXPECT_NEAR(s.exponents[0].value, oracle[0], 5e-3);
  EXPECT_NEAR(s.exponents[1].value, oracle[1], 5e-3);
}

TEST(Cocycle, InverseSpectrumIsNegated) {
  const TorusMap f = make_perturbed_system(catalog::cat_matrix(), 0.05);
  const TorusMap block = make_linear_system(catalog::block_matrix());
  for (const TorusMap* map : {&f, &block}) {
    const LyapunovSpectrum fwd = lyapunov_spectrum(*map, {20000, 500, 3, 0.05});
    // Inverse cocycle via the Jacobian of f^{-1}: run Gram-Schmidt backwards.
    const int d = map->dimension();
    Matrix q = Matrix::Identity(d, d);
    Vector x = Vector::Constant(d, 0.123);
    std::vector<double> sums(static_cast<std::size_t>(d), 0.0);
    const int steps = 20000;
    for (int n = 0; n < steps; ++n) {
      Matrix v = map->inverse_jacobian(x) * q;
      for (int j = 0; j < d; ++j) {
        for (int i = 0; i < j; ++i) v.col(j) -= v.col(i).dot(v.col(j)) * v.col(i);
        const double norm = v.col(j).norm();
        v.col(j) /= norm;
        sums[static_cast<std::size_t>(j)] += std::log(norm) / steps;
      }
      q = v;
      x = reduce_mod1(map->inverse_lift(x));
    }
    std::sort(sums.begin(), sums.end());
    for (int j = 0; j < d; ++j) EXPECT_NEAR(fwd.raw[static_cast<std::size_t>(j)], -sums[static_cast<std::size_t>(j)], 5e-3);
  }
}

TEST(Cocycle, SeedRobustness) {
  const TorusMap f = make_perturbed_system(catalog::cat_matrix(), 0.05);
  const LyapunovSpectrum a = lyapunov_spectrum(f, {50000, 1000, 1, 0.05});
  const LyapunovSpectrum b = lyapunov_spectrum(f, {50000, 1000, 99, 0.05});
  EXPECT_NEAR(a.exponents[0].value, b.exponents[0].value, 1e-2);
  const LyapunovSpectrum c = lyapunov_spectrum(f, {50000, 1000, 1, 0.05});
  EXPECT_EQ(a.raw, c.raw);
}

TEST(Cocycle, ClusterRule) {
  const LyapunovSpectrum s = cluster_spectrum({0.5, 1.0, 1.01, -1.0, -1.02}, 0.05);
  ASSERT_EQ(s.exponents.size(), 3u);
  EXPECT_EQ(s.exponents[0].multiplicity, 2);
  EXPECT_NEAR(s.exponents[0].value, 1.005, 1e-12);
  EXPECT_EQ(s.exponents[1].multiplicity, 1);
  EXPECT_EQ(s.exponents[2].multiplicity, 2);
  EXPECT_EQ(s.u, 2);
  EXPECT_NEAR(s.delta_star, 0.505, 1e-12);
  EXPECT_FALSE(s.cluster_ambiguous);
  EXPECT_TRUE(cluster_spectrum({1.0, 0.952, -2.0}, 0.05).cluster_ambiguous);
  EXPECT_TRUE(std::isinf(cluster_spectrum({0.3, 0.29}, 0.05).delta_star));
}

TEST(Cocycle, Preconditions) {
  const TorusMap cat = make_linear_system(catalog::cat_matrix());
  EXPECT_THROW(lyapunov_spectrum(cat, {999, 0, 1, 0.05}), Error);
  const LyapunovSpectrum empty = cluster_spectrum({-0.1, -0.5}, 0.05);
  try {
    hierarchy_indices(empty, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LevelOutOfRange);
  }
}

TEST(Cocycle, LinearSplittingMatchesEigenvectors) {
  const TorusMap cat = make_linear_system(catalog::cat_matrix());
  const TorusPoint x{0.2, 0.7};
  const SplittingAtPoint lin = linear_splitting(cat, x, 1, 1);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  Matrix unstable(2, 1), stable(2, 1);
  unstable << golden, 1.0;
  stable << -1.0, golden;
  EXPECT_LT(linalg::subspace_distance(lin.f_basis, linalg::orthonormalize(unstable)), 1e-10);
  EXPECT_LT(linalg::subspace_distance(lin.e_basis, linalg::orthonormalize(stable)), 1e-10);
  const SplittingAtPoint ose = oseledec_splitting(cat, x, 1, 1, SplittingOptions{});
  EXPECT_LT(linalg::subspace_distance(ose.f_basis, lin.f_basis), 1e-8);
  EXPECT_LT(linalg::subspace_distance(ose.e_basis, lin.e_basis), 1e-8);
}

TEST(Cocycle, OseledecSplittingIsInvariant) {
  const TorusMap f = make_perturbed_system(catalog::cat_matrix(), 0.05);
  const TorusPoint x{0.41, 0.13};
  const SplittingAtPoint at_x = oseledec_splitting(f, x, 1, 1, SplittingOptions{});
  const TorusPoint fx = step(f, x, Direction::forward);
  const SplittingAtPoint at_fx = oseledec_splitting(f, fx, 1, 1, SplittingOptions{});
  const Matrix df = f.jacobian(x.coords());
  EXPECT_LT(linalg::subspace_distance(linalg::orthonormalize(df * at_x.f_basis), at_fx.f_basis), 1e-8);
  EXPECT_LT(linalg::subspace_distance(linalg::orthonormalize(df * at_x.e_basis), at_fx.e_basis), 1e-8);
  EXPECT_GT(linalg::subspace_distance(at_x.f_basis, at_x.e_basis), 0.1);
}

TEST(Cocycle, BlockSplittingLevels) {
  const TorusMap block = make_linear_system(catalog::block_matrix());
  const TorusPoint x{0.1, 0.2, 0.3, 0.4};
  for (int fast_dim : {1, 2}) {
    const SplittingAtPoint ose = oseledec_splitting(block, x, 3 - fast_dim, fast_dim, SplittingOptions{});
    const SplittingAtPoint lin = linear_splitting(block, x, 3 - fast_dim, fast_dim);
    EXPECT_LT(linalg::subspace_distance(ose.f_basis, lin.f_basis), 1e-8);
    EXPECT_LT(linalg::subspace_distance(ose.e_basis, lin.e_basis), 1e-8);
  }
}

TEST(Cocycle, MinimalNorm) {
  Matrix a(2, 2);
  a << 3, 0, 0, 0.5;
  EXPECT_NEAR(minimal_norm(a), 0.5, 1e-14);
  Matrix r(2, 2);
  r << 2, 1, 1, 1;
  EXPECT_NEAR(minimal_norm(r), (3.0 - std::sqrt(5.0)) / 2.0, 1e-14);
  EXPECT_THROW(minimal_norm(Matrix::Zero(2, 2)), Error);
}
