#pragma once

#include <cstdint>
#include <vector>

#include "hierent/systems.hpp"

namespace hierent {

struct Exponent {
  double value = 0.0;
  int multiplicity = 1;
};

struct LyapunovSpectrum {
  std::vector<Exponent> exponents;  // strictly decreasing
  std::vector<double> raw;          // per-direction exponents, descending
  double delta_star = 0.0;          // minimal gap between distinct exponents
  int u = 0;                        // number of positive distinct exponents
  int total_dim = 0;
  // Some adjacent raw gap fell within 10% of the clustering threshold.
  bool cluster_ambiguous = false;
};

struct SpectrumOptions {
  long steps = 100000;
  long transient = 1000;
  std::uint64_t seed = 1;
  double cluster_gap = 0.05;
};

// QR (Benettin) method, re-orthonormalizing every step.
LyapunovSpectrum lyapunov_spectrum(const TorusMap& map, const SpectrumOptions& options);

// Groups descending raw exponents whose consecutive gaps are below
// cluster_gap; exposed for testing the multiplicity rule directly.
LyapunovSpectrum cluster_spectrum(std::vector<double> raw, double cluster_gap);

struct HierarchyIndex {
  int u_of_i = 0;  // number of distinct exponents in the fast bundle
  int I_of_i = 0;  // fast bundle dimension
};

HierarchyIndex hierarchy_indices(const LyapunovSpectrum& spectrum, int level);

// Σ_{j ≤ u(i)} m_j λ_j for the given level.
double unstable_sum(const LyapunovSpectrum& spectrum, int level);

struct SplittingAtPoint {
  TorusPoint base;
  int level = 1;
  Matrix f_basis;  // d x I(i), fast bundle
  Matrix e_basis;  // d x (d - I(i)), slow bundle
};

struct SplittingOptions {
  long steps = 1000;
  std::uint64_t seed = 1;
  double convergence_tolerance = 1e-6;
};

// Fast bundle: a random frame pushed forward along f^{-steps}(x) -> x. Slow
// bundle: the same with f^{-1} along f^{steps}(x) -> x.
SplittingAtPoint oseledec_splitting(const TorusMap& map, const TorusPoint& point, int level, int fast_dim,
                                    const SplittingOptions& options);
SplittingAtPoint oseledec_splitting(const TorusMap& map, const TorusPoint& point, int level,
                                    const LyapunovSpectrum& spectrum, const SplittingOptions& options);

// Exact spectral subspaces of the constant cocycle of a linear map.
SplittingAtPoint linear_splitting(const TorusMap& map, const TorusPoint& point, int level, int fast_dim);

// Fast and slow frames along a stored orbit segment orbit[0..size). The fast
// frames are transported forward from `lead` points before orbit[0]; the slow
// frames backward from `lead` points after the last one. Every frame pair is
// computed on the same stored points, so the splitting is exactly
// Df-invariant along the stored sequence up to rounding.
struct SplittingTrack {
  std::vector<Vector> points;  // lifted orbit points (reduced mod 1)
  std::vector<Matrix> fast;
  std::vector<Matrix> slow;
};

SplittingTrack splitting_track(const TorusMap& map, const TorusPoint& start, long length, int fast_dim, long lead,
                               std::uint64_t seed);

// m(A) = ||A^{-1}||^{-1}, the smallest singular value.
double minimal_norm(const Matrix& matrix);

}  // namespace hierent
