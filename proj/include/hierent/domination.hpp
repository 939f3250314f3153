#pragma once

#include <cstdint>

#include "hierent/cocycle.hpp"

namespace hierent {

struct DominationCertificate {
  int level = 1;
  int N = 1;
  double worst_ratio = 0.0;
  int sample_count = 0;
  long orbit_length = 0;
  long points_checked = 0;
  // ratio_{2N}(x) <= ratio_N(x) ratio_N(f^N x) + 1e-9 held on the spot sample.
  bool submultiplicative = true;
};

struct DominationOptions {
  int samples = 100;
  long orbit_length = 1000;
  int n_max = 64;
  long lead = 200;
  std::uint64_t seed = 1;
  int jobs = 1;
};

// ||Df^N|_E|| / m(Df^N|_F) at the splitting's base point.
double domination_ratio(const TorusMap& map, const SplittingAtPoint& splitting, int N);
double domination_ratio(const TorusMap& map, const Vector& base, const Matrix& f_basis, const Matrix& e_basis, int N);

// Product Df(f^{N-1}x) ... Df(x) for lifted x.
Matrix jacobian_product(const TorusMap& map, const Vector& x, int N);

DominationCertificate certify_domination(const TorusMap& map, int level, int fast_dim, const DominationOptions& options);
DominationCertificate certify_domination(const TorusMap& map, int level, const LyapunovSpectrum& spectrum,
                                         const DominationOptions& options);

}  // namespace hierent
