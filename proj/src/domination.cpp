#include "hierent/domination.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

#include "hierent/error.hpp"
#include "hierent/parallel.hpp"

namespace hierent {

namespace {

constexpr int kSpotPoints = 10;
constexpr double kSubmultiplicativeSlack = 1e-9;

Vector random_point(int d, Rng& rng) {
  Vector x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.uniform();
  return x;
}

}  // namespace

Matrix jacobian_product(const TorusMap& map, const Vector& x, int N) {
  Matrix product = Matrix::Identity(map.dimension(), map.dimension());
  Vector p = x;
  for (int k = 0; k < N; ++k) {
    product = map.jacobian(p) * product;
    p = map.forward_lift(p);
  }
  return product;
}

double domination_ratio(const TorusMap& map, const Vector& base, const Matrix& f_basis, const Matrix& e_basis, int N) {
  if (N < 1) throw Error(ErrorKind::PreconditionViolated, "N must be >= 1");
  const Matrix j = jacobian_product(map, base, N);
  const double weakest = linalg::smallest_singular_value(j * f_basis);
  if (!(weakest > 1e-300)) throw Error(ErrorKind::Singular, "minimal norm on the fast bundle underflows");
  return linalg::largest_singular_value(j * e_basis) / weakest;
}

double domination_ratio(const TorusMap& map, const SplittingAtPoint& splitting, int N) {
  return domination_ratio(map, splitting.base.coords(), splitting.f_basis, splitting.e_basis, N);
}

DominationCertificate certify_domination(const TorusMap& map, int level, int fast_dim,
                                         const DominationOptions& options) {
  if (options.samples < 1) throw Error(ErrorKind::PreconditionViolated, "samples must be >= 1");
  if (options.n_max < 1) throw Error(ErrorKind::PreconditionViolated, "N_max must be >= 1");
  if (options.orbit_length < 1) throw Error(ErrorKind::PreconditionViolated, "orbit_length must be >= 1");
  const int d = map.dimension();
  if (fast_dim < 1 || fast_dim >= d) throw Error(ErrorKind::LevelOutOfRange, "fast bundle dimension out of range");

  const auto samples = static_cast<std::size_t>(options.samples);
  const long track_length = options.orbit_length + options.n_max;
  std::vector<SplittingTrack> tracks(samples);
  parallel_for(samples, options.jobs, [&](std::size_t s) {
    Rng rng(options.seed, stream::domination, s);
    const TorusPoint start(random_point(d, rng));
    tracks[s] = splitting_track(map, start, track_length, fast_dim, options.lead, rng.next());
  });

  for (int N = 1; N <= options.n_max; ++N) {
    std::vector<double> worst(samples, 0.0);
    std::vector<char> submultiplicative(samples, 1);
    parallel_for(samples, options.jobs, [&](std::size_t s) {
      const SplittingTrack& track = tracks[s];
      double w = 0.0;
      for (long j = 0; j < options.orbit_length; ++j) {
        const auto i = static_cast<std::size_t>(j);
        w = std::max(w, domination_ratio(map, track.points[i], track.fast[i], track.slow[i], N));
      }
      worst[s] = w;
      for (int j = 0; j < kSpotPoints && j + N < track_length; ++j) {
        const auto i = static_cast<std::size_t>(j);
        const auto k = static_cast<std::size_t>(j + N);
        const double r2 = domination_ratio(map, track.points[i], track.fast[i], track.slow[i], 2 * N);
        const double r_head = domination_ratio(map, track.points[i], track.fast[i], track.slow[i], N);
        const double r_tail = domination_ratio(map, track.points[k], track.fast[k], track.slow[k], N);
        if (r2 > r_head * r_tail + kSubmultiplicativeSlack) submultiplicative[s] = 0;
      }
    });
    const double overall = *std::max_element(worst.begin(), worst.end());
    if (overall <= 0.5) {
      DominationCertificate certificate;
      certificate.level = level;
      certificate.N = N;
      certificate.worst_ratio = overall;
      certificate.sample_count = options.samples;
      certificate.orbit_length = options.orbit_length;
      certificate.points_checked = options.samples * options.orbit_length;
      certificate.submultiplicative =
          std::all_of(submultiplicative.begin(), submultiplicative.end(), [](char ok) { return ok != 0; });
      return certificate;
    }
  }
  throw Error(ErrorKind::NotDominatedWithin, fmt::format("no N <= {} certifies level {}", options.n_max, level));
}

DominationCertificate certify_domination(const TorusMap& map, int level, const LyapunovSpectrum& spectrum,
                                         const DominationOptions& options) {
  return certify_domination(map, level, hierarchy_indices(spectrum, level).I_of_i, options);
}

}  // namespace hierent
