#include "hierent/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hierent/error.hpp"

namespace hierent {

namespace {

constexpr double kUnderflow = 1e-300;

Vector random_point(int d, Rng& rng) {
  Vector x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.uniform();
  return x;
}

}  // namespace

LyapunovSpectrum cluster_spectrum(std::vector<double> raw, double cluster_gap) {
  if (!(cluster_gap > 0.0)) throw Error(ErrorKind::PreconditionViolated, "cluster_gap must be positive");
  std::sort(raw.begin(), raw.end(), std::greater<>());
  LyapunovSpectrum spectrum;
  spectrum.raw = raw;
  spectrum.total_dim = static_cast<int>(raw.size());

  std::size_t start = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const bool last = i + 1 == raw.size();
    if (!last) {
      const double gap = raw[i] - raw[i + 1];
      if (std::abs(gap - cluster_gap) <= 0.1 * cluster_gap) spectrum.cluster_ambiguous = true;
      if (gap < cluster_gap) continue;
    }
    double sum = 0.0;
    for (std::size_t j = start; j <= i; ++j) sum += raw[j];
    const auto count = static_cast<int>(i - start + 1);
    spectrum.exponents.push_back({sum / count, count});
    start = i + 1;
  }

  spectrum.delta_star = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < spectrum.exponents.size(); ++j)
    spectrum.delta_star =
        std::min(spectrum.delta_star, spectrum.exponents[j].value - spectrum.exponents[j + 1].value);
  spectrum.u = static_cast<int>(std::count_if(spectrum.exponents.begin(), spectrum.exponents.end(),
                                              [](const Exponent& e) { return e.value > 0.0; }));
  return spectrum;
}

LyapunovSpectrum lyapunov_spectrum(const TorusMap& map, const SpectrumOptions& options) {
  if (options.steps < 1000) throw Error(ErrorKind::PreconditionViolated, "steps must be >= 1000");
  if (options.transient < 0) throw Error(ErrorKind::PreconditionViolated, "transient must be >= 0");
  const int d = map.dimension();
  Rng rng(options.seed, stream::lyapunov);
  Vector x = random_point(d, rng);
  Matrix q = linalg::random_frame(d, d, rng);
  Vector r;
  Vector sums = Vector::Zero(d);

  const long total = options.transient + options.steps;
  for (long n = 0; n < total; ++n) {
    q = linalg::orthonormalize(map.jacobian(x) * q, &r);
    for (int j = 0; j < d; ++j) {
      if (!(r(j) > kUnderflow) || !std::isfinite(r(j)))
        throw Error(ErrorKind::DegenerateCocycle, fmt::format("R diagonal {} = {} at step {}", j, r(j), n));
    }
    if (n >= options.transient) sums += r.array().log().matrix();
    x = reduce_mod1(map.forward_lift(x));
  }

  std::vector<double> raw(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) raw[static_cast<std::size_t>(j)] = sums(j) / static_cast<double>(options.steps);
  return cluster_spectrum(std::move(raw), options.cluster_gap);
}

HierarchyIndex hierarchy_indices(const LyapunovSpectrum& spectrum, int level) {
  if (spectrum.u == 0) throw Error(ErrorKind::LevelOutOfRange, "no positive exponent: no unstable hierarchy");
  if (level < 1 || level > spectrum.u)
    throw Error(ErrorKind::LevelOutOfRange, fmt::format("level {} outside [1, {}]", level, spectrum.u));
  HierarchyIndex index;
  index.u_of_i = spectrum.u - level + 1;
  for (int j = 0; j < index.u_of_i; ++j) index.I_of_i += spectrum.exponents[static_cast<std::size_t>(j)].multiplicity;
  return index;
}

double unstable_sum(const LyapunovSpectrum& spectrum, int level) {
  const HierarchyIndex index = hierarchy_indices(spectrum, level);
  double sum = 0.0;
  for (int j = 0; j < index.u_of_i; ++j) {
    const auto& e = spectrum.exponents[static_cast<std::size_t>(j)];
    sum += e.multiplicity * e.value;
  }
  return sum;
}

namespace {

// Pushes `frame` forward along points[from .. to) (Jacobian at each point).
Matrix push_forward(const TorusMap& map, const std::vector<Vector>& points, std::size_t from, std::size_t to,
                    Matrix frame) {
  for (std::size_t j = from; j < to; ++j) frame = linalg::orthonormalize(map.jacobian(points[j]) * frame);
  return frame;
}

// Pushes `frame` backward: at each point p_j (from down to to+1) applies
// D(f^{-1})(p_j).
Matrix push_backward(const TorusMap& map, const std::vector<Vector>& points, std::size_t from, std::size_t to,
                     Matrix frame) {
  for (std::size_t j = from; j > to; --j) frame = linalg::orthonormalize(map.inverse_jacobian(points[j]) * frame);
  return frame;
}

}  // namespace

SplittingAtPoint oseledec_splitting(const TorusMap& map, const TorusPoint& point, int level, int fast_dim,
                                    const SplittingOptions& options) {
  const int d = map.dimension();
  if (point.dimension() != d) throw Error(ErrorKind::DimensionMismatch, "point dimension does not match map");
  if (options.steps < 1000) throw Error(ErrorKind::PreconditionViolated, "steps must be >= 1000");
  if (fast_dim < 1 || fast_dim >= d) throw Error(ErrorKind::LevelOutOfRange, "fast bundle dimension out of range");

  const auto steps = static_cast<std::size_t>(options.steps);
  const std::size_t short_steps = steps - steps / 10;

  // past[j] = f^{-j}(x) stored in reverse so that past[steps] is the oldest.
  std::vector<Vector> past(steps + 1);
  std::vector<Vector> future(steps + 1);
  past[0] = point.coords();
  future[0] = point.coords();
  for (std::size_t j = 1; j <= steps; ++j) {
    past[j] = reduce_mod1(map.inverse_lift(past[j - 1]));
    future[j] = reduce_mod1(map.forward_lift(future[j - 1]));
  }
  std::vector<Vector> forward_order(past.rbegin(), past.rend());  // f^{-steps}x, ..., x

  Rng rng(options.seed, stream::splitting);
  const Matrix f_seed = linalg::random_frame(d, fast_dim, rng);
  const Matrix e_seed = linalg::random_frame(d, d - fast_dim, rng);

  const Matrix fast = push_forward(map, forward_order, 0, steps, f_seed);
  const Matrix fast_short = push_forward(map, forward_order, steps - short_steps, steps, f_seed);
  const Matrix slow = push_backward(map, future, steps, 0, e_seed);
  const Matrix slow_short = push_backward(map, future, short_steps, 0, e_seed);

  const double drift = std::max(linalg::subspace_distance(fast, fast_short), linalg::subspace_distance(slow, slow_short));
  if (drift > options.convergence_tolerance)
    throw Error(ErrorKind::NonConvergent, fmt::format("frame iterates differ by {:.3e}", drift));

  return SplittingAtPoint{point, level, fast, slow};
}

SplittingAtPoint oseledec_splitting(const TorusMap& map, const TorusPoint& point, int level,
                                    const LyapunovSpectrum& spectrum, const SplittingOptions& options) {
  return oseledec_splitting(map, point, level, hierarchy_indices(spectrum, level).I_of_i, options);
}

SplittingAtPoint linear_splitting(const TorusMap& map, const TorusPoint& point, int level, int fast_dim) {
  if (!map.is_linear()) throw Error(ErrorKind::PreconditionViolated, "linear_splitting requires a linear map");
  const int d = map.dimension();
  if (fast_dim < 1 || fast_dim >= d) throw Error(ErrorKind::LevelOutOfRange, "fast bundle dimension out of range");
  const Matrix a = map.jacobian(point.coords());
  const Matrix a_inv = map.inverse_jacobian(point.coords());
  return SplittingAtPoint{point, level, linalg::dominant_subspace(a, fast_dim),
                          linalg::dominant_subspace(a_inv, d - fast_dim)};
}

SplittingTrack splitting_track(const TorusMap& map, const TorusPoint& start, long length, int fast_dim, long lead,
                               std::uint64_t seed) {
  const int d = map.dimension();
  if (length < 1 || lead < 0) throw Error(ErrorKind::PreconditionViolated, "invalid track length");
  const auto len = static_cast<std::size_t>(length);
  const auto pre = static_cast<std::size_t>(lead);

  // all[pre + j] = f^j(start) for j in [-lead, length + lead).
  std::vector<Vector> all(pre + len + pre);
  all[pre] = start.coords();
  for (std::size_t j = 1; j <= pre; ++j) all[pre - j] = reduce_mod1(map.inverse_lift(all[pre - j + 1]));
  for (std::size_t j = pre + 1; j < all.size(); ++j) all[j] = reduce_mod1(map.forward_lift(all[j - 1]));

  Rng rng(seed, stream::splitting);
  Matrix fast = linalg::random_frame(d, fast_dim, rng);
  Matrix slow = linalg::random_frame(d, d - fast_dim, rng);

  SplittingTrack track;
  track.points.assign(all.begin() + static_cast<std::ptrdiff_t>(pre),
                      all.begin() + static_cast<std::ptrdiff_t>(pre + len));
  track.fast.resize(len);
  track.slow.resize(len);

  fast = push_forward(map, all, 0, pre, fast);
  for (std::size_t j = 0; j < len; ++j) {
    track.fast[j] = fast;
    fast = linalg::orthonormalize(map.jacobian(all[pre + j]) * fast);
  }
  const std::size_t last = all.size() - 1;
  slow = push_backward(map, all, last, pre + len - 1, slow);
  for (std::size_t j = len; j-- > 0;) {
    track.slow[j] = slow;
    if (j > 0) slow = linalg::orthonormalize(map.inverse_jacobian(all[pre + j]) * slow);
  }
  return track;
}

double minimal_norm(const Matrix& matrix) {
  const double s = linalg::smallest_singular_value(matrix);
  if (s < 1e-14) throw Error(ErrorKind::Singular, fmt::format("smallest singular value {:.3e}", s));
  return s;
}

}  // namespace hierent
