#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hierent/entropy.hpp"
#include "hierent/error.hpp"
#include "orbit_block.hpp"

namespace hierent {

namespace {

int default_per_shell(int leaf_dim) { return leaf_dim == 1 ? 512 : 64; }

}  // namespace

BowenProfile bowen_profile(const TorusMap& map, const LeafPatch& patch, const std::vector<double>& epsilons,
                           int n_max, const BowenOptions& options) {
  if (n_max < 1) throw Error(ErrorKind::PreconditionViolated, "n must be >= 1");
  if (epsilons.empty()) throw Error(ErrorKind::PreconditionViolated, "no epsilon given");
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw Error(ErrorKind::PreconditionViolated, "epsilon must be positive");
    if (eps >= patch.radius)
      throw Error(ErrorKind::EpsilonTooLarge, fmt::format("epsilon {} >= patch radius {}", eps, patch.radius));
  }
  const int k = patch.leaf_dim();
  const std::size_t ne = epsilons.size();

  BowenProfile profile;
  profile.epsilons = epsilons;
  profile.n_max = n_max;
  profile.volume.assign(ne, std::vector<double>(static_cast<std::size_t>(n_max), 0.0));

  if (patch.kind == PatchKind::affine && !options.force_quadrature) {
    const Matrix restricted = patch.f_basis.transpose() * map.jacobian(patch.origin) * patch.f_basis;
    // When A|_F never shrinks a vector the last constraint implies all others.
    if (linalg::smallest_singular_value(restricted) >= 1.0 - 1e-12) {
      const double det = std::abs(restricted.determinant());
      for (std::size_t e = 0; e < ne; ++e)
        for (int n = 1; n <= n_max; ++n)
          profile.volume[e][static_cast<std::size_t>(n - 1)] = ball_volume(k, epsilons[e]) / std::pow(det, n - 1);
      profile.patch_volume = ball_volume(k, patch.radius);
      profile.exact = true;
      return profile;
    }
  }

  const int per_shell = options.per_shell > 0 ? options.per_shell : default_per_shell(k);
  const Quadrature q = graded_quadrature(k, patch.radius, options.shells, per_shell);
  const double eps_max = *std::max_element(epsilons.begin(), epsilons.end());
  const double outer_band = patch.radius * (1.0 - 2.0 / per_shell);

  std::vector<std::size_t> inside;
  std::vector<double> weight;
  std::vector<Vector> start;
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vector w = q.node(i);
    const double element = q.weights[i] * patch.volume_element(w);
    total += element;
    const Vector v = patch.displacement(w);
    const double norm = v.norm();
    if (w.norm() >= outer_band && norm < eps_max)
      throw Error(ErrorKind::PatchTooSmall, "the epsilon ball reaches the patch boundary");
    if (norm < eps_max) {
      weight.push_back(element);
      start.push_back(v);
    }
  }
  profile.patch_volume = total;
  profile.exact = false;
  profile.comparability = patch.kind == PatchKind::graph ? std::sqrt(1.0 + patch.dispersion * patch.dispersion) : 1.0;

  const int d = map.dimension();
  detail::DisplacementArrays arrays(d, start.size());
  for (std::size_t i = 0; i < start.size(); ++i)
    for (int c = 0; c < d; ++c) arrays.coords[static_cast<std::size_t>(c)][i] = start[i](c);

  std::vector<std::vector<int>> survival(ne, std::vector<int>(start.size(), kernels::kAlive));
  const detail::BaseOrbit orbit(map, patch.origin, n_max - 1);
  for (int step = 0; step < n_max; ++step) {
    if (step > 0) orbit.advance(step - 1, arrays);
    for (std::size_t e = 0; e < ne; ++e)
      kernels::mark_ball_exits(arrays.block(), epsilons[e] * epsilons[e], step, survival[e].data());
  }

  for (std::size_t e = 0; e < ne; ++e) {
    for (int n = 1; n <= n_max; ++n) {
      double sum = 0.0;
      for (std::size_t i = 0; i < weight.size(); ++i)
        if (survival[e][i] >= n) sum += weight[i];
      profile.volume[e][static_cast<std::size_t>(n - 1)] = sum;
    }
  }
  return profile;
}

BowenBallRecord bowen_ball_volume(const TorusMap& map, const LeafPatch& patch, int n, double epsilon,
                                  const BowenOptions& options) {
  const BowenProfile profile = bowen_profile(map, patch, {epsilon}, n, options);
  BowenBallRecord record;
  record.base = patch.base;
  record.level = patch.level;
  record.n = n;
  record.epsilon = epsilon;
  record.volume = profile.volume[0][static_cast<std::size_t>(n - 1)];
  record.exact = profile.exact;
  record.comparability = profile.comparability;
  return record;
}

}  // namespace hierent
