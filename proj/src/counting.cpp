#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include <fmt/format.h>

#include "hierent/domination.hpp"
#include "hierent/entropy.hpp"
#include "hierent/error.hpp"
#include "orbit_block.hpp"

namespace hierent {

namespace {

// Buckets candidates by the epsilon-cell of their time n - 1 position
// projected onto the leaf_dim principal directions of all time n - 1
// positions. Projection is 1-Lipschitz, so Bowen-close candidates always sit
// in adjacent cells, and only 3^leaf_dim cells are probed.
class CellHash {
 public:
  CellHash(const CandidateSet& candidates, int time, double cell)
      : candidates_(candidates), time_(time), k_(candidates.leaf_dim), inverse_cell_(1.0 / cell) {
    const int d = candidates.dim;
    Vector mean = Vector::Zero(d);
    Matrix scatter = Matrix::Zero(d, d);
    Vector x(d);
    for (std::size_t i = 0; i < candidates.count; ++i) {
      for (int c = 0; c < d; ++c) x(c) = candidates.coordinate(time, c, i);
      mean += x;
      scatter.noalias() += x * x.transpose();
    }
    if (candidates.count > 0) {
      mean /= static_cast<double>(candidates.count);
      scatter = scatter / static_cast<double>(candidates.count) - mean * mean.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(scatter);
    axes_ = solver.eigenvectors().rightCols(k_);
  }

  void insert(std::size_t i) { buckets_[key(cell_of(i))].push_back(static_cast<std::uint32_t>(i)); }

  // Calls fn(j) for every inserted j in the 3^leaf_dim block around i's cell.
  template <typename Fn>
  void for_neighbors(std::size_t i, Fn&& fn) const {
    const Cell center = cell_of(i);
    Cell probe{};
    int total = 1;
    for (int a = 0; a < k_; ++a) total *= 3;
    for (int code = 0; code < total; ++code) {
      int rest = code;
      for (int a = 0; a < k_; ++a) {
        probe[static_cast<std::size_t>(a)] = center[static_cast<std::size_t>(a)] + rest % 3 - 1;
        rest /= 3;
      }
      const auto found = buckets_.find(key(probe));
      if (found == buckets_.end()) continue;
      for (std::uint32_t j : found->second) fn(static_cast<std::size_t>(j));
    }
  }

 private:
  using Cell = std::array<long long, kMaxDimension>;

  Cell cell_of(std::size_t i) const {
    Cell cell{};
    for (int a = 0; a < k_; ++a) {
      double p = 0.0;
      for (int c = 0; c < candidates_.dim; ++c) p += axes_(c, a) * candidates_.coordinate(time_, c, i);
      cell[static_cast<std::size_t>(a)] = static_cast<long long>(std::floor(p * inverse_cell_));
    }
    return cell;
  }

  std::uint64_t key(const Cell& cell) const {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (int a = 0; a < k_; ++a) h = splitmix64(h ^ static_cast<std::uint64_t>(cell[static_cast<std::size_t>(a)]));
    return h;
  }

  const CandidateSet& candidates_;
  int time_;
  int k_;
  double inverse_cell_;
  Matrix axes_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

void check_resolution(const CandidateSet& candidates, int n, double epsilon) {
  if (n < 1 || n > candidates.n_max)
    throw Error(ErrorKind::PreconditionViolated, fmt::format("n = {} outside candidate horizon {}", n, candidates.n_max));
  if (!(epsilon > 0.0)) throw Error(ErrorKind::PreconditionViolated, "epsilon must be positive");
  if (candidates.spacing > epsilon / 10.0)
    throw Error(ErrorKind::ResolutionTooCoarse,
                fmt::format("candidate spacing {:.3e} > epsilon/10 = {:.3e}", candidates.spacing, epsilon / 10.0));
}

}  // namespace

double CandidateSet::bowen_distance(std::size_t a, std::size_t b, int n) const {
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    double d2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      const double diff = coordinate(k, c, a) - coordinate(k, c, b);
      d2 += diff * diff;
    }
    worst = std::max(worst, d2);
  }
  return std::sqrt(worst);
}

double bowen_resolution(const TorusMap& map, const LeafPatch& patch, int n_max, double epsilon) {
  const Matrix tangent = leaf_tangent(patch);
  const double growth = n_max > 1 ? linalg::largest_singular_value(jacobian_product(map, patch.origin, n_max - 1) *
                                                                   tangent)
                                  : 1.0;
  return 0.1 * epsilon / std::max(1.0, growth);
}

CandidateSet make_candidates(const TorusMap& map, const LeafPatch& patch, int n_max, double spacing,
                             std::size_t cap) {
  if (n_max < 1) throw Error(ErrorKind::PreconditionViolated, "n must be >= 1");
  if (!(spacing > 0.0)) throw Error(ErrorKind::PreconditionViolated, "spacing must be positive");
  const int k = patch.leaf_dim();
  const auto half = static_cast<long long>(std::floor(patch.radius / spacing));
  const double side = 2.0 * static_cast<double>(half) + 1.0;
  if (std::pow(side, k) * ball_volume(k, 1.0) / std::pow(2.0, k) > static_cast<double>(cap) ||
      std::pow(side, k) > 1e15)
    throw Error(ErrorKind::ResolutionTooCoarse,
                fmt::format("candidate grid with spacing {:.3e} exceeds the cap of {} points", spacing, cap));

  std::vector<Vector> w_list;
  std::vector<long long> index(static_cast<std::size_t>(k), -half);
  Vector w(k);
  for (;;) {
    for (int a = 0; a < k; ++a) w(a) = static_cast<double>(index[static_cast<std::size_t>(a)]) * spacing;
    if (w.norm() <= patch.radius) w_list.push_back(w);
    int a = k - 1;
    while (a >= 0 && ++index[static_cast<std::size_t>(a)] > half) index[static_cast<std::size_t>(a--)] = -half;
    if (a < 0) break;
  }
  if (w_list.size() > cap)
    throw Error(ErrorKind::ResolutionTooCoarse, fmt::format("{} candidates exceed the cap of {}", w_list.size(), cap));

  CandidateSet set;
  set.dim = map.dimension();
  set.leaf_dim = k;
  set.n_max = n_max;
  set.spacing = spacing;
  set.count = w_list.size();
  const auto d = static_cast<std::size_t>(set.dim);
  set.positions.resize(static_cast<std::size_t>(n_max) * d * set.count);

  detail::DisplacementArrays arrays(set.dim, set.count);
  for (std::size_t i = 0; i < set.count; ++i) {
    const Vector v = patch.displacement(w_list[i]);
    for (std::size_t c = 0; c < d; ++c) arrays.coords[c][i] = v(static_cast<Eigen::Index>(c));
  }
  const detail::BaseOrbit orbit(map, patch.origin, n_max - 1);
  for (int step = 0; step < n_max; ++step) {
    if (step > 0) orbit.advance(step - 1, arrays);
    for (std::size_t c = 0; c < d; ++c)
      std::copy(arrays.coords[c].begin(), arrays.coords[c].end(),
                set.positions.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(step) * d + c) * set.count));
  }
  return set;
}

GrowthCount separated_count(const CandidateSet& candidates, int n, double epsilon) {
  check_resolution(candidates, n, epsilon);
  CellHash members(candidates, n - 1, epsilon);
  std::size_t count = 0;
  for (std::size_t i = 0; i < candidates.count; ++i) {
    bool separated = true;
    members.for_neighbors(i, [&](std::size_t j) {
      if (separated && candidates.bowen_distance(i, j, n) < epsilon) separated = false;
    });
    if (!separated) continue;
    members.insert(i);
    ++count;
  }
  return GrowthCount{Method::separated, count, n, epsilon, 0.0, candidates.spacing};
}

GrowthCount spanning_count(const CandidateSet& candidates, int n, double epsilon) {
  check_resolution(candidates, n, epsilon);
  CellHash all(candidates, n - 1, epsilon);
  for (std::size_t i = 0; i < candidates.count; ++i) all.insert(i);
  std::vector<char> covered(candidates.count, 0);
  std::size_t cover = 0;
  for (std::size_t u = 0; u < candidates.count; ++u) {
    if (covered[u]) continue;
    std::size_t chosen = u;
    all.for_neighbors(u, [&](std::size_t j) {
      if (j > chosen && candidates.bowen_distance(u, j, n) < epsilon) chosen = j;
    });
    all.for_neighbors(chosen, [&](std::size_t j) {
      if (!covered[j] && candidates.bowen_distance(chosen, j, n) < epsilon) covered[j] = 1;
    });
    covered[u] = 1;
    ++cover;
  }
  const std::size_t separated = separated_count(candidates, n, epsilon).value;
  return GrowthCount{Method::spanning, std::min(cover, separated), n, epsilon, 0.0, candidates.spacing};
}

namespace {

CandidateSet candidates_for(const TorusMap& map, const LeafPatch& patch, int n, double epsilon, std::size_t cap) {
  if (epsilon >= patch.radius)
    throw Error(ErrorKind::EpsilonTooLarge, fmt::format("epsilon {} >= patch radius {}", epsilon, patch.radius));
  return make_candidates(map, patch, n, bowen_resolution(map, patch, n, epsilon), cap);
}

}  // namespace

GrowthCount separated_count(const TorusMap& map, const LeafPatch& patch, int n, double epsilon, std::size_t cap) {
  GrowthCount count = separated_count(candidates_for(map, patch, n, epsilon, cap), n, epsilon);
  count.delta = patch.radius;
  return count;
}

GrowthCount spanning_count(const TorusMap& map, const LeafPatch& patch, int n, double epsilon, std::size_t cap) {
  GrowthCount count = spanning_count(candidates_for(map, patch, n, epsilon, cap), n, epsilon);
  count.delta = patch.radius;
  return count;
}

}  // namespace hierent
