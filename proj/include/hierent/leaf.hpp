#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hierent/cocycle.hpp"

namespace hierent {

enum class PatchKind { affine, graph };

inline constexpr int kDefaultGridNodes = 513;
inline constexpr double kDefaultLeafRadius = 0.1;
inline constexpr double kDefaultDispersionBound = 1.0;

// Local unstable leaf through `base`, parameterized over the fast subspace F:
// w in F-coordinates maps to base + F w + N psi(w), where N spans the
// orthogonal complement of F. Because the chart is orthogonal the graph's
// volume element is exactly sqrt(det(I + Dpsi^T Dpsi)).
//
// Graph patches store psi on a regular grid of nodes_per_axis^k nodes over
// [-radius, radius]^k and interpolate multilinearly (linear extrapolation
// outside the grid). Affine patches have psi = 0 and no grid.
class LeafPatch {
 public:
  PatchKind kind = PatchKind::affine;
  TorusPoint base;
  Vector origin;  // lifted base coordinates
  int level = 1;
  double radius = kDefaultLeafRadius;
  Matrix f_basis;
  Matrix e_basis;
  Matrix n_basis;
  double dispersion = 0.0;
  int nodes_per_axis = 0;
  Matrix psi;  // codim x node_count, node index with axis 0 fastest

  int leaf_dim() const noexcept { return static_cast<int>(f_basis.cols()); }
  int codim() const noexcept { return static_cast<int>(n_basis.cols()); }
  std::size_t node_count() const noexcept { return static_cast<std::size_t>(psi.cols()); }
  double spacing() const noexcept { return 2.0 * radius / (nodes_per_axis - 1); }

  Vector node_coordinates(std::size_t node) const;
  Vector psi_at(const Vector& w) const;
  Matrix dpsi_at(const Vector& w) const;
  // F w + N psi(w): displacement of the leaf point from the base.
  Vector displacement(const Vector& w) const;
  Vector point(const Vector& w) const { return origin + displacement(w); }
  // F-coordinates of a lifted point.
  Vector coordinates(const Vector& lifted) const { return f_basis.transpose() * (lifted - origin); }
  double volume_element(const Vector& w) const;
};

// Volume of the Euclidean k-ball.
double ball_volume(int k, double radius);

LeafPatch affine_leaf_patch(const TorusMap& map, const TorusPoint& x, int level, int fast_dim, double radius);
LeafPatch affine_leaf_patch(const TorusMap& map, const TorusPoint& x, int level, const LyapunovSpectrum& spectrum,
                            double radius);

LeafPatch flat_graph_patch(const TorusPoint& x, int level, const Matrix& f_basis, const Matrix& e_basis,
                           double radius, int nodes_per_axis = kDefaultGridNodes);

// Max over grid cells of ||Dpsi||_2 from forward differences.
double measure_dispersion(const LeafPatch& patch);

// Source F-coordinate whose image has target-chart coordinate w_target, found
// by Newton iteration on F'^T (f(p(w)) - target.origin) = w_target.
Vector pull_back_coordinate(const TorusMap& map, const LeafPatch& source, const LeafPatch& target,
                            const Vector& w_target);

// Pushes the patch forward one step of `map`. The image is re-expressed over
// F' = orth(Df F) at f(base); with an explicit target base the image chart is
// anchored there and psi(0) is re-centered to zero.
LeafPatch graph_transform_step(const TorusMap& map, const LeafPatch& patch, double c_max);
LeafPatch graph_transform_step(const TorusMap& map, const LeafPatch& patch, double c_max, const TorusPoint& target);

struct GrowOptions {
  double radius = kDefaultLeafRadius;
  double c_max = kDefaultDispersionBound;
  int iterations = 30;
  int nodes_per_axis = kDefaultGridNodes;
  long splitting_steps = 1000;
  std::uint64_t seed = 1;
};

// Patches at f^{-iterations}(x), ..., x along the stored backward orbit,
// grown from a flat seed over the fast bundle at the oldest point.
std::vector<LeafPatch> grow_unstable_chain(const TorusMap& map, const TorusPoint& x, int level, int fast_dim,
                                           const GrowOptions& options);

// Last patch of the chain; cross-checked against chains seeded one and two
// steps later, throwing NonConvergent if they do not settle.
LeafPatch grow_unstable_patch(const TorusMap& map, const TorusPoint& x, int level, int fast_dim,
                              const GrowOptions& options);

// Sup over nodes of `a` (inside 0.99 radius) of the transverse distance to `b`.
double patch_distance(const LeafPatch& a, const LeafPatch& b);

// Orthonormal tangent basis of the leaf at the base point.
Matrix leaf_tangent(const LeafPatch& patch);

// d(f^{-k} x, f^{-k} y) for k = 0..n with y = chain.back().point(w), pulling
// y back inside the chain's leaves rather than through f^{-1} directly.
std::vector<double> backward_leaf_distances(const TorusMap& map, const std::vector<LeafPatch>& chain,
                                            const Vector& w, int n);

// Intrinsic distance between two lifted points on the patch.
double leaf_distance(const LeafPatch& patch, const Vector& a, const Vector& b);

struct Quadrature {
  int dim = 0;
  std::vector<double> nodes;  // dim values per node
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  Eigen::Map<const Vector> node(std::size_t i) const {
    return {nodes.data() + i * static_cast<std::size_t>(dim), dim};
  }
};

// Midpoint rule over the k-ball: uniform cells for k = 1, polar cells for
// k = 2, Cartesian cells clipped by the ball for k >= 3.
Quadrature ball_quadrature(int k, double radius, int resolution);

// Geometrically graded rule over the k-ball: shells of radii r 2^{-s-1}..r 2^{-s}
// each carrying `per_shell` cells per axis, so that sets at every scale down
// to r 2^{-shells} are resolved to relative accuracy ~1/per_shell.
Quadrature graded_quadrature(int k, double radius, int shells, int per_shell);

using LeafRegion = std::function<bool(const Vector& lifted_point)>;

double leaf_volume(const LeafPatch& patch);
double leaf_volume(const LeafPatch& patch, const LeafRegion& region, int resolution = 2048);

}  // namespace hierent
