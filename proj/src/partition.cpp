#include <algorithm>
#include <cmath>
#include <numbers>

#include "hierent/entropy.hpp"
#include "hierent/error.hpp"
#include "orbit_block.hpp"

namespace hierent {

namespace {

constexpr int kDiskPolygonVertices = 4096;

using Polygon = std::vector<Eigen::Vector2d>;

// Sutherland-Hodgman clip keeping g . w >= bound.
Polygon clip(const Polygon& polygon, const Eigen::Vector2d& g, double bound) {
  Polygon out;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = polygon[i];
    const Eigen::Vector2d& b = polygon[(i + 1) % n];
    const double fa = g.dot(a) - bound;
    const double fb = g.dot(b) - bound;
    if (fa >= 0.0) out.push_back(a);
    if ((fa >= 0.0) != (fb >= 0.0)) out.push_back(a + fa / (fa - fb) * (b - a));
  }
  return out;
}

double area(const Polygon& polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % n];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * std::abs(twice);
}

// The cube of the base point at step k constrains leaf points to a slab
// lo <= (G_k w)_c < hi per coordinate, G_k = Df^k F; only the lift of the cube
// containing the base is followed.
std::vector<double> exact_fractions(const TorusMap& map, const LeafPatch& patch, double cells, int n_max) {
  const int k = patch.leaf_dim();
  const int d = map.dimension();
  const Matrix a = map.jacobian(patch.origin);
  Matrix g = patch.f_basis;
  Vector b = reduce_mod1(patch.origin);

  std::vector<double> fractions;
  double lo1 = -patch.radius;
  double hi1 = patch.radius;
  Polygon polygon;
  double area0 = 0.0;
  if (k == 2) {
    for (int i = 0; i < kDiskPolygonVertices; ++i) {
      const double t = 2.0 * std::numbers::pi * i / kDiskPolygonVertices;
      polygon.emplace_back(patch.radius * std::cos(t), patch.radius * std::sin(t));
    }
    area0 = area(polygon);
  }
  for (int step = 0; step < n_max; ++step) {
    for (int c = 0; c < d; ++c) {
      const double q = kernels::cube_cell(b(c), cells);
      const double lo = q / cells - b(c);
      const double hi = (q + 1.0) / cells - b(c);
      if (k == 1) {
        const double gc = g(c, 0);
        if (gc > 0.0) {
          lo1 = std::max(lo1, lo / gc);
          hi1 = std::min(hi1, hi / gc);
        } else if (gc < 0.0) {
          lo1 = std::max(lo1, hi / gc);
          hi1 = std::min(hi1, lo / gc);
        }
      } else {
        const Eigen::Vector2d row(g(c, 0), g(c, 1));
        if (row.squaredNorm() == 0.0) continue;
        polygon = clip(polygon, row, lo);
        polygon = clip(polygon, -row, -hi);
      }
    }
    fractions.push_back(k == 1 ? std::max(0.0, hi1 - lo1) / (2.0 * patch.radius)
                               : (polygon.size() >= 3 ? area(polygon) / area0 : 0.0));
    g = a * g;
    b = reduce_mod1(map.forward_lift(b));
  }
  return fractions;
}

}  // namespace

std::vector<double> partition_fractions(const TorusMap& map, const LeafPatch& patch, double mesh, int n_max,
                                        const BowenOptions& options) {
  if (!(mesh > 0.0)) throw Error(ErrorKind::PreconditionViolated, "mesh must be positive");
  if (n_max < 1) throw Error(ErrorKind::PreconditionViolated, "n must be >= 1");
  const double cells = std::max(1.0, std::round(1.0 / mesh));
  const int k = patch.leaf_dim();
  if (patch.kind == PatchKind::affine && !options.force_quadrature && k <= 2)
    return exact_fractions(map, patch, cells, n_max);

  const int per_shell = options.per_shell > 0 ? options.per_shell : (k == 1 ? 512 : 64);
  const Quadrature q = graded_quadrature(k, patch.radius, options.shells, per_shell);
  const int d = map.dimension();
  detail::DisplacementArrays arrays(d, q.size());
  std::vector<double> weight(q.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vector w = q.node(i);
    weight[i] = q.weights[i] * patch.volume_element(w);
    total += weight[i];
    const Vector v = patch.displacement(w);
    for (int c = 0; c < d; ++c) arrays.coords[static_cast<std::size_t>(c)][i] = v(c);
  }

  std::vector<int> survival(q.size(), kernels::kAlive);
  const detail::BaseOrbit orbit(map, patch.origin, n_max - 1);
  std::vector<double> ref_cell(static_cast<std::size_t>(d));
  for (int step = 0; step < n_max; ++step) {
    if (step > 0) orbit.advance(step - 1, arrays);
    const Vector& b = orbit.point(step);
    for (int c = 0; c < d; ++c) ref_cell[static_cast<std::size_t>(c)] = kernels::cube_cell(b(c), cells);
    kernels::mark_cube_exits(arrays.block(), b.data(), ref_cell.data(), cells, step, survival.data());
  }

  std::vector<double> fractions;
  for (int n = 1; n <= n_max; ++n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
      if (survival[i] >= n) sum += weight[i];
    fractions.push_back(sum / total);
  }
  return fractions;
}

}  // namespace hierent
