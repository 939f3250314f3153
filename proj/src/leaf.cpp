#include "hierent/leaf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "hierent/error.hpp"

namespace hierent {

namespace {

constexpr double kOnLeafTolerance = 1e-8;
constexpr int kNewtonIterations = 50;
constexpr std::size_t kMaxGridNodes = 20'000'000;

struct Stencil {
  std::size_t first = 0;  // node index of the lower corner
  Eigen::Matrix<double, kMaxDimension, 1> t;
  std::size_t stride[kMaxDimension] = {};
};

Stencil stencil(const LeafPatch& patch, const Vector& w) {
  Stencil s;
  const int n = patch.nodes_per_axis;
  const double h = patch.spacing();
  std::size_t stride = 1;
  for (int a = 0; a < patch.leaf_dim(); ++a) {
    const double u = (w(a) + patch.radius) / h;
    const int i = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
    s.t(a) = u - i;
    s.stride[a] = stride;
    s.first += static_cast<std::size_t>(i) * stride;
    stride *= static_cast<std::size_t>(n);
  }
  return s;
}

struct ImagePoint {
  Vector w;
  Vector image;  // f(p(w)) - target.origin
};

ImagePoint solve_pull_back(const TorusMap& map, const LeafPatch& source, const LeafPatch& target,
                           const Vector& w_target) {
  const Vector offset = minimal_displacement(map.forward_lift(source.origin) - target.origin);
  const Matrix ft = target.f_basis.transpose();
  const auto tangent = [&](const Vector& w) -> Matrix {
    if (source.kind == PatchKind::affine) return source.f_basis;
    return source.f_basis + source.n_basis * source.dpsi_at(w);
  };

  const Vector zero = Vector::Zero(source.leaf_dim());
  const Matrix m0 = ft * map.jacobian(source.origin) * tangent(zero);
  Vector w = m0.partialPivLu().solve(w_target - ft * offset);
  Vector image;
  double residual_norm = 0.0;
  for (int it = 0; it < kNewtonIterations; ++it) {
    const Vector v = source.displacement(w);
    image = map.forward_displacement(source.origin, v) + offset;
    const Vector residual = ft * image - w_target;
    residual_norm = residual.norm();
    const Matrix j = ft * map.jacobian(source.origin + v) * tangent(w);
    const Vector dw = j.partialPivLu().solve(residual);
    w -= dw;
    if (dw.norm() <= 1e-15 * std::max(1.0, w.norm())) {
      image = map.forward_displacement(source.origin, source.displacement(w)) + offset;
      return {w, image};
    }
  }
  if (residual_norm > 1e-10)
    throw Error(ErrorKind::NonConvergent, fmt::format("leaf pull-back residual {:.3e}", residual_norm));
  image = map.forward_displacement(source.origin, source.displacement(w)) + offset;
  return {w, image};
}

LeafPatch affine_image(const TorusMap& map, const LeafPatch& patch, const TorusPoint& target) {
  LeafPatch out = patch;
  const Matrix df = map.jacobian(patch.origin);
  out.base = target;
  out.origin = target.coords();
  out.f_basis = linalg::orthonormalize(df * patch.f_basis);
  out.e_basis = linalg::orthonormalize(df * patch.e_basis);
  out.n_basis = linalg::orthogonal_complement(out.f_basis);
  return out;
}

}  // namespace

double ball_volume(int k, double radius) {
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0) * std::pow(radius, k);
}

Vector LeafPatch::node_coordinates(std::size_t node) const {
  const int k = leaf_dim();
  Vector w(k);
  const auto n = static_cast<std::size_t>(nodes_per_axis);
  for (int a = 0; a < k; ++a) {
    w(a) = -radius + static_cast<double>(node % n) * spacing();
    node /= n;
  }
  return w;
}

Vector LeafPatch::psi_at(const Vector& w) const {
  if (kind == PatchKind::affine) return Vector::Zero(codim());
  const int k = leaf_dim();
  const Stencil s = stencil(*this, w);
  Vector value = Vector::Zero(codim());
  for (unsigned corner = 0; corner < (1u << k); ++corner) {
    double weight = 1.0;
    std::size_t node = s.first;
    for (int a = 0; a < k; ++a) {
      const bool up = (corner >> a) & 1u;
      weight *= up ? s.t(a) : 1.0 - s.t(a);
      if (up) node += s.stride[a];
    }
    value += weight * psi.col(static_cast<Eigen::Index>(node));
  }
  return value;
}

Matrix LeafPatch::dpsi_at(const Vector& w) const {
  const int k = leaf_dim();
  if (kind == PatchKind::affine) return Matrix::Zero(codim(), k);
  const Stencil s = stencil(*this, w);
  const double h = spacing();
  Matrix d = Matrix::Zero(codim(), k);
  for (unsigned corner = 0; corner < (1u << k); ++corner) {
    std::size_t node = s.first;
    for (int a = 0; a < k; ++a)
      if ((corner >> a) & 1u) node += s.stride[a];
    const auto column = psi.col(static_cast<Eigen::Index>(node));
    for (int a = 0; a < k; ++a) {
      double weight = ((corner >> a) & 1u) ? 1.0 / h : -1.0 / h;
      for (int b = 0; b < k; ++b) {
        if (b == a) continue;
        weight *= ((corner >> b) & 1u) ? s.t(b) : 1.0 - s.t(b);
      }
      d.col(a) += weight * column;
    }
  }
  return d;
}

Vector LeafPatch::displacement(const Vector& w) const {
  if (kind == PatchKind::affine) return f_basis * w;
  return f_basis * w + n_basis * psi_at(w);
}

double LeafPatch::volume_element(const Vector& w) const {
  if (kind == PatchKind::affine) return 1.0;
  const Matrix d = dpsi_at(w);
  const Matrix g = Matrix::Identity(leaf_dim(), leaf_dim()) + d.transpose() * d;
  return std::sqrt(g.determinant());
}

LeafPatch affine_leaf_patch(const TorusMap& map, const TorusPoint& x, int level, int fast_dim, double radius) {
  if (!map.is_linear()) throw Error(ErrorKind::PreconditionViolated, "affine patches need a linear map");
  if (!(radius > 0.0)) throw Error(ErrorKind::PreconditionViolated, "patch radius must be positive");
  const SplittingAtPoint splitting = linear_splitting(map, x, level, fast_dim);
  LeafPatch patch;
  patch.kind = PatchKind::affine;
  patch.base = x;
  patch.origin = x.coords();
  patch.level = level;
  patch.radius = radius;
  patch.f_basis = splitting.f_basis;
  patch.e_basis = splitting.e_basis;
  patch.n_basis = linalg::orthogonal_complement(splitting.f_basis);
  patch.psi = Matrix(patch.codim(), 0);
  return patch;
}

LeafPatch affine_leaf_patch(const TorusMap& map, const TorusPoint& x, int level, const LyapunovSpectrum& spectrum,
                            double radius) {
  return affine_leaf_patch(map, x, level, hierarchy_indices(spectrum, level).I_of_i, radius);
}

LeafPatch flat_graph_patch(const TorusPoint& x, int level, const Matrix& f_basis, const Matrix& e_basis,
                           double radius, int nodes_per_axis) {
  if (!(radius > 0.0)) throw Error(ErrorKind::PreconditionViolated, "patch radius must be positive");
  if (nodes_per_axis < 3 || nodes_per_axis % 2 == 0)
    throw Error(ErrorKind::PreconditionViolated, "grid needs an odd node count >= 3 per axis");
  const auto k = static_cast<int>(f_basis.cols());
  double total = 1.0;
  for (int a = 0; a < k; ++a) total *= nodes_per_axis;
  if (total > static_cast<double>(kMaxGridNodes))
    throw Error(ErrorKind::PreconditionViolated, fmt::format("grid of {} nodes is too large", total));

  LeafPatch patch;
  patch.kind = PatchKind::graph;
  patch.base = x;
  patch.origin = x.coords();
  patch.level = level;
  patch.radius = radius;
  patch.f_basis = linalg::orthonormalize(f_basis);
  patch.e_basis = e_basis;
  patch.n_basis = linalg::orthogonal_complement(patch.f_basis);
  patch.nodes_per_axis = nodes_per_axis;
  patch.psi = Matrix::Zero(patch.codim(), static_cast<Eigen::Index>(total));
  return patch;
}

double measure_dispersion(const LeafPatch& patch) {
  if (patch.kind == PatchKind::affine) return 0.0;
  const int k = patch.leaf_dim();
  const auto n = static_cast<std::size_t>(patch.nodes_per_axis);
  const double h = patch.spacing();
  double worst = 0.0;
  Matrix d(patch.codim(), k);
  for (std::size_t node = 0; node < patch.node_count(); ++node) {
    std::size_t rest = node;
    std::size_t stride = 1;
    bool interior = true;
    for (int a = 0; a < k; ++a) {
      if (rest % n == n - 1) {
        interior = false;
        break;
      }
      d.col(a) = (patch.psi.col(static_cast<Eigen::Index>(node + stride)) -
                  patch.psi.col(static_cast<Eigen::Index>(node))) / h;
      rest /= n;
      stride *= n;
    }
    if (!interior) continue;
    const double norm = (k == 1 || patch.codim() == 1) ? d.norm() : linalg::largest_singular_value(d);
    worst = std::max(worst, norm);
  }
  return worst;
}

Vector pull_back_coordinate(const TorusMap& map, const LeafPatch& source, const LeafPatch& target,
                            const Vector& w_target) {
  return solve_pull_back(map, source, target, w_target).w;
}

LeafPatch graph_transform_step(const TorusMap& map, const LeafPatch& patch, double c_max, const TorusPoint& target) {
  if (patch.kind == PatchKind::affine) return affine_image(map, patch, target);
  if (patch.dispersion > c_max)
    throw Error(ErrorKind::PreconditionViolated, "input patch already exceeds the dispersion bound");

  const Matrix df = map.jacobian(patch.origin);
  LeafPatch out = patch;
  out.base = target;
  out.origin = target.coords();
  out.f_basis = linalg::orthonormalize(df * patch.f_basis);
  out.n_basis = linalg::orthogonal_complement(out.f_basis);
  out.e_basis = out.n_basis;

  const Matrix nt = out.n_basis.transpose();
  for (std::size_t node = 0; node < out.node_count(); ++node) {
    const ImagePoint p = solve_pull_back(map, patch, out, out.node_coordinates(node));
    out.psi.col(static_cast<Eigen::Index>(node)) = nt * p.image;
  }
  const Vector center = out.psi_at(Vector::Zero(out.leaf_dim()));
  out.psi.colwise() -= center;
  out.dispersion = measure_dispersion(out);
  if (out.dispersion > c_max)
    throw Error(ErrorKind::DispersionExceeded, fmt::format("dispersion {:.6g} > c_max {:.6g}", out.dispersion, c_max));
  return out;
}

LeafPatch graph_transform_step(const TorusMap& map, const LeafPatch& patch, double c_max) {
  return graph_transform_step(map, patch, c_max, TorusPoint(reduce_mod1(map.forward_lift(patch.origin))));
}

std::vector<LeafPatch> grow_unstable_chain(const TorusMap& map, const TorusPoint& x, int level, int fast_dim,
                                           const GrowOptions& options) {
  if (options.iterations < 1) throw Error(ErrorKind::PreconditionViolated, "iterations must be >= 1");
  const auto t = static_cast<std::size_t>(options.iterations);
  std::vector<TorusPoint> past(t + 1);
  past[0] = x;
  for (std::size_t j = 1; j <= t; ++j) past[j] = TorusPoint(reduce_mod1(map.inverse_lift(past[j - 1].coords())));

  SplittingOptions split;
  split.steps = options.splitting_steps;
  split.seed = options.seed;
  const SplittingAtPoint seed_split = oseledec_splitting(map, past[t], level, fast_dim, split);

  std::vector<LeafPatch> chain;
  chain.reserve(t + 1);
  chain.push_back(flat_graph_patch(past[t], level, seed_split.f_basis, seed_split.e_basis, options.radius,
                                   options.nodes_per_axis));
  for (std::size_t j = t; j-- > 0;) chain.push_back(graph_transform_step(map, chain.back(), options.c_max, past[j]));
  return chain;
}

LeafPatch grow_unstable_patch(const TorusMap& map, const TorusPoint& x, int level, int fast_dim,
                              const GrowOptions& options) {
  LeafPatch patch = grow_unstable_chain(map, x, level, fast_dim, options).back();
  if (options.iterations >= 3) {
    GrowOptions shorter = options;
    shorter.iterations = options.iterations - 1;
    const LeafPatch one = grow_unstable_chain(map, x, level, fast_dim, shorter).back();
    shorter.iterations = options.iterations - 2;
    const LeafPatch two = grow_unstable_chain(map, x, level, fast_dim, shorter).back();
    const double last = patch_distance(patch, one);
    const double previous = patch_distance(one, two);
    if (last > 1e-8 && last >= previous)
      throw Error(ErrorKind::NonConvergent,
                  fmt::format("successive leaf patches differ by {:.3e} (previous {:.3e})", last, previous));
  }
  SplittingOptions split;
  split.steps = options.splitting_steps;
  split.seed = options.seed;
  patch.e_basis = oseledec_splitting(map, x, level, fast_dim, split).e_basis;
  return patch;
}

double patch_distance(const LeafPatch& a, const LeafPatch& b) {
  double worst = 0.0;
  const auto check = [&](const Vector& w) {
    const Vector diff = minimal_displacement(a.point(w) - b.origin);
    const Vector wb = b.f_basis.transpose() * diff;
    worst = std::max(worst, (b.n_basis.transpose() * diff - b.psi_at(wb)).norm());
  };
  if (a.kind == PatchKind::graph) {
    for (std::size_t node = 0; node < a.node_count(); ++node) {
      const Vector w = a.node_coordinates(node);
      if (w.norm() <= 0.99 * a.radius) check(w);
    }
  } else {
    const Quadrature q = ball_quadrature(a.leaf_dim(), 0.99 * a.radius, 512);
    for (std::size_t i = 0; i < q.size(); ++i) check(q.node(i));
  }
  return worst;
}

Matrix leaf_tangent(const LeafPatch& patch) {
  return linalg::orthonormalize(patch.f_basis + patch.n_basis * patch.dpsi_at(Vector::Zero(patch.leaf_dim())));
}

std::vector<double> backward_leaf_distances(const TorusMap& map, const std::vector<LeafPatch>& chain,
                                            const Vector& w, int n) {
  if (n < 0 || static_cast<std::size_t>(n) >= chain.size())
    throw Error(ErrorKind::PreconditionViolated, fmt::format("chain of {} patches cannot pull back {} steps",
                                                             chain.size(), n));
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(n) + 1);
  Vector coordinate = w;
  std::size_t index = chain.size() - 1;
  distances.push_back(chain[index].displacement(coordinate).norm());
  for (int k = 1; k <= n; ++k) {
    coordinate = pull_back_coordinate(map, chain[index - 1], chain[index], coordinate);
    --index;
    distances.push_back(chain[index].displacement(coordinate).norm());
  }
  return distances;
}

double leaf_distance(const LeafPatch& patch, const Vector& a, const Vector& b) {
  const auto locate = [&](const Vector& p) {
    const Vector diff = p - patch.origin;
    const Vector w = patch.f_basis.transpose() * diff;
    const double off = (patch.n_basis.transpose() * diff - patch.psi_at(w)).norm();
    if (off > kOnLeafTolerance) throw Error(ErrorKind::NotOnLeaf, fmt::format("point is {:.3e} off the leaf", off));
    return w;
  };
  const Vector wa = locate(a);
  const Vector wb = locate(b);
  if (patch.kind == PatchKind::affine) return (a - b).norm();

  // Break the F-chord where it crosses grid lines so each piece stays in one cell.
  std::vector<double> breaks{0.0, 1.0};
  const double h = patch.spacing();
  for (int axis = 0; axis < patch.leaf_dim(); ++axis) {
    const double lo = std::min(wa(axis), wb(axis));
    const double hi = std::max(wa(axis), wb(axis));
    if (hi - lo <= 0.0) continue;
    for (double g = std::ceil((lo + patch.radius) / h) * h - patch.radius; g < hi; g += h)
      if (g > lo) breaks.push_back((g - wa(axis)) / (wb(axis) - wa(axis)));
  }
  std::sort(breaks.begin(), breaks.end());
  double length = 0.0;
  Vector previous = patch.displacement(wa);
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const Vector current = patch.displacement(wa + breaks[i] * (wb - wa));
    length += (current - previous).norm();
    previous = current;
  }
  return length;
}

Quadrature ball_quadrature(int k, double radius, int resolution) {
  Quadrature q;
  q.dim = k;
  if (k == 1) {
    const int m = std::max(resolution, 2);
    const double width = 2.0 * radius / m;
    for (int i = 0; i < m; ++i) {
      q.nodes.push_back(-radius + (i + 0.5) * width);
      q.weights.push_back(width);
    }
  } else if (k == 2) {
    const int radial = std::max(4, resolution / 16);
    const int angular = std::max(8, resolution / 4);
    const double dr = radius / radial;
    const double dt = 2.0 * std::numbers::pi / angular;
    for (int i = 0; i < radial; ++i) {
      const double rho = (i + 0.5) * dr;
      for (int j = 0; j < angular; ++j) {
        const double theta = (j + 0.5) * dt;
        q.nodes.push_back(rho * std::cos(theta));
        q.nodes.push_back(rho * std::sin(theta));
        q.weights.push_back(rho * dr * dt);
      }
    }
  } else {
    const int cells = std::max(8, resolution / 64);
    const double width = 2.0 * radius / cells;
    std::vector<int> index(static_cast<std::size_t>(k), 0);
    const double weight = std::pow(width, k);
    for (;;) {
      double norm2 = 0.0;
      for (int a = 0; a < k; ++a) {
        const double c = -radius + (index[static_cast<std::size_t>(a)] + 0.5) * width;
        norm2 += c * c;
      }
      if (norm2 <= radius * radius) {
        for (int a = 0; a < k; ++a) q.nodes.push_back(-radius + (index[static_cast<std::size_t>(a)] + 0.5) * width);
        q.weights.push_back(weight);
      }
      int a = 0;
      while (a < k && ++index[static_cast<std::size_t>(a)] == cells) index[static_cast<std::size_t>(a++)] = 0;
      if (a == k) break;
    }
  }
  return q;
}

Quadrature graded_quadrature(int k, double radius, int shells, int per_shell) {
  if (k >= 3) return ball_quadrature(k, radius, per_shell * 64);
  Quadrature q;
  q.dim = k;
  const int m = std::max(per_shell, 2);
  const auto annulus = [&](double inner, double outer, int radial, int angular) {
    const double dr = (outer - inner) / radial;
    const double dt = 2.0 * std::numbers::pi / angular;
    for (int i = 0; i < radial; ++i) {
      const double rho = inner + (i + 0.5) * dr;
      for (int j = 0; j < angular; ++j) {
        const double theta = (j + 0.5) * dt;
        q.nodes.push_back(rho * std::cos(theta));
        q.nodes.push_back(rho * std::sin(theta));
        q.weights.push_back(rho * dr * dt);
      }
    }
  };
  double outer = radius;
  for (int s = 0; s <= shells; ++s) {
    const double inner = s == shells ? 0.0 : 0.5 * outer;
    if (k == 1) {
      const double width = (outer - inner) / m;
      for (int i = 0; i < m; ++i) {
        const double c = inner + (i + 0.5) * width;
        q.nodes.push_back(-c);
        q.weights.push_back(width);
        q.nodes.push_back(c);
        q.weights.push_back(width);
      }
    } else {
      annulus(inner, outer, std::max(2, m / 8), m);
    }
    outer = inner;
  }
  return q;
}

double leaf_volume(const LeafPatch& patch) {
  if (patch.kind == PatchKind::affine) return ball_volume(patch.leaf_dim(), patch.radius);
  const Quadrature q = ball_quadrature(patch.leaf_dim(), patch.radius, 2048);
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) total += q.weights[i] * patch.volume_element(q.node(i));
  return total;
}

double leaf_volume(const LeafPatch& patch, const LeafRegion& region, int resolution) {
  const Quadrature q = ball_quadrature(patch.leaf_dim(), patch.radius, resolution);
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vector w = q.node(i);
    if (region(patch.point(w))) total += q.weights[i] * patch.volume_element(w);
  }
  return total;
}

}  // namespace hierent
