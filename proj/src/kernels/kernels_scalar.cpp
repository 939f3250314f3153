#include <cmath>

#include "hierent/kernels.hpp"
#include "sincos_poly.hpp"

namespace hierent::kernels {

void sincos_pi(double v, double& s, double& c) noexcept {
  using namespace detail;
  const double r = v - 2.0 * std::nearbyint(v * 0.5);
  const bool fold = std::fabs(r) > 0.5;
  const double rr = fold ? std::copysign(1.0, r) - r : r;
  const double x = kPi * rr;
  const double x2 = x * x;
  double sp = kSin[kSinTerms - 1];
  for (int i = kSinTerms - 2; i >= 0; --i) sp = sp * x2 + kSin[i];
  double cp = kCos[kCosTerms - 1];
  for (int i = kCosTerms - 2; i >= 0; --i) cp = cp * x2 + kCos[i];
  s = x + x * (x2 * sp);
  const double cc = 1.0 + x2 * cp;
  c = fold ? -cc : cc;
}

double cube_cell(double value, double cells) noexcept {
  const double q = std::floor(value * cells);
  return q - cells * std::floor(q / cells);
}

namespace scalar {

void advance(const DisplacementStep& step, const Block& block) {
  const int d = block.dim;
  const double* a = step.matrix;
  double v[kMaxDim];
  for (std::size_t i = 0; i < block.count; ++i) {
    for (int c = 0; c < d; ++c) v[c] = block.coords[c][i];
    if (step.amplitude != 0.0) {
      double s, co;
      sincos_pi(v[step.read], s, co);
      v[step.write] = v[step.write] + (2.0 * step.amplitude) * s * (step.cos_base * co - step.sin_base * s);
    }
    for (int r = 0; r < d; ++r) {
      double acc = a[r * d] * v[0];
      for (int c = 1; c < d; ++c) acc = acc + a[r * d + c] * v[c];
      block.coords[r][i] = acc;
    }
  }
}

void mark_ball_exits(const Block& block, double eps2, int step, int* survival) {
  const int d = block.dim;
  for (std::size_t i = 0; i < block.count; ++i) {
    double dist2 = block.coords[0][i] * block.coords[0][i];
    for (int c = 1; c < d; ++c) dist2 = dist2 + block.coords[c][i] * block.coords[c][i];
    if (survival[i] == kAlive && dist2 >= eps2) survival[i] = step;
  }
}

void mark_cube_exits(const Block& block, const double* ref, const double* ref_cell, double cells, int step,
                     int* survival) {
  const int d = block.dim;
  for (std::size_t i = 0; i < block.count; ++i) {
    bool inside = true;
    for (int c = 0; c < d; ++c) inside = inside && cube_cell(ref[c] + block.coords[c][i], cells) == ref_cell[c];
    if (survival[i] == kAlive && !inside) survival[i] = step;
  }
}

}  // namespace scalar
}  // namespace hierent::kernels
