#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "hierent/kernels.hpp"
#include "hierent/systems.hpp"

namespace hierent::detail {

// Structure-of-arrays displacements of many leaf points from one base orbit.
struct DisplacementArrays {
  int dim = 0;
  std::size_t count = 0;
  std::vector<std::vector<double>> coords;
  std::vector<double*> pointers;

  DisplacementArrays(int d, std::size_t n)
      : dim(d), count(n), coords(static_cast<std::size_t>(d), std::vector<double>(n)) {
    for (auto& c : coords) pointers.push_back(c.data());
  }
  kernels::Block block() const { return {dim, count, pointers.data()}; }
};

// Reduced base orbit x, f x, ..., with the per-base-step shear phases the
// displacement kernel needs.
class BaseOrbit {
 public:
  BaseOrbit(const TorusMap& map, const Vector& origin, int map_steps) : dim_(map.dimension()), power_(map.power()) {
    const Matrix& a = map.matrix_real();
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c) matrix_.push_back(a(r, c));
    amplitude_ = map.amplitude();
    read_ = map.shear_read();
    write_ = map.shear_write();
    Vector b = reduce_mod1(origin);
    points_.push_back(b);
    for (int k = 0; k < map_steps; ++k) {
      for (int s = 0; s < power_; ++s) {
        const double phase = 2.0 * std::numbers::pi * b(read_);
        cos_.push_back(std::cos(phase));
        sin_.push_back(std::sin(phase));
        b = reduce_mod1(map.base_forward_lift(b));
      }
      points_.push_back(b);
    }
  }

  const Vector& point(int k) const { return points_[static_cast<std::size_t>(k)]; }

  // Displacements at map step k become displacements at step k + 1.
  void advance(int k, const DisplacementArrays& arrays) const {
    for (int s = 0; s < power_; ++s) {
      const auto j = static_cast<std::size_t>(k * power_ + s);
      kernels::DisplacementStep step;
      step.dim = dim_;
      step.matrix = matrix_.data();
      step.amplitude = amplitude_;
      step.read = read_;
      step.write = write_;
      step.cos_base = cos_[j];
      step.sin_base = sin_[j];
      kernels::advance(step, arrays.block());
    }
  }

 private:
  int dim_;
  int power_;
  std::vector<double> matrix_;
  double amplitude_ = 0.0;
  int read_ = 1;
  int write_ = 0;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::vector<Vector> points_;
};

}  // namespace hierent::detail
