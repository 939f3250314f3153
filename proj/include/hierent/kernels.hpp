#pragma once

// Batch kernels for the inner loops of the entropy estimators: many leaf
// points are pushed along the orbit of one base point and tested against a
// Bowen ball or a partition cell at every step.
//
// Points are stored as displacements from the base orbit in structure-of-arrays
// layout (one array per coordinate). Each kernel has a scalar reference
// implementation and an AVX2 variant selected at runtime; both perform the
// same floating-point operations in the same order, so their results are
// bitwise identical (kernel sources are compiled with -ffp-contract=off).

#include <cstddef>
#include <string_view>

namespace hierent::kernels {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend backend) noexcept;

bool avx2_available() noexcept;

// Backend used by the dispatching entry points. Defaults to AVX2 when the CPU
// supports it; the HIERENT_KERNEL environment variable ("scalar" / "avx2")
// overrides the default at first use.
Backend active_backend() noexcept;
void set_active_backend(Backend backend);

inline constexpr int kMaxDim = 8;

// One application of v -> A (v + 2 a sin(pi v_r) cos(2 pi b_r + pi v_r) e_w),
// the exact displacement map of x -> A(x + a sin(2 pi x_r) e_w) around a base
// point with read coordinate b_r.
struct DisplacementStep {
  int dim = 0;
  const double* matrix = nullptr;  // row-major dim x dim
  double amplitude = 0.0;
  int read = 1;
  int write = 0;
  double cos_base = 1.0;  // cos(2 pi b_r)
  double sin_base = 0.0;  // sin(2 pi b_r)
};

struct Block {
  int dim = 0;
  std::size_t count = 0;
  double* const* coords = nullptr;  // coords[c][i]
};

inline constexpr int kAlive = 0x7fffffff;

void advance(const DisplacementStep& step, const Block& block);
// survival[i] = step for points still alive whose |v|^2 >= eps2.
void mark_ball_exits(const Block& block, double eps2, int step, int* survival);
// survival[i] = step for points still alive whose cell index (per coordinate,
// floor((ref + v) * cells) mod cells) differs from ref_cell.
void mark_cube_exits(const Block& block, const double* ref, const double* ref_cell, double cells, int step,
                     int* survival);

// Cell index of a coordinate in the cube partition with `cells` cells per axis.
double cube_cell(double value, double cells) noexcept;

// sin(pi v), cos(pi v) with the polynomial shared by all backends.
void sincos_pi(double v, double& s, double& c) noexcept;

namespace scalar {
void advance(const DisplacementStep& step, const Block& block);
void mark_ball_exits(const Block& block, double eps2, int step, int* survival);
void mark_cube_exits(const Block& block, const double* ref, const double* ref_cell, double cells, int step,
                     int* survival);
}  // namespace scalar

namespace avx2 {
void advance(const DisplacementStep& step, const Block& block);
void mark_ball_exits(const Block& block, double eps2, int step, int* survival);
void mark_cube_exits(const Block& block, const double* ref, const double* ref_cell, double cells, int step,
                     int* survival);
}  // namespace avx2

}  // namespace hierent::kernels
