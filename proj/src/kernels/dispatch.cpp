#include <atomic>
#include <cstdlib>
#include <string_view>

#include "hierent/kernels.hpp"

namespace hierent::kernels {

std::string_view to_string(Backend backend) noexcept {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

bool avx2_available() noexcept {
#if defined(HIERENT_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("HIERENT_KERNEL")) {
    if (std::string_view(env) == "scalar") return Backend::scalar;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() noexcept {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

}  // namespace

Backend active_backend() noexcept { return backend_slot().load(std::memory_order_relaxed); }

void set_active_backend(Backend backend) {
  backend_slot().store(backend == Backend::avx2 && !avx2_available() ? Backend::scalar : backend,
                       std::memory_order_relaxed);
}

#if !defined(HIERENT_HAVE_AVX2)
// Without an AVX2 build the vector entry points forward to the reference.
namespace avx2 {
void advance(const DisplacementStep& step, const Block& block) { scalar::advance(step, block); }
void mark_ball_exits(const Block& block, double eps2, int step, int* survival) {
  scalar::mark_ball_exits(block, eps2, step, survival);
}
void mark_cube_exits(const Block& block, const double* ref, const double* ref_cell, double cells, int step,
                     int* survival) {
  scalar::mark_cube_exits(block, ref, ref_cell, cells, step, survival);
}
}  // namespace avx2
#endif

void advance(const DisplacementStep& step, const Block& block) {
  if (active_backend() == Backend::avx2)
    avx2::advance(step, block);
  else
    scalar::advance(step, block);
}

void mark_ball_exits(const Block& block, double eps2, int step, int* survival) {
  if (active_backend() == Backend::avx2)
    avx2::mark_ball_exits(block, eps2, step, survival);
  else
    scalar::mark_ball_exits(block, eps2, step, survival);
}

void mark_cube_exits(const Block& block, const double* ref, const double* ref_cell, double cells, int step,
                     int* survival) {
  if (active_backend() == Backend::avx2)
    avx2::mark_cube_exits(block, ref, ref_cell, cells, step, survival);
  else
    scalar::mark_cube_exits(block, ref, ref_cell, cells, step, survival);
}

}  // namespace hierent::kernels
