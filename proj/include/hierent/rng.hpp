#pragma once

#include <cstdint>
#include <random>

namespace hierent {

// Seed policy: every random stream is identified by (root seed, stream tag,
// index) and seeded with a SplitMix64 mix of the three. Streams never share
// state, so a task's draws do not depend on which worker runs it or on how
// many other tasks ran before it.
namespace stream {
inline constexpr std::uint64_t lyapunov = 0x4c59'4150'0001ULL;
inline constexpr std::uint64_t splitting = 0x5350'4c54'0002ULL;
inline constexpr std::uint64_t domination = 0x444f'4d4e'0003ULL;
inline constexpr std::uint64_t samples = 0x5341'4d50'0004ULL;
inline constexpr std::uint64_t fuzz = 0x465a'5a5a'0005ULL;
}  // namespace stream

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag, std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(root) ^ tag) + index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t root, std::uint64_t tag, std::uint64_t index = 0) : engine_(derive_seed(root, tag, index)) {}

  // Uniform on [0, 1) from the top 53 bits; portable across standard libraries.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one value per call keeps the stream position simple.
  double normal();

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hierent
