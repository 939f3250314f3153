#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "hierent/kernels.hpp"
#include "hierent/rng.hpp"

using namespace hierent;
using namespace hierent::kernels;

namespace {

struct Soa {
  std::vector<std::vector<double>> data;
  std::vector<double*> ptrs;
  Soa(int dim, std::size_t count) : data(static_cast<std::size_t>(dim), std::vector<double>(count)) {
    bind();
  }
  Soa(const Soa& other) : data(other.data) { bind(); }
  void bind() {
    ptrs.clear();
    for (auto& v : data) ptrs.push_back(v.data());
  }
  Block block() { return {static_cast<int>(data.size()), data[0].size(), ptrs.data()}; }
};

void fill(Soa& soa, Rng& rng, double scale) {
  for (auto& v : soa.data)
    for (double& x : v) x = rng.uniform(-scale, scale);
}

bool bitwise_equal(const Soa& a, const Soa& b) {
  for (std::size_t c = 0; c < a.data.size(); ++c)
    if (std::memcmp(a.data[c].data(), b.data[c].data(), a.data[c].size() * sizeof(double)) != 0) return false;
  return true;
}

}  // namespace

TEST(Kernels, SincosPiAccuracy) {
  Rng rng(1, stream::fuzz);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform(-4.0, 4.0);
    double s = 0.0, c = 0.0;
    sincos_pi(v, s, c);
    EXPECT_NEAR(s, std::sin(M_PI * v), 1e-14);
    EXPECT_NEAR(c, std::cos(M_PI * v), 1e-14);
  }
}

TEST(Kernels, ScalarAdvanceMatchesFormula) {
  const double a[] = {2, 1, 1, 1};
  const double base = 0.37;
  const DisplacementStep step{2, a, 0.05, 1, 0, std::cos(2 * M_PI * base), std::sin(2 * M_PI * base)};
  Soa soa(2, 64);
  Rng rng(2, stream::fuzz);
  fill(soa, rng, 0.2);
  const Soa before = soa;
  scalar::advance(step, soa.block());
  for (std::size_t i = 0; i < 64; ++i) {
    const double vx = before.data[0][i];
    const double vy = before.data[1][i];
    const double sx = vx + 0.05 * (std::sin(2 * M_PI * (base + vy)) - std::sin(2 * M_PI * base));
    EXPECT_NEAR(soa.data[0][i], 2 * sx + vy, 1e-14);
    EXPECT_NEAR(soa.data[1][i], sx + vy, 1e-14);
  }
}

class KernelEquivalence : public ::testing::TestWithParam<std::size_t> {
 protected:
  void SetUp() override {
    if (!avx2_available()) GTEST_SKIP() << "AVX2 not available";
  }
};

TEST_P(KernelEquivalence, AdvanceBitwise) {
  const std::size_t count = GetParam();
  Rng rng(count, stream::fuzz);
  for (int dim : {2, 4}) {
    std::vector<double> a(static_cast<std::size_t>(dim * dim));
    for (double& x : a) x = std::floor(rng.uniform(-3.0, 4.0));
    for (double amplitude : {0.0, 0.05}) {
      const double b = rng.uniform();
      const DisplacementStep step{dim, a.data(), amplitude, 1, 0, std::cos(2 * M_PI * b), std::sin(2 * M_PI * b)};
      Soa s(dim, count);
      fill(s, rng, 0.5);
      Soa v = s;
      for (int k = 0; k < 5; ++k) {
        scalar::advance(step, s.block());
        avx2::advance(step, v.block());
      }
      EXPECT_TRUE(bitwise_equal(s, v)) << "dim " << dim << " amplitude " << amplitude;
    }
  }
}

TEST_P(KernelEquivalence, BallExitsIdentical) {
  const std::size_t count = GetParam();
  Rng rng(count + 100, stream::fuzz);
  for (int dim : {2, 3, 4}) {
    Soa s(dim, count);
    fill(s, rng, 0.1);
    std::vector<int> ss(count, kAlive), sv(count, kAlive);
    for (int step = 0; step < 4; ++step) {
      const double eps2 = 0.01 / (step + 1);
      scalar::mark_ball_exits(s.block(), eps2, step, ss.data());
      avx2::mark_ball_exits(s.block(), eps2, step, sv.data());
    }
    EXPECT_EQ(ss, sv);
  }
}

TEST_P(KernelEquivalence, CubeExitsIdentical) {
  const std::size_t count = GetParam();
  Rng rng(count + 200, stream::fuzz);
  for (int dim : {2, 4}) {
    Soa s(dim, count);
    fill(s, rng, 0.08);
    std::vector<double> ref(static_cast<std::size_t>(dim)), cell(static_cast<std::size_t>(dim));
    const double cells = 20.0;
    for (int c = 0; c < dim; ++c) {
      ref[static_cast<std::size_t>(c)] = rng.uniform();
      cell[static_cast<std::size_t>(c)] = cube_cell(ref[static_cast<std::size_t>(c)], cells);
    }
    std::vector<int> ss(count, kAlive), sv(count, kAlive);
    scalar::mark_cube_exits(s.block(), ref.data(), cell.data(), cells, 3, ss.data());
    avx2::mark_cube_exits(s.block(), ref.data(), cell.data(), cells, 3, sv.data());
    EXPECT_EQ(ss, sv);
    for (std::size_t i = 0; i < count; ++i) {
      bool same = true;
      for (int c = 0; c < dim; ++c)
        same = same && cube_cell(ref[static_cast<std::size_t>(c)] + s.data[static_cast<std::size_t>(c)][i], cells) ==
                           cell[static_cast<std::size_t>(c)];
      EXPECT_EQ(ss[i], same ? kAlive : 3);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Counts, KernelEquivalence, ::testing::Values(1, 3, 4, 7, 64, 1001));

TEST(Kernels, BackendSwitch) {
  const Backend original = active_backend();
  set_active_backend(Backend::scalar);
  EXPECT_EQ(active_backend(), Backend::scalar);
  set_active_backend(Backend::avx2);
  EXPECT_EQ(active_backend(), avx2_available() ? Backend::avx2 : Backend::scalar);
  set_active_backend(original);
  EXPECT_EQ(to_string(Backend::scalar), "scalar");
}
