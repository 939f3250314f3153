// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit on any
// failure.
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <iostream>
#include <string>

#include <fmt/format.h>

#include "hierent/config.hpp"
#include "hierent/error.hpp"
#include "hierent/verify.hpp"

using namespace hierent;

namespace {

const double kLogGolden = std::log((3.0 + std::sqrt(5.0)) / 2.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

const TorusMap& cat() {
  static const TorusMap m = make_linear_system(catalog::cat_matrix());
  return m;
}
const TorusMap& block() {
  static const TorusMap m = make_linear_system(catalog::block_matrix());
  return m;
}
const TorusMap& perturbed() {
  static const TorusMap m = make_perturbed_system(catalog::cat_matrix(), 0.05);
  return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome cat_pesin() {
  const auto start = std::chrono::steady_clock::now();
  EntropyParams p;
  p.epsilons = {0.1, 0.05, 0.025};
  p.n_min = 2;
  p.n_max = 12;
  p.samples = 8;
  const EntropyEstimate h = volume_entropy(cat(), 1, 1, p);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double err = rel(h.h_estimate, kLogGolden);
  return {err <= 0.05 && seconds <= 60.0,
          fmt::format("h = {:.7f}, target {:.7f}, rel err {:.2e}, {:.2f} s", h.h_estimate, kLogGolden, err, seconds)};
}

Outcome block_hierarchy() {
  EntropyParams p;
  const EntropyEstimate h1 = volume_entropy(block(), 1, 2, p);
  const EntropyEstimate h2 = volume_entropy(block(), 2, 1, p);
  const double e1 = rel(h1.h_estimate, 2.8872710);
  const double e2 = rel(h2.h_estimate, 1.9248473);
  return {e1 <= 0.10 && e2 <= 0.10,
          fmt::format("h1 = {:.7f} (rel {:.2e}), h2 = {:.7f} (rel {:.2e})", h1.h_estimate, e1, h2.h_estimate, e2)};
}

Outcome ruelle() {
  ExperimentConfig c = default_config();
  c.params.methods = {Method::volume};
  const VerificationReport r = run_catalog(c.systems, c.params);
  std::string detail;
  bool ok = !r.rows.empty();
  for (const auto& row : r.rows) {
    const bool pass = !row.failed && row.h_estimate <= row.rhs + c.params.margin + row.std_error;
    ok = ok && pass;
    detail += fmt::format("{}/{}: {:.4f} <= {:.4f} + {:.2f} + {:.4f}{}; ", row.system, row.level, row.h_estimate,
                          row.rhs, c.params.margin, row.std_error, pass ? "" : " VIOLATED " + row.note);
  }
  return {ok, detail};
}

Outcome power_rule() {
  EntropyParams p;
  const PowerRule r = power_rule_check(cat(), 1, 1, 2, p);
  const double gap = std::abs(r.h_fm - 2.0 * r.h_f);
  return {gap <= 0.1, fmt::format("h(f) = {:.6f}, h(f^2) = {:.6f}, gap {:.2e}", r.h_f, r.h_fm, gap)};
}

Outcome domination() {
  DominationOptions opt;
  const DominationCertificate c_cat = certify_domination(cat(), 1, 1, opt);
  const DominationCertificate c_block = certify_domination(block(), 2, 1, opt);
  const DominationCertificate c_pert = certify_domination(perturbed(), 1, 1, opt);
  const bool ok = c_cat.N == 1 && std::abs(c_cat.worst_ratio - 0.1458980) <= 1e-6 && c_block.N == 1 &&
                  std::abs(c_block.worst_ratio - 0.3819660) <= 1e-6 && c_pert.N == 1 && c_pert.worst_ratio < 0.25 &&
                  c_pert.points_checked >= 1000;
  return {ok, fmt::format("cat N={} {:.9f}; block i=2 N={} {:.9f}; perturbed N={} {:.6f} over {} points", c_cat.N,
                          c_cat.worst_ratio, c_block.N, c_block.worst_ratio, c_pert.N, c_pert.worst_ratio,
                          c_pert.points_checked)};
}

Outcome spectra() {
  const SpectrumOptions opt{10000, 1000, 1, 0.05};
  const LyapunovSpectrum s_cat = lyapunov_spectrum(cat(), opt);
  const LyapunovSpectrum s_block = lyapunov_spectrum(block(), opt);
  const LyapunovSpectrum s_pert = lyapunov_spectrum(perturbed(), SpectrumOptions{});
  double worst = 0.0;
  const double cat_expected[] = {kLogGolden, -kLogGolden};
  const double block_expected[] = {2 * kLogGolden, kLogGolden, -kLogGolden, -2 * kLogGolden};
  bool shape = s_cat.raw.size() == 2 && s_block.raw.size() == 4;
  if (shape) {
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(s_cat.raw[static_cast<std::size_t>(j)] - cat_expected[j]));
    for (int j = 0; j < 4; ++j)
      worst = std::max(worst, std::abs(s_block.raw[static_cast<std::size_t>(j)] - block_expected[j]));
  }
  const double sum = s_pert.raw[0] + s_pert.raw[1];
  return {shape && worst <= 1e-3 && std::abs(sum) <= 1e-3,
          fmt::format("linear max err {:.2e}; perturbed {:.6f} + {:.6f} = {:.2e}", worst, s_pert.raw[0],
                      s_pert.raw[1], sum)};
}

Outcome cross_agreement() {
  EntropyParams p;
  const EntropyEstimate vol = volume_entropy(cat(), 1, 1, p);
  const EntropyEstimate sep = counting_entropy(cat(), 1, 1, Method::separated, p);
  EntropyParams pp = p;
  pp.samples = 64;
  const EntropyEstimate part = partition_conditional_entropy(cat(), 1, 1, pp);
  const double h[] = {vol.h_estimate, sep.h_estimate, part.h_estimate};
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) worst = std::max(worst, std::abs(h[a] - h[b]) / std::min(h[a], h[b]));
  return {worst <= 0.10, fmt::format("volume {:.4f}, separated {:.4f}, partition {:.4f}; max pairwise {:.2e}", h[0],
                                     h[1], h[2], worst)};
}

Outcome graph_regime() {
  const TorusMap& f = perturbed();
  const double lambda = lyapunov_spectrum(f, SpectrumOptions{}).exponents.front().value;
  double max_dispersion = 0.0;
  int membership_failures = 0;
  int membership_checked = 0;
  for (const TorusPoint& x : sample_points(2, 4, 2024)) {
    const SplittingAtPoint sp = oseledec_splitting(f, x, 1, 1, SplittingOptions{});
    LeafPatch patch = flat_graph_patch(x, 1, sp.f_basis, linalg::orthogonal_complement(sp.f_basis), 0.1);
    for (int k = 0; k < 100; ++k) {
      patch = graph_transform_step(f, patch, kDefaultDispersionBound);
      max_dispersion = std::max(max_dispersion, patch.dispersion);
    }
    GrowOptions g;
    g.iterations = 30;
    const std::vector<LeafPatch> chain = grow_unstable_chain(f, x, 1, 1, g);
    for (double s : {-0.09, -0.05, -0.01, 0.003, 0.02, 0.06, 0.1}) {
      const std::vector<double> d = backward_leaf_distances(f, chain, Vector::Constant(1, s), 20);
      const double rate = std::log(d[20] / d[0]) / 20.0;
      ++membership_checked;
      if (rate > -(lambda - 0.05)) ++membership_failures;
    }
  }
  return {max_dispersion <= kDefaultDispersionBound && membership_failures == 0,
          fmt::format("max dispersion {:.4f} over 4 x 100 steps; membership {}/{} leaf points at n = 20", max_dispersion,
                      membership_checked - membership_failures, membership_checked)};
}

// Randomized property cases; each returns the number of violations.
struct Fuzz {
  int cases = 0;
  int violations = 0;
  std::string first;
  void check(bool ok, const std::string& what) {
    if (!ok && violations++ == 0) first = what;
  }
};

void fuzz_bowen_monotone(Fuzz& fz, Rng& rng) {
  const int which = static_cast<int>(rng.next() % 10);
  const TorusMap& map = which == 0 ? perturbed() : which < 5 ? cat() : block();
  const int fast_dim = which < 5 ? 1 : 1 + static_cast<int>(rng.next() % 2);
  EntropyParams p;
  const TorusPoint x = sample_points(map.dimension(), 1, rng.next()).front();
  const LeafPatch patch = entropy_patch(map, x, 1, fast_dim, p);
  const double e0 = rng.uniform(0.02, 0.12);
  const std::vector<double> eps{e0, e0 * rng.uniform(0.3, 0.95)};
  const int n_max = 2 + static_cast<int>(rng.next() % 10);
  BowenOptions opt;
  opt.force_quadrature = rng.uniform() < 0.2;
  const BowenProfile prof = bowen_profile(map, patch, eps, n_max, opt);
  for (std::size_t e = 0; e < 2; ++e)
    for (int n = 1; n < n_max; ++n)
      fz.check(prof.volume[e][static_cast<std::size_t>(n)] <= prof.volume[e][static_cast<std::size_t>(n - 1)],
               "Bowen volume increased with n");
  for (int n = 0; n < n_max; ++n)
    fz.check(prof.volume[1][static_cast<std::size_t>(n)] <= prof.volume[0][static_cast<std::size_t>(n)],
             "Bowen volume increased as epsilon shrank");
  ++fz.cases;
}

void fuzz_counts(Fuzz& fz, Rng& rng) {
  const bool nonlinear = rng.uniform() < 0.25;
  const TorusMap& map = nonlinear ? perturbed() : cat();
  EntropyParams p;
  p.grid_nodes = 129;
  const TorusPoint x = sample_points(2, 1, rng.next()).front();
  const LeafPatch patch = entropy_patch(map, x, 1, 1, p);
  const int n_max = 1 + static_cast<int>(rng.next() % 5);
  const double eps = rng.uniform(0.02, 0.1);
  const CandidateSet c = make_candidates(map, patch, n_max, eps * rng.uniform(0.02, 0.1));
  std::size_t previous = 0;
  for (int n = 1; n <= n_max; ++n) {
    const std::size_t sep = separated_count(c, n, eps).value;
    const std::size_t span = spanning_count(c, n, eps).value;
    const std::size_t sep2 = separated_count(c, n, 2 * eps).value;
    fz.check(sep >= previous, "separated count decreased with n");
    fz.check(span <= sep, "spanning count above separated count");
    fz.check(sep2 <= span, "separated(2 eps) above spanning(eps)");
    previous = sep;
  }
  ++fz.cases;
}

void fuzz_jobs(Fuzz& fz, Rng& rng) {
  const int jobs = 2 + static_cast<int>(rng.next() % 7);
  if (rng.uniform() < 0.5) {
    DominationOptions a;
    a.samples = 4;
    a.orbit_length = 200;
    a.seed = rng.next();
    DominationOptions b = a;
    b.jobs = jobs;
    const auto ca = certify_domination(perturbed(), 1, 1, a);
    const auto cb = certify_domination(perturbed(), 1, 1, b);
    fz.check(ca.worst_ratio == cb.worst_ratio && ca.N == cb.N, "domination differs across jobs");
  } else {
    EntropyParams a;
    a.samples = 6;
    a.seed = rng.next();
    EntropyParams b = a;
    b.jobs = jobs;
    const auto ha = volume_entropy(block(), 1 + static_cast<int>(rng.next() % 2), 1, a);
    const auto hb = volume_entropy(block(), ha.level, 1, b);
    fz.check(ha.h_estimate == hb.h_estimate && ha.std_error == hb.std_error, "entropy differs across jobs");
  }
  ++fz.cases;
}

IntMatrix random_unimodular(Rng& rng, int d) {
  IntMatrix m = IntMatrix::Identity(d, d);
  for (int k = 0; k < 3 * d; ++k) {
    const int i = static_cast<int>(rng.next() % static_cast<std::uint64_t>(d));
    int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(d - 1));
    if (j >= i) ++j;
    const long long s = rng.uniform() < 0.5 ? 1 : -1;
    m.row(i) += s * m.row(j);
  }
  return m;
}

void fuzz_inverse_symmetry(Fuzz& fz, Rng& rng) {
  const int d = 2 + static_cast<int>(rng.next() % 3);
  IntMatrix m;
  std::optional<TorusMap> map;
  while (!map) {
    m = random_unimodular(rng, d);
    if (m.cwiseAbs().maxCoeff() > 12) continue;
    try {
      map = make_linear_system(m);
    } catch (const Error&) {
    }
  }
  const TorusMap inverse = make_linear_system(map->inverse_matrix());
  const SpectrumOptions opt{2000, 200, rng.next(), 0.05};
  const LyapunovSpectrum fwd = lyapunov_spectrum(*map, opt);
  const LyapunovSpectrum bwd = lyapunov_spectrum(inverse, opt);
  for (int j = 0; j < d; ++j)
    fz.check(std::abs(fwd.raw[static_cast<std::size_t>(j)] + bwd.raw[static_cast<std::size_t>(d - 1 - j)]) <= 1e-2,
             fmt::format("inverse spectrum not negated for {}x{} matrix", d, d));
  ++fz.cases;
}

Outcome property_suites() {
  Fuzz fz;
  Rng rng(1, stream::fuzz);
  for (int k = 0; k < 300; ++k) fuzz_bowen_monotone(fz, rng);
  for (int k = 0; k < 300; ++k) fuzz_counts(fz, rng);
  for (int k = 0; k < 100; ++k) fuzz_jobs(fz, rng);
  for (int k = 0; k < 400; ++k) fuzz_inverse_symmetry(fz, rng);
  return {fz.cases >= 1000 && fz.violations == 0,
          fmt::format("{} cases, {} violations{}", fz.cases, fz.violations,
                      fz.violations ? " (first: " + fz.first + ")" : "")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"cat map volume entropy", cat_pesin},
      {"block map hierarchy levels", block_hierarchy},
      {"Ruelle inequality over the catalog", ruelle},
      {"power rule on the cat map", power_rule},
      {"domination certificates", domination},
      {"Lyapunov spectra", spectra},
      {"estimator cross-agreement", cross_agreement},
      {"graph transform and leaf membership", graph_regime},
      {"property suites", property_suites},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::cout << fmt::format("[{}] {} {}: {} ({:.1f} s)", o.pass ? "PASS" : "FAIL", index++, name, o.detail, seconds)
              << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed", 9 - failures, 9) << std::endl;
  return failures == 0 ? 0 : 1;
}
