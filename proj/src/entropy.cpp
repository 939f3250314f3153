#include "hierent/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "hierent/error.hpp"
#include "hierent/parallel.hpp"

namespace hierent {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::volume: return "volume";
    case Method::separated: return "separated";
    case Method::spanning: return "spanning";
    case Method::partition: return "partition";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::volume, Method::separated, Method::spanning, Method::partition})
    if (name == to_string(m)) return m;
  throw Error(ErrorKind::ValidationError, fmt::format("unknown method '{}'", name));
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::PreconditionViolated, "need >= 2 points to fit");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.residual = std::sqrt(sse / n);
  fit.std_error = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return fit;
}

std::vector<TorusPoint> sample_points(int dimension, int count, std::uint64_t seed) {
  std::vector<TorusPoint> points;
  points.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int s = 0; s < count; ++s) {
    Rng rng(seed, stream::samples, static_cast<std::uint64_t>(s));
    Vector x(dimension);
    for (int c = 0; c < dimension; ++c) x(c) = rng.uniform();
    points.emplace_back(x);
  }
  return points;
}

LeafPatch entropy_patch(const TorusMap& map, const TorusPoint& x, int level, int fast_dim,
                        const EntropyParams& params) {
  if (map.is_linear()) return affine_leaf_patch(map, x, level, fast_dim, params.delta);
  GrowOptions grow;
  grow.radius = params.delta;
  grow.c_max = params.c_max;
  grow.iterations = params.grow_iterations;
  grow.nodes_per_axis = params.grid_nodes;
  grow.seed = params.seed;
  return grow_unstable_patch(map, x, level, fast_dim, grow);
}

namespace {

// ys[s][e][j]: growth quantity of sample s at scale e and n = n_min + j.
using SampleCurves = std::vector<std::vector<std::vector<double>>>;

void validate(const EntropyParams& params, int n_min, int n_max) {
  if (params.samples < 1) throw Error(ErrorKind::PreconditionViolated, "samples must be >= 1");
  if (params.epsilons.empty()) throw Error(ErrorKind::PreconditionViolated, "epsilon grid is empty");
  for (std::size_t e = 1; e < params.epsilons.size(); ++e)
    if (!(params.epsilons[e] < params.epsilons[e - 1]))
      throw Error(ErrorKind::PreconditionViolated, "epsilon grid must descend");
  if (n_min < 1 || n_max - n_min + 1 < 4)
    throw Error(ErrorKind::PreconditionViolated, fmt::format("n range {}..{} needs >= 4 points", n_min, n_max));
}

EntropyEstimate summarize(int level, Method method, const std::vector<double>& scales, int n_min, int n_max,
                          const SampleCurves& ys, const EntropyParams& params) {
  EntropyEstimate estimate;
  estimate.level = level;
  estimate.method = method;
  estimate.sample_count = static_cast<int>(ys.size());
  estimate.n_min = n_min;
  estimate.n_max = n_max;
  std::vector<double> ns;
  for (int n = n_min; n <= n_max; ++n) ns.push_back(n);
  const auto samples = static_cast<double>(ys.size());

  for (std::size_t e = 0; e < scales.size(); ++e) {
    std::vector<double> slopes;
    double residual = 0.0;
    double fit_error = 0.0;
    for (const auto& sample : ys) {
      const LineFit fit = fit_line(ns, sample[e]);
      slopes.push_back(fit.slope);
      residual += fit.residual / samples;
      fit_error = std::max(fit_error, fit.std_error);
    }
    EpsilonSlope row;
    row.epsilon = scales[e];
    row.slope = std::accumulate(slopes.begin(), slopes.end(), 0.0) / samples;
    row.residual = residual;
    if (slopes.size() >= 2) {
      double ss = 0.0;
      for (double s : slopes) ss += (s - row.slope) * (s - row.slope);
      row.std_error = std::sqrt(ss / (samples - 1.0) / samples);
    } else {
      row.std_error = fit_error;
    }
    estimate.per_epsilon.push_back(row);
    for (std::size_t j = 0; j < ns.size(); ++j) {
      double mean = 0.0;
      for (const auto& sample : ys) mean += sample[e][j] / samples;
      estimate.curve.push_back({scales[e], n_min + static_cast<int>(j), mean});
    }
  }

  auto& rows = estimate.per_epsilon;
  const auto agree = [&](std::size_t a, std::size_t b) {
    return std::abs(rows[a].slope - rows[b].slope) <= params.plateau_tolerance * std::abs(rows[b].slope);
  };
  for (std::size_t e = 0; e + 1 < rows.size(); ++e)
    if (agree(e, e + 1)) rows[e].converged = rows[e + 1].converged = true;

  if (rows.size() == 1) {
    rows[0].converged = true;
    estimate.plateau_found = true;
    estimate.h_estimate = rows[0].slope;
    estimate.std_error = rows[0].std_error;
    return estimate;
  }
  for (std::size_t e = rows.size() - 1; e >= 1; --e) {
    if (agree(e - 1, e)) {
      estimate.plateau_found = true;
      estimate.h_estimate = rows[e].slope;
      estimate.std_error = rows[e].std_error;
      return estimate;
    }
  }
  estimate.h_estimate = rows.back().slope;
  estimate.std_error = rows.back().std_error;
  std::string listing;
  for (const auto& r : rows) listing += fmt::format(" eps={}:{:.4f}", r.epsilon, r.slope);
  estimate.note = "no plateau;" + listing;
  if (params.require_plateau)
    throw Error(ErrorKind::NoPlateau, fmt::format("no two adjacent slopes agree within {}%:{}",
                                                  100.0 * params.plateau_tolerance, listing));
  return estimate;
}

std::vector<LeafPatch> sample_patches(const TorusMap& map, int level, int fast_dim, const EntropyParams& params) {
  const std::vector<TorusPoint> points = sample_points(map.dimension(), params.samples, params.seed);
  std::vector<LeafPatch> patches(points.size());
  parallel_for(points.size(), params.jobs,
               [&](std::size_t s) { patches[s] = entropy_patch(map, points[s], level, fast_dim, params); });
  return patches;
}

double negative_log(double fraction) {
  if (!(fraction > 0.0))
    throw Error(ErrorKind::ResolutionTooCoarse, "leaf set fell below the quadrature resolution");
  return -std::log(fraction);
}

}  // namespace

EntropyEstimate volume_entropy(const TorusMap& map, int level, int fast_dim, const EntropyParams& params) {
  validate(params, params.n_min, params.n_max);
  const std::vector<LeafPatch> patches = sample_patches(map, level, fast_dim, params);
  SampleCurves ys(patches.size());
  std::vector<double> comparability(patches.size(), 1.0);
  parallel_for(patches.size(), params.jobs, [&](std::size_t s) {
    const BowenProfile profile = bowen_profile(map, patches[s], params.epsilons, params.n_max, params.bowen);
    comparability[s] = profile.comparability;
    ys[s].resize(params.epsilons.size());
    for (std::size_t e = 0; e < params.epsilons.size(); ++e)
      for (int n = params.n_min; n <= params.n_max; ++n)
        ys[s][e].push_back(negative_log(profile.volume[e][static_cast<std::size_t>(n - 1)] / profile.patch_volume));
  });
  EntropyEstimate estimate =
      summarize(level, Method::volume, params.epsilons, params.n_min, params.n_max, ys, params);
  estimate.comparability = *std::max_element(comparability.begin(), comparability.end());
  return estimate;
}

EntropyEstimate counting_entropy(const TorusMap& map, int level, int fast_dim, Method kind,
                                 const EntropyParams& params) {
  if (kind != Method::separated && kind != Method::spanning)
    throw Error(ErrorKind::PreconditionViolated, "counting needs the separated or spanning method");
  validate(params, params.counting_n_min, params.counting_n_max);
  for (double eps : params.epsilons)
    if (eps >= params.delta)
      throw Error(ErrorKind::EpsilonTooLarge, fmt::format("epsilon {} >= patch radius {}", eps, params.delta));
  const std::vector<LeafPatch> patches = sample_patches(map, level, fast_dim, params);
  const double eps_min = params.epsilons.back();

  // Largest horizon whose candidate grid fits the cap on every sample.
  std::vector<int> horizon(patches.size(), 0);
  parallel_for(patches.size(), params.jobs, [&](std::size_t s) {
    const int k = patches[s].leaf_dim();
    for (int n = params.counting_n_max; n >= params.counting_n_min; --n) {
      const double spacing = bowen_resolution(map, patches[s], n, eps_min);
      const double side = 2.0 * std::floor(patches[s].radius / spacing) + 1.0;
      if (std::pow(side, k) * ball_volume(k, 1.0) / std::pow(2.0, k) <= static_cast<double>(params.candidate_cap)) {
        horizon[s] = n;
        return;
      }
    }
  });
  const int n_max = *std::min_element(horizon.begin(), horizon.end());
  if (n_max == 0)
    throw Error(ErrorKind::ResolutionTooCoarse,
                fmt::format("candidate cap {} fits no n >= {} at epsilon {}", params.candidate_cap,
                            params.counting_n_min, eps_min));
  if (n_max - params.counting_n_min + 1 < 4)
    throw Error(ErrorKind::ResolutionTooCoarse,
                fmt::format("candidate cap {} allows n <= {} only; counting needs 4 values of n",
                            params.candidate_cap, n_max));

  SampleCurves ys(patches.size());
  parallel_for(patches.size(), params.jobs, [&](std::size_t s) {
    ys[s].resize(params.epsilons.size());
    for (std::size_t e = 0; e < params.epsilons.size(); ++e) {
      const double eps = params.epsilons[e];
      for (int n = params.counting_n_min; n <= n_max; ++n) {
        const CandidateSet candidates =
            make_candidates(map, patches[s], n, bowen_resolution(map, patches[s], n, eps), params.candidate_cap);
        const GrowthCount count =
            kind == Method::separated ? separated_count(candidates, n, eps) : spanning_count(candidates, n, eps);
        ys[s][e].push_back(std::log(static_cast<double>(count.value)));
      }
    }
  });
  EntropyEstimate estimate = summarize(level, kind, params.epsilons, params.counting_n_min, n_max, ys, params);
  if (n_max < params.counting_n_max)
    estimate.note += fmt::format("{}n range truncated to {}..{} by the candidate cap", estimate.note.empty() ? "" : "; ",
                                 params.counting_n_min, n_max);
  return estimate;
}

EntropyEstimate partition_conditional_entropy(const TorusMap& map, int level, int fast_dim,
                                              const EntropyParams& params) {
  validate(params, params.n_min, params.n_max);
  const double limit = params.mesh_limit > 0.0 ? params.mesh_limit : params.epsilons.front();
  if (params.mesh > limit)
    throw Error(ErrorKind::MeshTooCoarse, fmt::format("mesh {} > {}", params.mesh, limit));
  const std::vector<LeafPatch> patches = sample_patches(map, level, fast_dim, params);
  SampleCurves ys(patches.size());
  parallel_for(patches.size(), params.jobs, [&](std::size_t s) {
    const std::vector<double> fractions = partition_fractions(map, patches[s], params.mesh, params.n_max, params.bowen);
    ys[s].resize(1);
    for (int n = params.n_min; n <= params.n_max; ++n)
      ys[s][0].push_back(negative_log(fractions[static_cast<std::size_t>(n - 1)]));
  });
  return summarize(level, Method::partition, {params.mesh}, params.n_min, params.n_max, ys, params);
}

EntropyEstimate estimate_entropy(const TorusMap& map, int level, int fast_dim, Method method,
                                 const EntropyParams& params) {
  switch (method) {
    case Method::volume: return volume_entropy(map, level, fast_dim, params);
    case Method::separated:
    case Method::spanning: return counting_entropy(map, level, fast_dim, method, params);
    case Method::partition: return partition_conditional_entropy(map, level, fast_dim, params);
  }
  throw Error(ErrorKind::PreconditionViolated, "unknown method");
}

PowerRule power_rule_check(const TorusMap& map, int level, int fast_dim, int m, const EntropyParams& params) {
  if (m < 1) throw Error(ErrorKind::PreconditionViolated, "power must be >= 1");
  PowerRule rule;
  rule.h_f = volume_entropy(map, level, fast_dim, params).h_estimate;
  rule.h_fm = volume_entropy(map.iterate(m), level, fast_dim, params).h_estimate;
  rule.ratio = rule.h_fm / rule.h_f;
  return rule;
}

}  // namespace hierent
