#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hierent/leaf.hpp"

namespace hierent {

enum class Method { volume, separated, spanning, partition };

std::string_view to_string(Method method) noexcept;
// Throws ValidationError for unknown names.
Method parse_method(std::string_view name);

struct BowenOptions {
  int shells = 47;
  int per_shell = 0;  // 0: 512 cells per shell for 1D leaves, 64 otherwise
  bool force_quadrature = false;
};

struct BowenBallRecord {
  TorusPoint base;
  int level = 1;
  int n = 1;
  double epsilon = 0.0;
  double volume = 0.0;
  bool exact = false;
  // d <= d^i <= C d on the patch; 1 for affine patches.
  double comparability = 1.0;
};

// Bowen-ball volumes for every epsilon and every n in [1, n_max] from one
// pass over the patch. volume[e][n - 1] is the leaf volume of
// {y : |f^k y - f^k x| < epsilons[e], 0 <= k < n}.
struct BowenProfile {
  std::vector<double> epsilons;
  int n_max = 0;
  std::vector<std::vector<double>> volume;
  double patch_volume = 0.0;
  bool exact = false;
  double comparability = 1.0;
};

BowenProfile bowen_profile(const TorusMap& map, const LeafPatch& patch, const std::vector<double>& epsilons,
                           int n_max, const BowenOptions& options = {});
BowenBallRecord bowen_ball_volume(const TorusMap& map, const LeafPatch& patch, int n, double epsilon,
                                  const BowenOptions& options = {});

// Leaf points on a regular F-coordinate grid (lexicographic order, axis 0
// most significant) with their displacements from the base orbit at times
// 0..n_max-1.
struct CandidateSet {
  int dim = 0;
  int leaf_dim = 0;
  int n_max = 0;
  double spacing = 0.0;
  std::size_t count = 0;
  std::vector<double> positions;  // [(k * dim + c) * count + i]

  double coordinate(int k, int c, std::size_t i) const {
    return positions[(static_cast<std::size_t>(k) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)) *
                         count + i];
  }
  // max_{k < n} |f^k a - f^k b|.
  double bowen_distance(std::size_t a, std::size_t b, int n) const;
};

inline constexpr std::size_t kDefaultCandidateCap = 1'000'000;

// ResolutionTooCoarse when the grid would exceed `cap` points.
CandidateSet make_candidates(const TorusMap& map, const LeafPatch& patch, int n_max, double spacing,
                             std::size_t cap = kDefaultCandidateCap);

// Spacing resolving the n_max-step Bowen metric at scale epsilon: a tenth of
// epsilon divided by the leaf expansion of f^{n_max - 1} at the base.
double bowen_resolution(const TorusMap& map, const LeafPatch& patch, int n_max, double epsilon);

struct GrowthCount {
  Method kind = Method::separated;
  std::size_t value = 0;
  int n = 1;
  double epsilon = 0.0;
  double delta = 0.0;
  double spacing = 0.0;
};

// Greedy maximal (n, eps)-separated set in lexicographic candidate order;
// members are pairwise at Bowen distance >= eps.
GrowthCount separated_count(const CandidateSet& candidates, int n, double epsilon);
// Greedy (n, eps)-spanning set: every candidate within Bowen distance < eps
// of a member. Reports min(cover, separated), both being spanning sets.
GrowthCount spanning_count(const CandidateSet& candidates, int n, double epsilon);

// Convenience forms building their own candidate grid; ResolutionTooCoarse if
// the required grid exceeds the cap.
GrowthCount separated_count(const TorusMap& map, const LeafPatch& patch, int n, double epsilon,
                            std::size_t cap = kDefaultCandidateCap);
GrowthCount spanning_count(const TorusMap& map, const LeafPatch& patch, int n, double epsilon,
                           std::size_t cap = kDefaultCandidateCap);

// Leaf-volume fraction of the patch whose first n images share x's cube in
// the partition of the torus into cells = round(1/mesh) cubes per axis, for
// n = 1..n_max.
std::vector<double> partition_fractions(const TorusMap& map, const LeafPatch& patch, double mesh, int n_max,
                                        const BowenOptions& options = {});

struct EntropyParams {
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  int n_min = 2;
  int n_max = 12;
  int counting_n_min = 2;
  int counting_n_max = 8;
  int samples = 8;
  double delta = 0.3;
  double c_max = kDefaultDispersionBound;
  int grow_iterations = 30;
  int grid_nodes = kDefaultGridNodes;
  double mesh = 0.05;
  double mesh_limit = 0.0;  // 0: the largest epsilon
  std::size_t candidate_cap = kDefaultCandidateCap;
  double plateau_tolerance = 0.05;
  bool require_plateau = false;
  BowenOptions bowen;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct EpsilonSlope {
  double epsilon = 0.0;
  double slope = 0.0;
  double std_error = 0.0;
  double residual = 0.0;
  bool converged = false;
};

struct CurvePoint {
  double epsilon = 0.0;
  int n = 0;
  double value = 0.0;  // mean over samples
};

struct EntropyEstimate {
  int level = 1;
  Method method = Method::volume;
  std::vector<EpsilonSlope> per_epsilon;
  double h_estimate = 0.0;
  double std_error = 0.0;
  bool plateau_found = false;
  int sample_count = 0;
  int n_min = 0;
  int n_max = 0;
  double comparability = 1.0;
  std::vector<CurvePoint> curve;
  std::string note;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double residual = 0.0;  // RMS
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Sample base points, uniform on the torus from the samples stream.
std::vector<TorusPoint> sample_points(int dimension, int count, std::uint64_t seed);

// Affine patch for linear maps, grown graph patch otherwise.
LeafPatch entropy_patch(const TorusMap& map, const TorusPoint& x, int level, int fast_dim,
                        const EntropyParams& params);

EntropyEstimate volume_entropy(const TorusMap& map, int level, int fast_dim, const EntropyParams& params);
EntropyEstimate counting_entropy(const TorusMap& map, int level, int fast_dim, Method kind,
                                 const EntropyParams& params);
EntropyEstimate partition_conditional_entropy(const TorusMap& map, int level, int fast_dim,
                                              const EntropyParams& params);
EntropyEstimate estimate_entropy(const TorusMap& map, int level, int fast_dim, Method method,
                                 const EntropyParams& params);

struct PowerRule {
  double h_f = 0.0;
  double h_fm = 0.0;
  double ratio = 0.0;
};

PowerRule power_rule_check(const TorusMap& map, int level, int fast_dim, int m, const EntropyParams& params);

}  // namespace hierent
