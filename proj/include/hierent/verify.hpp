#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hierent/domination.hpp"
#include "hierent/entropy.hpp"

namespace hierent {

struct SystemDef {
  std::string name;
  MapKind kind = MapKind::linear;
  std::vector<std::vector<long long>> matrix;
  double amplitude = 0.0;
  double amplitude_cap = kDefaultAmplitudeCap;
  int power = 1;
  std::vector<int> levels;  // empty: every level 1..u
};

TorusMap build_system(const SystemDef& def);

struct VerifyParams {
  EntropyParams entropy;
  SpectrumOptions spectrum;
  DominationOptions domination;
  Method primary = Method::volume;
  std::vector<Method> methods{Method::volume, Method::separated, Method::partition};
  double margin = 0.05;
  double pesin_tolerance = 0.10;
  double volume_tolerance = 1e-9;
  int volume_samples = 100;
};

struct VerificationRow {
  std::string system;
  int level = 0;
  Method method = Method::volume;
  double h_estimate = 0.0;
  double std_error = 0.0;
  double rhs = 0.0;
  bool ruelle_ok = false;
  double pesin_gap = 0.0;
  bool pesin_ok = false;
  double spread = 0.0;
  bool assumption_verified = false;
  int domination_N = 0;
  double worst_ratio = 0.0;
  bool failed = false;
  std::string note;
};

struct VerificationReport {
  std::vector<VerificationRow> rows;
  int ruelle_passes = 0;
  int pesin_passes = 0;
  int failures = 0;

  bool all_passed() const noexcept {
    return failures == 0 && ruelle_passes == static_cast<int>(rows.size()) &&
           pesin_passes == static_cast<int>(rows.size());
  }
};

// Throws NotVolumePreserving if |det Df| deviates from 1 by more than the
// tolerance at any of `samples` random points.
void check_volume_preserving(const TorusMap& map, int samples, double tolerance, std::uint64_t seed);

// Both checks share one evaluation: spectrum -> certificate -> estimators.
// Estimator failures become a row note (failed = true) rather than throwing.
VerificationRow ruelle_check(const std::string& system, const TorusMap& map, const LyapunovSpectrum& spectrum,
                             int level, const VerifyParams& params);
// As ruelle_check, after asserting the map preserves volume.
VerificationRow pesin_check(const std::string& system, const TorusMap& map, const LyapunovSpectrum& spectrum,
                            int level, const VerifyParams& params);

VerificationReport run_catalog(const std::vector<SystemDef>& systems, const VerifyParams& params);

void write_report_csv(std::ostream& out, const VerificationReport& report);
void write_summary(std::ostream& out, const VerificationReport& report);

}  // namespace hierent
