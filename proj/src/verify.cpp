#include "hierent/verify.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hierent/error.hpp"

namespace hierent {

namespace {

constexpr std::uint64_t kVolumeStreamIndex = 0x766f6c0000000000ULL;

void append(std::string& note, const std::string& text) {
  if (!note.empty()) note += "; ";
  note += text;
}

VerificationRow evaluate(const std::string& system, const TorusMap& map, const LyapunovSpectrum& spectrum, int level,
                         const VerifyParams& params, bool require_volume) {
  VerificationRow row;
  row.system = system;
  row.level = level;
  row.method = params.primary;

  int fast_dim = 0;
  try {
    fast_dim = hierarchy_indices(spectrum, level).I_of_i;
    row.rhs = unstable_sum(spectrum, level);
  } catch (const Error& e) {
    row.failed = true;
    append(row.note, e.what());
    return row;
  }

  bool volume_ok = true;
  try {
    check_volume_preserving(map, params.volume_samples, params.volume_tolerance, params.entropy.seed);
  } catch (const Error& e) {
    if (require_volume) throw;
    volume_ok = false;
    append(row.note, e.what());
  }

  try {
    const DominationCertificate certificate = certify_domination(map, level, fast_dim, params.domination);
    row.assumption_verified = true;
    row.domination_N = certificate.N;
    row.worst_ratio = certificate.worst_ratio;
  } catch (const Error& e) {
    append(row.note, fmt::format("assumption unverified: {}", e.what()));
  }

  std::vector<double> estimates;
  try {
    const EntropyEstimate primary = estimate_entropy(map, level, fast_dim, params.primary, params.entropy);
    row.h_estimate = primary.h_estimate;
    row.std_error = primary.std_error;
    estimates.push_back(primary.h_estimate);
    if (!primary.note.empty()) append(row.note, fmt::format("{}: {}", to_string(params.primary), primary.note));
  } catch (const Error& e) {
    row.failed = true;
    append(row.note, fmt::format("{}: {}", to_string(params.primary), e.what()));
    return row;
  }
  for (Method method : params.methods) {
    if (method == params.primary) continue;
    try {
      estimates.push_back(estimate_entropy(map, level, fast_dim, method, params.entropy).h_estimate);
    } catch (const Error& e) {
      append(row.note, fmt::format("{}: {}", to_string(method), e.what()));
    }
  }
  const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
  row.spread = *hi - *lo;
  row.ruelle_ok = row.h_estimate <= row.rhs + params.margin + row.std_error;
  row.pesin_gap = std::abs(row.h_estimate - row.rhs);
  // Equality within tolerance is only claimed where the inequality also holds.
  row.pesin_ok = volume_ok && row.ruelle_ok && row.pesin_gap <= params.pesin_tolerance * std::abs(row.rhs);
  return row;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c == '\n' ? ' ' : c;
  }
  return quoted + "\"";
}

}  // namespace

TorusMap build_system(const SystemDef& def) {
  const IntMatrix matrix = int_matrix(def.matrix);
  TorusMap map = def.kind == MapKind::linear ? make_linear_system(matrix)
                                              : make_perturbed_system(matrix, def.amplitude, def.amplitude_cap);
  return def.power > 1 ? map.iterate(def.power) : map;
}

void check_volume_preserving(const TorusMap& map, int samples, double tolerance, std::uint64_t seed) {
  for (int s = 0; s < samples; ++s) {
    Rng rng(seed, stream::samples, kVolumeStreamIndex + static_cast<std::uint64_t>(s));
    Vector x(map.dimension());
    for (int c = 0; c < map.dimension(); ++c) x(c) = rng.uniform();
    const double det = map.jacobian_determinant(x);
    if (std::abs(det - 1.0) > tolerance)
      throw Error(ErrorKind::NotVolumePreserving, fmt::format("|det Df| = {:.15g} at a sampled point", det));
  }
}

VerificationRow ruelle_check(const std::string& system, const TorusMap& map, const LyapunovSpectrum& spectrum,
                             int level, const VerifyParams& params) {
  return evaluate(system, map, spectrum, level, params, false);
}

VerificationRow pesin_check(const std::string& system, const TorusMap& map, const LyapunovSpectrum& spectrum,
                            int level, const VerifyParams& params) {
  return evaluate(system, map, spectrum, level, params, true);
}

VerificationReport run_catalog(const std::vector<SystemDef>& systems, const VerifyParams& params) {
  VerificationReport report;
  for (const SystemDef& def : systems) {
    const auto fail_all = [&](const std::string& note) {
      const std::vector<int> levels = def.levels.empty() ? std::vector<int>{0} : def.levels;
      for (int level : levels) {
        VerificationRow row;
        row.system = def.name;
        row.level = level;
        row.method = params.primary;
        row.failed = true;
        row.note = note;
        report.rows.push_back(row);
      }
    };
    try {
      const TorusMap map = build_system(def);
      const LyapunovSpectrum spectrum = lyapunov_spectrum(map, params.spectrum);
      std::vector<int> levels = def.levels;
      if (levels.empty())
        for (int i = 1; i <= spectrum.u; ++i) levels.push_back(i);
      if (levels.empty()) {
        fail_all("LevelOutOfRange: no positive exponent");
        continue;
      }
      for (int level : levels) {
        VerificationRow row = ruelle_check(def.name, map, spectrum, level, params);
        if (spectrum.cluster_ambiguous) append(row.note, "ClusterAmbiguity");
        report.rows.push_back(std::move(row));
      }
    } catch (const Error& e) {
      fail_all(e.what());
    }
  }
  for (const auto& row : report.rows) {
    report.failures += row.failed ? 1 : 0;
    report.ruelle_passes += row.ruelle_ok ? 1 : 0;
    report.pesin_passes += row.pesin_ok ? 1 : 0;
  }
  return report;
}

void write_report_csv(std::ostream& out, const VerificationReport& report) {
  out << "system,level,method,h_estimate,stderr,rhs,ruelle_ok,pesin_gap,pesin_ok,spread,assumption_verified,N,"
         "worst_ratio,note\n";
  for (const auto& r : report.rows) {
    out << fmt::format("{},{},{},{:.10g},{:.10g},{:.10g},{},{:.10g},{},{:.10g},{},{},{:.10g},{}\n",
                       csv_field(r.system), r.level, to_string(r.method), r.h_estimate, r.std_error, r.rhs,
                       r.ruelle_ok ? 1 : 0, r.pesin_gap, r.pesin_ok ? 1 : 0, r.spread,
                       r.assumption_verified ? 1 : 0, r.domination_N, r.worst_ratio, csv_field(r.note));
  }
}

void write_summary(std::ostream& out, const VerificationReport& report) {
  for (const auto& r : report.rows) {
    out << fmt::format("{:<12} level {}  h = {:.4f} +- {:.4f}  rhs = {:.4f}  ruelle {}  pesin {}{}\n", r.system,
                       r.level, r.h_estimate, r.std_error, r.rhs, r.ruelle_ok ? "ok" : "FAIL",
                       r.pesin_ok ? "ok" : "FAIL", r.failed ? "  [row failed]" : "");
    if (!r.note.empty()) out << "    note: " << r.note << "\n";
  }
  out << fmt::format("{} rows: {} ruelle ok, {} pesin ok, {} failed\n", report.rows.size(), report.ruelle_passes,
                     report.pesin_passes, report.failures);
}

}  // namespace hierent
