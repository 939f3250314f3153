#include "hierent/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hierent/config.hpp"
#include "hierent/error.hpp"

namespace hierent {

namespace {

struct Flags {
  std::string config;
  std::string system;
  std::optional<int> level;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string method;
  std::optional<int> jobs;
  std::optional<long> steps;
};

bool is_usage_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
    case ErrorKind::IoError:
    case ErrorKind::LevelOutOfRange:
    case ErrorKind::NonUnimodular:
    case ErrorKind::NotHyperbolic:
    case ErrorKind::AmplitudeTooLarge:
    case ErrorKind::DimensionMismatch:
      return true;
    default:
      return false;
  }
}

ExperimentConfig load(const Flags& flags) {
  ExperimentConfig config = flags.config.empty() ? default_config() : parse_config(flags.config);
  if (flags.seed) config.set_seed(*flags.seed);
  if (flags.jobs) config.set_jobs(*flags.jobs);
  if (!flags.out.empty()) config.out_dir = flags.out;
  if (flags.steps) config.params.spectrum.steps = *flags.steps;
  if (!flags.method.empty()) config.params.primary = parse_method(flags.method);
  return config;
}

const SystemDef& pick_system(const ExperimentConfig& config, const Flags& flags) {
  if (!flags.system.empty()) return config.system(flags.system);
  if (config.systems.empty()) throw Error(ErrorKind::ValidationError, "config defines no system");
  return config.systems.front();
}

std::vector<int> pick_levels(const Flags& flags, const SystemDef& def, const LyapunovSpectrum& spectrum) {
  std::vector<int> levels;
  if (flags.level)
    levels = {*flags.level};
  else if (!def.levels.empty())
    levels = def.levels;
  else
    for (int i = 1; i <= spectrum.u; ++i) levels.push_back(i);
  for (int level : levels) hierarchy_indices(spectrum, level);
  if (levels.empty()) throw Error(ErrorKind::LevelOutOfRange, "no positive exponent: no unstable hierarchy");
  return levels;
}

std::filesystem::path prepare_out(const ExperimentConfig& config) {
  std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  std::ofstream(dir / "resolved.cfg") << resolved_config(config);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) throw Error(ErrorKind::IoError, fmt::format("cannot write '{}'", path.string()));
  file << text;
}

int cmd_spectrum(const Flags& flags, std::ostream& out) {
  const ExperimentConfig config = load(flags);
  const TorusMap map = build_system(pick_system(config, flags));
  const LyapunovSpectrum spectrum = lyapunov_spectrum(map, config.params.spectrum);
  std::string csv = "lambda,multiplicity\n";
  for (const auto& e : spectrum.exponents) csv += fmt::format("{:.10g},{}\n", e.value, e.multiplicity);
  out << csv;
  if (!flags.out.empty()) write_file(prepare_out(config) / "spectrum.csv", csv);
  return 0;
}

int cmd_dominate(const Flags& flags, std::ostream& out) {
  const ExperimentConfig config = load(flags);
  const SystemDef& def = pick_system(config, flags);
  const TorusMap map = build_system(def);
  const LyapunovSpectrum spectrum = lyapunov_spectrum(map, config.params.spectrum);
  std::string csv = "level,N,worst_ratio,samples\n";
  for (int level : pick_levels(flags, def, spectrum)) {
    const DominationCertificate c = certify_domination(map, level, spectrum, config.params.domination);
    csv += fmt::format("{},{},{:.10g},{}\n", c.level, c.N, c.worst_ratio, c.sample_count);
  }
  out << csv;
  if (!flags.out.empty()) write_file(prepare_out(config) / "domination.csv", csv);
  return 0;
}

int cmd_entropy(const Flags& flags, std::ostream& out) {
  const ExperimentConfig config = load(flags);
  const SystemDef& def = pick_system(config, flags);
  const TorusMap map = build_system(def);
  const LyapunovSpectrum spectrum = lyapunov_spectrum(map, config.params.spectrum);
  const std::vector<int> levels = pick_levels(flags, def, spectrum);
  std::string curves = "system,level,method,epsilon,n,value\n";
  std::string fits = "system,level,method,h_estimate,stderr\n";
  for (int level : levels) {
    const EntropyEstimate estimate = estimate_entropy(map, level, hierarchy_indices(spectrum, level).I_of_i,
                                                      config.params.primary, config.params.entropy);
    for (const auto& p : estimate.curve)
      curves += fmt::format("{},{},{},{:.10g},{},{:.10g}\n", def.name, level, to_string(estimate.method), p.epsilon,
                            p.n, p.value);
    fits += fmt::format("{},{},{},{:.10g},{:.10g}\n", def.name, level, to_string(estimate.method),
                        estimate.h_estimate, estimate.std_error);
  }
  const auto dir = prepare_out(config);
  write_file(dir / "curves.csv", curves);
  write_file(dir / "fits.csv", fits);
  out << fits;
  return 0;
}

int cmd_verify(const Flags& flags, std::ostream& out) {
  ExperimentConfig config = load(flags);
  if (!flags.system.empty()) config.systems = {config.system(flags.system)};
  if (flags.level)
    for (auto& s : config.systems) s.levels = {*flags.level};
  const VerificationReport report = run_catalog(config.systems, config.params);
  std::ostringstream csv;
  write_report_csv(csv, report);
  write_file(prepare_out(config) / "report.csv", csv.str());
  write_summary(out, report);
  return report.all_passed() ? 0 : 1;
}

int cmd_leaf_dump(const Flags& flags, std::ostream& out) {
  const ExperimentConfig config = load(flags);
  const SystemDef& def = pick_system(config, flags);
  const TorusMap map = build_system(def);
  const LyapunovSpectrum spectrum = lyapunov_spectrum(map, config.params.spectrum);
  const int level = flags.level.value_or(1);
  const int fast_dim = hierarchy_indices(spectrum, level).I_of_i;
  const TorusPoint x = sample_points(map.dimension(), 1, config.seed).front();
  const LeafPatch patch = entropy_patch(map, x, level, fast_dim, config.params.entropy);

  const int k = patch.leaf_dim();
  const int d = map.dimension();
  std::string csv;
  for (int a = 0; a < k; ++a) csv += fmt::format("w{},", a);
  for (int a = 0; a < patch.codim(); ++a) csv += fmt::format("psi{},", a);
  for (int c = 0; c < d; ++c) csv += fmt::format("x{}{}", c, c + 1 < d ? "," : "\n");
  const int per_axis = k == 1 ? 513 : 65;
  std::vector<int> index(static_cast<std::size_t>(k), 0);
  Vector w(k);
  for (;;) {
    for (int a = 0; a < k; ++a)
      w(a) = -patch.radius + 2.0 * patch.radius * index[static_cast<std::size_t>(a)] / (per_axis - 1);
    if (w.norm() <= patch.radius) {
      const Vector psi = patch.psi_at(w);
      const Vector p = patch.point(w);
      for (int a = 0; a < k; ++a) csv += fmt::format("{:.12g},", w(a));
      for (int a = 0; a < patch.codim(); ++a) csv += fmt::format("{:.12g},", psi(a));
      for (int c = 0; c < d; ++c) csv += fmt::format("{:.12g}{}", p(c), c + 1 < d ? "," : "\n");
    }
    int a = 0;
    while (a < k && ++index[static_cast<std::size_t>(a)] == per_axis) index[static_cast<std::size_t>(a++)] = 0;
    if (a == k) break;
  }
  out << csv;
  if (!flags.out.empty()) write_file(prepare_out(config) / "leaf.csv", csv);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lyapunov spectra, dominated splittings and entropy along unstable foliations on tori", "hierent"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config, "Experiment config file");
  app.add_option("--system", flags.system, "System name from the config");
  app.add_option("--level", flags.level, "Hierarchy level i")->check(CLI::PositiveNumber);
  app.add_option("--seed", flags.seed, "Root seed");
  app.add_option("--out", flags.out, "Output directory");
  app.add_option("--method", flags.method, "volume | separated | spanning | partition");
  app.add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);

  app.add_option("--steps", flags.steps, "QR steps for the spectrum")->check(CLI::Range(1000L, 1000000000L));

  auto* spectrum = app.add_subcommand("spectrum", "Lyapunov spectrum as lambda,multiplicity CSV");
  auto* dominate = app.add_subcommand("dominate", "Domination certificate per level");
  auto* entropy = app.add_subcommand("entropy", "Entropy estimate per level");
  auto* verify = app.add_subcommand("verify", "Ruelle and Pesin checks over the catalog");
  auto* leaf_dump = app.add_subcommand("leaf-dump", "CSV of the local unstable leaf through a sample point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(flags, out);
    if (dominate->parsed()) return cmd_dominate(flags, out);
    if (entropy->parsed()) return cmd_entropy(flags, out);
    if (verify->parsed()) return cmd_verify(flags, out);
    if (leaf_dump->parsed()) return cmd_leaf_dump(flags, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_usage_error(e.kind()) ? 2 : 1;
  }
  return 2;
}

}  // namespace hierent
