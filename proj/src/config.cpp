#include "hierent/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "hierent/error.hpp"

namespace hierent {

namespace {

constexpr std::string_view kCatalog = R"(# Catalog of test systems.
seed = 1

[system cat]
kind = linear
matrix = 2 1; 1 1
levels = 1

[system block]
kind = linear
matrix = 5 3 0 0; 3 2 0 0; 0 0 2 1; 0 0 1 1
levels = 1, 2

[system perturbed]
kind = perturbed
matrix = 2 1; 1 1
amplitude = 0.05
levels = 1
)";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view origin) : origin_(origin) {}

  [[noreturn]] void parse_error(const std::string& what) const {
    throw Error(ErrorKind::ParseError, fmt::format("{}:{}: {}", origin_, line_, what));
  }
  [[noreturn]] void invalid(std::string_view key, const std::string& what) const {
    throw Error(ErrorKind::ValidationError, fmt::format("key '{}' (line {}): {}", key, line_, what));
  }

  template <typename T>
  T number(std::string_view text) const {
    T value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty())
      parse_error(fmt::format("'{}' is not a number", text));
    return value;
  }

  template <typename T>
  std::vector<T> numbers(std::string_view text, char sep = ',') const {
    std::vector<T> values;
    for (auto part : split(text, sep)) values.push_back(number<T>(part));
    return values;
  }

  bool boolean(std::string_view text) const {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    parse_error(fmt::format("'{}' is not a boolean", text));
  }

  std::pair<int, int> range(std::string_view key, std::string_view text) const {
    auto dots = text.find("..");
    std::vector<int> ends;
    if (dots != std::string_view::npos)
      ends = {number<int>(trim(text.substr(0, dots))), number<int>(trim(text.substr(dots + 2)))};
    else
      ends = numbers<int>(text);
    if (ends.size() != 2) parse_error(fmt::format("'{}' is not a range a..b", text));
    if (ends[0] < 1 || ends[1] - ends[0] + 1 < 4) invalid(key, "n range needs >= 4 values starting at >= 1");
    return {ends[0], ends[1]};
  }

  template <typename T>
  T at_least(std::string_view key, std::string_view text, T lo) const {
    const T value = number<T>(text);
    if (!(value >= lo)) invalid(key, fmt::format("must be >= {}", lo));
    return value;
  }

  double positive(std::string_view key, std::string_view text) const {
    const double value = number<double>(text);
    if (!(value > 0.0)) invalid(key, "must be positive");
    return value;
  }

  void set_line(int line) { line_ = line; }
  int line() const { return line_; }

 private:
  std::string origin_;
  int line_ = 0;
};

void apply_global(ExperimentConfig& c, const Parser& p, std::string_view key, std::string_view v) {
  EntropyParams& e = c.params.entropy;
  if (key == "seed") {
    c.set_seed(p.number<std::uint64_t>(v));
  } else if (key == "jobs") {
    c.set_jobs(p.at_least<int>(key, v, 1));
  } else if (key == "out") {
    if (v.empty()) p.invalid(key, "must not be empty");
    c.out_dir = std::string(v);
  } else if (key == "steps") {
    c.params.spectrum.steps = p.at_least<long>(key, v, 1000);
  } else if (key == "transient") {
    c.params.spectrum.transient = p.at_least<long>(key, v, 0);
  } else if (key == "cluster_gap") {
    c.params.spectrum.cluster_gap = p.positive(key, v);
  } else if (key == "domination_samples") {
    c.params.domination.samples = p.at_least<int>(key, v, 1);
  } else if (key == "orbit_length") {
    c.params.domination.orbit_length = p.at_least<long>(key, v, 1);
  } else if (key == "n_max") {
    c.params.domination.n_max = p.at_least<int>(key, v, 1);
  } else if (key == "epsilon_grid") {
    e.epsilons = p.numbers<double>(v);
    for (double eps : e.epsilons)
      if (!(eps > 0.0)) p.invalid(key, "epsilons must be positive");
    for (std::size_t i = 1; i < e.epsilons.size(); ++i)
      if (!(e.epsilons[i] < e.epsilons[i - 1])) p.invalid(key, "epsilon grid must descend");
  } else if (key == "n_range") {
    std::tie(e.n_min, e.n_max) = p.range(key, v);
  } else if (key == "counting_n_range") {
    std::tie(e.counting_n_min, e.counting_n_max) = p.range(key, v);
  } else if (key == "samples") {
    e.samples = p.at_least<int>(key, v, 1);
  } else if (key == "delta") {
    e.delta = p.positive(key, v);
  } else if (key == "c_max") {
    e.c_max = p.positive(key, v);
  } else if (key == "grow_iterations") {
    e.grow_iterations = p.at_least<int>(key, v, 1);
  } else if (key == "grid_nodes") {
    e.grid_nodes = p.at_least<int>(key, v, 3);
    if (e.grid_nodes % 2 == 0) p.invalid(key, "must be odd");
  } else if (key == "mesh") {
    e.mesh = p.positive(key, v);
  } else if (key == "mesh_limit") {
    e.mesh_limit = p.at_least<double>(key, v, 0.0);
  } else if (key == "candidate_cap") {
    e.candidate_cap = p.at_least<std::size_t>(key, v, 1);
  } else if (key == "plateau_tolerance") {
    e.plateau_tolerance = p.positive(key, v);
  } else if (key == "require_plateau") {
    e.require_plateau = p.boolean(v);
  } else if (key == "shells") {
    e.bowen.shells = p.at_least<int>(key, v, 1);
  } else if (key == "per_shell") {
    e.bowen.per_shell = p.at_least<int>(key, v, 0);
  } else if (key == "force_quadrature") {
    e.bowen.force_quadrature = p.boolean(v);
  } else if (key == "method") {
    try {
      c.params.primary = parse_method(v);
    } catch (const Error&) {
      p.invalid(key, fmt::format("unknown method '{}'", v));
    }
  } else if (key == "methods") {
    c.params.methods.clear();
    for (auto name : split(v, ',')) {
      try {
        c.params.methods.push_back(parse_method(name));
      } catch (const Error&) {
        p.invalid(key, fmt::format("unknown method '{}'", name));
      }
    }
  } else if (key == "margin") {
    c.params.margin = p.at_least<double>(key, v, 0.0);
  } else if (key == "pesin_tolerance") {
    c.params.pesin_tolerance = p.positive(key, v);
  } else if (key == "volume_tolerance") {
    c.params.volume_tolerance = p.positive(key, v);
  } else {
    p.invalid(key, "unknown key");
  }
}

void apply_system(SystemDef& s, const Parser& p, std::string_view key, std::string_view v) {
  if (key == "kind") {
    if (v == "linear")
      s.kind = MapKind::linear;
    else if (v == "perturbed")
      s.kind = MapKind::perturbed;
    else
      p.invalid(key, fmt::format("unknown kind '{}'", v));
  } else if (key == "matrix") {
    s.matrix.clear();
    for (auto row : split(v, ';')) {
      std::vector<long long> entries;
      std::istringstream in{std::string(row)};
      std::string token;
      while (in >> token) entries.push_back(p.number<long long>(token));
      s.matrix.push_back(entries);
    }
    const std::size_t d = s.matrix.size();
    for (const auto& row : s.matrix)
      if (row.size() != d) p.invalid(key, "matrix must be square");
    if (d == 0 || d > static_cast<std::size_t>(kMaxDimension))
      p.invalid(key, fmt::format("dimension must be in 1..{}", kMaxDimension));
    const long long det = integer_determinant(int_matrix(s.matrix));
    if (det != 1 && det != -1) p.invalid(key, fmt::format("matrix not unimodular (det = {})", det));
  } else if (key == "amplitude") {
    s.amplitude = p.at_least<double>(key, v, 0.0);
  } else if (key == "amplitude_cap") {
    s.amplitude_cap = p.at_least<double>(key, v, 0.0);
  } else if (key == "power") {
    s.power = p.at_least<int>(key, v, 1);
  } else if (key == "levels") {
    s.levels.clear();
    if (v != "all") {
      s.levels = p.numbers<int>(v);
      for (int level : s.levels)
        if (level < 1) p.invalid(key, "levels start at 1");
    }
  } else {
    p.invalid(key, "unknown key");
  }
}

}  // namespace

const SystemDef& ExperimentConfig::system(std::string_view name) const {
  for (const auto& s : systems)
    if (s.name == name) return s;
  throw Error(ErrorKind::ValidationError, fmt::format("no system named '{}'", name));
}

void ExperimentConfig::set_seed(std::uint64_t value) {
  seed = value;
  params.entropy.seed = value;
  params.spectrum.seed = value;
  params.domination.seed = value;
}

void ExperimentConfig::set_jobs(int value) {
  jobs = value;
  params.entropy.jobs = value;
  params.domination.jobs = value;
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view origin) {
  ExperimentConfig config;
  Parser parser(origin);
  SystemDef* current = nullptr;
  int line_number = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    parser.set_line(++line_number);
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parser.parse_error("unterminated section header");
      const auto inner = trim(line.substr(1, line.size() - 2));
      if (inner.substr(0, 7) != "system " || trim(inner.substr(7)).empty())
        parser.parse_error("expected [system NAME]");
      const std::string name(trim(inner.substr(7)));
      for (const auto& s : config.systems)
        if (s.name == name) parser.invalid("system", fmt::format("duplicate system '{}'", name));
      SystemDef def;
      def.name = name;
      config.systems.push_back(std::move(def));
      current = &config.systems.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) parser.parse_error("expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) parser.parse_error("missing key");
    if (current)
      apply_system(*current, parser, key, value);
    else
      apply_global(config, parser, key, value);
  }

  for (const auto& s : config.systems)
    if (s.matrix.empty())
      throw Error(ErrorKind::ValidationError, fmt::format("key 'matrix': system '{}' has no matrix", s.name));
  const EntropyParams& e = config.params.entropy;
  if (e.epsilons.empty()) throw Error(ErrorKind::ValidationError, "key 'epsilon_grid': must not be empty");
  if (e.epsilons.front() >= e.delta)
    throw Error(ErrorKind::ValidationError, "key 'epsilon_grid': largest epsilon must be below delta");
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, fmt::format("cannot read config '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string());
}

std::string_view default_config_text() noexcept { return kCatalog; }

ExperimentConfig default_config() { return parse_config_text(kCatalog, "<catalog>"); }

std::string resolved_config(const ExperimentConfig& c) {
  const EntropyParams& e = c.params.entropy;
  std::vector<std::string_view> methods;
  for (Method m : c.params.methods) methods.push_back(to_string(m));
  std::string s;
  s += fmt::format("seed = {}\njobs = {}\nout = {}\n", c.seed, c.jobs, c.out_dir);
  s += fmt::format("steps = {}\ntransient = {}\ncluster_gap = {}\n", c.params.spectrum.steps,
                   c.params.spectrum.transient, c.params.spectrum.cluster_gap);
  s += fmt::format("domination_samples = {}\norbit_length = {}\nn_max = {}\n", c.params.domination.samples,
                   c.params.domination.orbit_length, c.params.domination.n_max);
  s += fmt::format("epsilon_grid = {}\nn_range = {}..{}\ncounting_n_range = {}..{}\n", fmt::join(e.epsilons, ", "),
                   e.n_min, e.n_max, e.counting_n_min, e.counting_n_max);
  s += fmt::format("samples = {}\ndelta = {}\nc_max = {}\ngrow_iterations = {}\ngrid_nodes = {}\n", e.samples,
                   e.delta, e.c_max, e.grow_iterations, e.grid_nodes);
  s += fmt::format("mesh = {}\nmesh_limit = {}\ncandidate_cap = {}\nplateau_tolerance = {}\nrequire_plateau = {}\n",
                   e.mesh, e.mesh_limit, e.candidate_cap, e.plateau_tolerance, e.require_plateau);
  s += fmt::format("shells = {}\nper_shell = {}\nforce_quadrature = {}\n", e.bowen.shells, e.bowen.per_shell,
                   e.bowen.force_quadrature);
  s += fmt::format("method = {}\nmethods = {}\nmargin = {}\npesin_tolerance = {}\nvolume_tolerance = {}\n",
                   to_string(c.params.primary), fmt::join(methods, ", "), c.params.margin, c.params.pesin_tolerance,
                   c.params.volume_tolerance);
  for (const auto& sys : c.systems) {
    std::vector<std::string> rows;
    for (const auto& row : sys.matrix) rows.push_back(fmt::format("{}", fmt::join(row, " ")));
    s += fmt::format("\n[system {}]\nkind = {}\nmatrix = {}\n", sys.name,
                     sys.kind == MapKind::linear ? "linear" : "perturbed", fmt::join(rows, "; "));
    s += fmt::format("amplitude = {}\namplitude_cap = {}\npower = {}\nlevels = {}\n", sys.amplitude,
                     sys.amplitude_cap, sys.power,
                     sys.levels.empty() ? std::string("all") : fmt::format("{}", fmt::join(sys.levels, ", ")));
  }
  return s;
}

}  // namespace hierent
