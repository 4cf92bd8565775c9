// Run configuration: a flat key -> value store with a fixed key registry,
// loadable from `key = value` text files or from a previously written
// manifest.json, plus the assembly step that turns a validated configuration
// into solver components.
#pragma once

#include <map>
#include <set>
#include <variant>

#include <json.hpp>

#include "io.hpp"

namespace pdspec {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class KeyType { Number, Integer, Boolean, Text, NumberList };

class RunConfig {
 public:
  using List = std::vector<double>;
  using Value = std::variant<double, bool, std::string, List>;

  struct KeySpec {
    const char* name;
    KeyType type;
    const char* default_value;  // nullptr: unset until the user provides it
  };

  static const std::vector<KeySpec>& registry() {
    static const std::vector<KeySpec> keys = {
        {"domain.L", KeyType::Number, "2.0"},
        {"domain.center", KeyType::Number, "0.0"},
        {"grid.n", KeyType::Integer, "512"},
        {"kernel.family", KeyType::Text, "triangular_alpha0"},
        {"kernel.delta", KeyType::Number, "0.2"},
        {"kernel.samples_path", KeyType::Text, nullptr},
        {"kernel.beta", KeyType::Number, nullptr},
        {"bc.left.kind", KeyType::Text, nullptr},
        {"bc.left.value", KeyType::Number, nullptr},
        {"bc.right.kind", KeyType::Text, nullptr},
        {"bc.right.value", KeyType::Number, nullptr},
        {"solver.nu", KeyType::Number, "0.2"},
        {"solver.eps", KeyType::Number, "5e-4"},
        {"solver.dt", KeyType::Number, nullptr},
        {"solver.dt_safety", KeyType::Number, "0.9"},
        {"solver.t_max", KeyType::Number, "15.0"},
        {"solver.snapshots", KeyType::NumberList, "[]"},
        {"solver.record_error", KeyType::Boolean, "true"},
        {"problem.kind", KeyType::Text, "dirichlet_manufactured"},
        {"problem.initial_path", KeyType::Text, nullptr},
        {"analysis.eps_list", KeyType::NumberList, "[1e-2, 1e-3, 1e-4]"},
        {"analysis.n_list", KeyType::NumberList, "[128, 256, 512, 1024]"},
        {"analysis.bench_n", KeyType::NumberList, "[256, 512, 1024, 2048, 4096]"},
        {"analysis.bench_reps", KeyType::Integer, "5"},
        {"analysis.check_n", KeyType::NumberList, "[256, 512, 1024]"},
        {"analysis.check_fields", KeyType::Integer, "100"},
        {"output.dir", KeyType::Text, "out"},
    };
    return keys;
  }

  static RunConfig defaults() {
    RunConfig cfg;
    for (const KeySpec& spec : registry())
      if (spec.default_value) cfg.values_[spec.name] = parse_value(spec, spec.default_value, "default");
    return cfg;
  }

  /// Load from a `key = value` text file, or from a manifest.json (detected
  /// by a leading '{'), whose "config" object holds the same flat keys.
  static RunConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto first = content.find_first_not_of(" \t\r\n");
    RunConfig cfg = defaults();
    if (first != std::string::npos && content[first] == '{') {
      cfg.load_manifest(content, path.string());
      return cfg;
    }
    std::istringstream ss(content);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
      ++lineno;
      const std::string where = path.string() + ":" + std::to_string(lineno);
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError(where + ": expected 'key = value', got '" + trimmed + "'");
      cfg.set_from_string(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)), where);
    }
    return cfg;
  }

  void set_from_string(const std::string& key, const std::string& raw, const std::string& where) {
    const KeySpec& spec = find_key(key, where);
    values_[key] = parse_value(spec, raw, where);
  }

  bool is_set(const std::string& key) const { return values_.count(key) > 0; }

  double number(const std::string& key) const {
    return std::get<double>(stored(key, KeyType::Number));
  }
  long integer(const std::string& key) const {
    const double v = std::get<double>(stored(key, KeyType::Integer));
    return std::lround(v);
  }
  bool boolean(const std::string& key) const {
    return std::get<bool>(stored(key, KeyType::Boolean));
  }
  const std::string& text(const std::string& key) const {
    return std::get<std::string>(stored(key, KeyType::Text));
  }
  const List& list(const std::string& key) const {
    return std::get<List>(stored(key, KeyType::NumberList));
  }
  std::vector<int> int_list(const std::string& key) const {
    std::vector<int> out;
    for (double v : list(key)) {
      if (std::abs(v - std::lround(v)) > 1e-9)
        throw ConfigError("key '" + key + "' must hold integers");
      out.push_back(static_cast<int>(std::lround(v)));
    }
    return out;
  }

  void set_number(const std::string& key, double v) { values_[key] = v; }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : values_) {
      std::visit([&](const auto& v) { j[key] = v; }, value);
    }
    return j;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }

  static const KeySpec& find_key(const std::string& key, const std::string& where) {
    for (const KeySpec& spec : registry())
      if (key == spec.name) return spec;
    throw ConfigError(where + ": unknown key '" + key + "'");
  }

  static double parse_number(const std::string& raw, const std::string& where,
                             const std::string& what) {
    try {
      size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(where + ": expected " + what + ", got '" + raw + "'");
    }
  }

  static Value parse_value(const KeySpec& spec, const std::string& raw, const std::string& where) {
    switch (spec.type) {
      case KeyType::Number:
        return parse_number(raw, where, "a number for '" + std::string(spec.name) + "'");
      case KeyType::Integer: {
        const double v =
            parse_number(raw, where, "an integer for '" + std::string(spec.name) + "'");
        if (std::abs(v - std::lround(v)) > 1e-9)
          throw ConfigError(where + ": expected an integer for '" + std::string(spec.name) + "'");
        return v;
      }
      case KeyType::Boolean:
        if (raw == "true") return true;
        if (raw == "false") return false;
        throw ConfigError(where + ": expected true/false for '" + std::string(spec.name) + "'");
      case KeyType::Text: {
        std::string v = raw;
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        return v;
      }
      case KeyType::NumberList: {
        std::string body = raw;
        if (!body.empty() && body.front() == '[') {
          if (body.back() != ']')
            throw ConfigError(where + ": unterminated list for '" + std::string(spec.name) + "'");
          body = body.substr(1, body.size() - 2);
        }
        List out;
        std::istringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
          const std::string t = trim(item);
          if (t.empty()) continue;
          out.push_back(parse_number(t, where, "a number in list '" + std::string(spec.name) + "'"));
        }
        return out;
      }
    }
    throw ConfigError(where + ": unhandled key type");
  }

  const Value& stored(const std::string& key, KeyType expect) const {
    for (const KeySpec& spec : registry()) {
      if (key != spec.name) continue;
      if (spec.type != expect &&
          !(expect == KeyType::Number && spec.type == KeyType::Integer) &&
          !(expect == KeyType::Integer && spec.type == KeyType::Number))
        throw ConfigError("key '" + key + "' accessed with the wrong type");
      const auto it = values_.find(key);
      if (it == values_.end())
        throw ConfigError("key '" + key + "' is required but not set");
      return it->second;
    }
    throw ConfigError("unknown key '" + key + "'");
  }

  void load_manifest(const std::string& content, const std::string& where) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(content);
    } catch (const std::exception& e) {
      throw ConfigError(where + ": invalid JSON manifest: " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object())
      throw ConfigError(where + ": manifest has no \"config\" object");
    for (const auto& [key, value] : j["config"].items()) {
      const KeySpec& spec = find_key(key, where);
      switch (spec.type) {
        case KeyType::Number:
        case KeyType::Integer:
          if (!value.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
          values_[key] = value.get<double>();
          break;
        case KeyType::Boolean:
          if (!value.is_boolean()) throw ConfigError(where + ": '" + key + "' must be a boolean");
          values_[key] = value.get<bool>();
          break;
        case KeyType::Text:
          if (!value.is_string()) throw ConfigError(where + ": '" + key + "' must be a string");
          values_[key] = value.get<std::string>();
          break;
        case KeyType::NumberList: {
          if (!value.is_array()) throw ConfigError(where + ": '" + key + "' must be an array");
          List out;
          for (const auto& item : value) out.push_back(item.get<double>());
          values_[key] = std::move(out);
          break;
        }
      }
    }
  }

  std::map<std::string, Value> values_;
};

/// Fully constructed components for one run.
struct AssembledCase {
  DomainLayout layout;
  PeriodicGrid grid;
  MaskField mask;
  KernelSpec kernel;
  ManufacturedProblem problem;
  SolverConfig solver;
};

namespace detail {
inline BoundaryCondition parse_bc(const RunConfig& cfg, const std::string& side) {
  const std::string kind_key = "bc." + side + ".kind";
  const std::string value_key = "bc." + side + ".value";
  if (!cfg.is_set(kind_key) || !cfg.is_set(value_key))
    throw ConfigError("custom problems require " + kind_key + " and " + value_key);
  const std::string& kind = cfg.text(kind_key);
  BoundaryCondition bc;
  if (kind == "dirichlet")
    bc.kind = BCKind::Dirichlet;
  else if (kind == "neumann")
    bc.kind = BCKind::Neumann;
  else
    throw ConfigError(kind_key + ": expected 'dirichlet' or 'neumann', got '" + kind + "'");
  bc.value = cfg.number(value_key);
  return bc;
}
}  // namespace detail

/// Validate cross-field constraints and build the run components. Throws
/// ConfigError for anything a config file can get wrong.
inline AssembledCase assemble_case(const RunConfig& cfg) {
  const double L = cfg.number("domain.L");
  const double center = cfg.number("domain.center");
  const double delta = cfg.number("kernel.delta");
  const int n = static_cast<int>(cfg.integer("grid.n"));
  if (!(L > 0.0)) throw ConfigError("domain.L must be positive");
  if (!(delta > 0.0)) throw ConfigError("kernel.delta must be positive");
  if (delta > L)
    throw ConfigError("kernel.delta exceeds domain.L: ghost mirror points would leave Omega");

  const std::string& family = cfg.text("kernel.family");
  std::optional<KernelSpec> kernel;
  if (family == "triangular_alpha0") {
    kernel = KernelSpec::triangular(delta);
  } else if (family == "custom") {
    if (!cfg.is_set("kernel.samples_path") || !cfg.is_set("kernel.beta"))
      throw ConfigError("custom kernels require kernel.samples_path and kernel.beta");
    std::vector<KernelSample> samples;
    for (const auto& [offset, value] : load_two_column_csv(cfg.text("kernel.samples_path"))) {
      if (offset < 0.0)
        throw ConfigError("kernel.samples_path: offsets must be nonnegative (even extension is implied)");
      samples.push_back({offset, value});
    }
    try {
      kernel = KernelSpec::custom(std::move(samples), delta, cfg.number("kernel.beta"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("kernel: ") + e.what());
    }
  } else {
    throw ConfigError("kernel.family: expected 'triangular_alpha0' or 'custom', got '" + family +
                      "'");
  }

  DomainLayout layout;
  PeriodicGrid grid;
  try {
    layout = build_layout(L, delta, center);
    grid = build_grid(layout, n);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("domain/grid: ") + e.what());
  }
  if (!(grid.dx < delta))
    throw ConfigError("grid.n too small: dx = " + std::to_string(grid.dx) +
                      " does not resolve the horizon delta = " + std::to_string(delta));

  const double nu = cfg.number("solver.nu");
  if (!(nu > 0.0)) throw ConfigError("solver.nu must be positive");

  const std::string& kind = cfg.text("problem.kind");
  std::optional<ManufacturedProblem> problem;
  if (kind == "dirichlet_manufactured" || kind == "neumann_manufactured") {
    if (std::abs(center) > 1e-12 * L)
      throw ConfigError("manufactured problems are defined on a domain centered at 0; set domain.center = 0");
    problem = (kind[0] == 'd') ? dirichlet_problem(L, nu, delta) : neumann_problem(L, nu, delta);
  } else if (kind == "custom") {
    if (!cfg.is_set("problem.initial_path"))
      throw ConfigError("custom problems require problem.initial_path");
    BoundarySpec bcs{detail::parse_bc(cfg, "left"), detail::parse_bc(cfg, "right")};
    problem = custom_problem(load_two_column_csv(cfg.text("problem.initial_path")), bcs, L, nu,
                             delta);
  } else {
    throw ConfigError(
        "problem.kind: expected 'dirichlet_manufactured', 'neumann_manufactured' or 'custom', "
        "got '" + kind + "'");
  }

  SolverConfig solver;
  solver.nu = nu;
  solver.eps = cfg.number("solver.eps");
  if (!(solver.eps > 0.0)) throw ConfigError("solver.eps must be positive");
  solver.dt_safety = cfg.number("solver.dt_safety");
  if (!(solver.dt_safety > 0.0 && solver.dt_safety <= 1.0))
    throw ConfigError("solver.dt_safety must lie in (0, 1]");
  solver.t_max = cfg.number("solver.t_max");
  if (solver.t_max < 0.0) throw ConfigError("solver.t_max must be nonnegative");
  solver.snapshot_times = cfg.list("solver.snapshots");
  solver.record_error = cfg.boolean("solver.record_error");

  const double bound = stable_dt(nu, kernel->beta(), solver.eps, 1.0);
  if (cfg.is_set("solver.dt")) {
    const double dt = cfg.number("solver.dt");
    if (!(dt > 0.0)) throw ConfigError("solver.dt must be positive");
    if (dt > bound * (1.0 + 1e-12))
      throw ConfigError("solver.dt = " + std::to_string(dt) +
                        " violates the stability bound 2/(1/eps + 2 nu beta) = " +
                        std::to_string(bound));
    solver.dt = dt;
  }

  return AssembledCase{layout, grid, build_mask(layout, grid), *kernel, std::move(*problem),
                       std::move(solver)};
}

}  // namespace pdspec
