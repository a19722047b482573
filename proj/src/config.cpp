#include "cavity/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cavity/errors.hpp"

namespace cavity {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

class ConfigReader {
public:
  ConfigReader(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    static const std::set<std::string> known_sections = {
        "bed", "rheology", "mesh", "bc", "time", "solver", "output", "sweep", "unsteady"};
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto comment = line.find_first_of("#;");
      if (comment != std::string::npos) line.erase(comment);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(lineno, "malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (!known_sections.count(section)) fail(lineno, "unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(lineno, "expected key = value");
      if (section.empty()) fail(lineno, "key outside any section");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty() || value.empty()) fail(lineno, "expected key = value");
      auto [it, inserted] = sections_[section].try_emplace(key, Entry{value, lineno});
      if (!inserted) fail(lineno, "duplicate key '" + key + "'");
    }
  }

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ConfigError(path_ + ":" + std::to_string(line) + ": " + message);
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) return nullptr;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return nullptr;
    kit->second.used = true;
    return &kit->second;
  }

  double get_double(const std::string& section, const std::string& key, double fallback) const {
    const Entry* e = find(section, key);
    return e ? to_double(*e) : fallback;
  }

  double require_double(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw ConfigError(path_ + ": missing required key '" + key + "' in [" + section + "]");
    return to_double(*e);
  }

  int get_int(const std::string& section, const std::string& key, int fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    return to_int(*e);
  }

  int require_int(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw ConfigError(path_ + ": missing required key '" + key + "' in [" + section + "]");
    return to_int(*e);
  }

  bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    fail(e->line, "expected a boolean, got '" + e->value + "'");
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
  }

  std::vector<double> get_list(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    std::vector<double> values;
    if (!e) return values;
    std::stringstream ss(e->value);
    std::string token;
    while (std::getline(ss, token, ',')) {
      token = trim(token);
      if (token.empty()) fail(e->line, "empty list element");
      values.push_back(to_double_token(token, e->line));
    }
    if (values.empty()) fail(e->line, "empty list");
    return values;
  }

  void check_all_used() const {
    for (const auto& [section, entries] : sections_)
      for (const auto& [key, entry] : entries)
        if (!entry.used)
          fail(entry.line, "unknown key '" + key + "' in [" + section + "]");
  }

private:
  double to_double(const Entry& e) const { return to_double_token(e.value, e.line); }

  double to_double_token(const std::string& token, int line) const {
    size_t pos = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &pos);
    } catch (const std::exception&) {
      fail(line, "expected a number, got '" + token + "'");
    }
    if (pos != token.size()) fail(line, "expected a number, got '" + token + "'");
    return value;
  }

  int to_int(const Entry& e) const {
    size_t pos = 0;
    int value = 0;
    try {
      value = std::stoi(e.value, &pos);
    } catch (const std::exception&) {
      fail(e.line, "expected an integer, got '" + e.value + "'");
    }
    if (pos != e.value.size()) fail(e.line, "expected an integer, got '" + e.value + "'");
    return value;
  }

  std::string path_;
  std::map<std::string, Section> sections_;
};

int default_layers(int n_e) { return std::max(3, (3 * n_e) / 32); }

}  // namespace

ParsedConfig parse_config(const std::string& path) {
  ConfigReader reader(path);
  ParsedConfig out;
  ScenarioConfig& sc = out.scenario;

  sc.bed.r = reader.require_double("bed", "r");
  if (sc.bed.r < 0.0) throw ConfigError(path + ": bed amplitude r must be nonnegative");

  sc.rheo.n = reader.require_double("rheology", "n");
  sc.rheo.A = reader.get_double("rheology", "A", 0.5);
  sc.rheo.delta_reg = reader.get_double("rheology", "delta_reg", 1e-10);
  if (sc.rheo.n < 1.0 || sc.rheo.A <= 0.0 || sc.rheo.delta_reg < 0.0)
    throw ConfigError(path + ": rheology requires n >= 1, A > 0, delta_reg >= 0");

  sc.n_e = reader.require_int("mesh", "n_e");
  sc.n_layers = reader.get_int("mesh", "n_layers", default_layers(sc.n_e));
  sc.H = reader.get_double("mesh", "H", 1.0);
  sc.grading = reader.get_double("mesh", "grading", 2.0);

  const std::string mode = reader.get_string("bc", "mode", "");
  if (mode == "dirichlet") {
    sc.bc.mode = BoundaryCondition::Mode::kDirichlet;
    sc.bc.u_i = reader.require_double("bc", "u_i");
  } else if (mode == "neumann") {
    sc.bc.mode = BoundaryCondition::Mode::kNeumann;
    sc.bc.tau_b = reader.require_double("bc", "tau_b");
  } else {
    throw ConfigError(path + ": bc.mode must be exactly one of 'dirichlet' or 'neumann'");
  }
  sc.bc.N = reader.require_double("bc", "N");
  if (sc.bc.N < 0.0) throw ConfigError(path + ": effective pressure N must be nonnegative");

  sc.dt = reader.get_double("time", "dt", 0.01);
  sc.t_end = reader.get_double("time", "t_end", 20.0);
  sc.steady_threshold = reader.get_double("time", "steady_threshold", 1e-4);
  if (sc.dt <= 0.0 || sc.t_end <= 0.0 || sc.steady_threshold <= 0.0)
    throw ConfigError(path + ": [time] values must be positive");

  sc.solver.c = reader.get_double("solver", "c", 1.0);
  sc.solver.newton_tol = reader.get_double("solver", "newton_tol", 1e-10);
  sc.solver.max_iter = reader.get_int("solver", "max_iter", 50);
  sc.solver.continuation = reader.get_bool("solver", "continuation", true);
  if (sc.solver.c <= 0.0) throw ConfigError(path + ": solver.c must be positive");

  out.cadence = reader.get_int("output", "cadence", 1);
  out.snapshots = reader.get_bool("output", "snapshots", false);
  out.solver_log = reader.get_bool("output", "solver_log", false);
  out.mesh_dump = reader.get_bool("output", "mesh_dump", false);
  if (out.cadence < 1) throw ConfigError(path + ": output.cadence must be >= 1");

  out.sweep_N = reader.get_list("sweep", "N_values");
  out.sweep_n = reader.get_list("sweep", "n_values");
  if (out.sweep_n.empty()) out.sweep_n = {sc.rheo.n};

  if (const auto* e = reader.find("unsteady", "N0")) {
    (void)e;
    out.unsteady_N0 = reader.require_double("unsteady", "N0");
    out.has_unsteady_N0 = true;
  }
  out.unsteady_amplitude = reader.get_double("unsteady", "amplitude", 0.1);
  out.unsteady_frequency = reader.get_double("unsteady", "frequency", 0.4);
  out.unsteady_t_end = reader.get_double("unsteady", "t_end", 7.5);

  reader.check_all_used();
  return out;
}

}  // namespace cavity
