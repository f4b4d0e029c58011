#include "faberdyn/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace faberdyn {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

const std::vector<Config::Entry>& Config::schema() {
  static const std::vector<Entry> entries = {
      {"experiment", "", "experiment name (see `faberdyn list`)"},
      {"output", "faberdyn_out", "output directory"},
      {"model.J", "1", "XX exchange, unit of energy"},
      {"model.gamma", "0.5", "non-reciprocity"},
      {"model.delta", "0", "Ising exchange"},
      {"model.L", "16", "number of sites"},
      {"model.boundary", "obc", "obc or pbc (pbc only for the single-particle chain)"},
      {"time.t_final", "10", "final time"},
      {"time.dt", "0.1", "propagation step"},
      {"time.samples", "100", "number of output time samples (excluding t = 0)"},
      {"propagator.threshold", "1e-16", "coefficient truncation threshold"},
      {"propagator.order", "0", "fixed number of polynomials; 0 selects the threshold policy"},
      {"propagator.margin", "0.05", "relative inflation of the spectral box"},
      {"propagator.compare_order", "0", "second fixed order for convergence columns; 0 disables"},
      {"gaussian.renormalize_every", "1", "QR renormalisation period in steps"},
      {"trajectories.count", "200", "number of trajectories"},
      {"trajectories.seed", "2024", "ensemble seed (Philox key)"},
      {"trajectories.dt_max", "0.05", "largest propagation sub-step"},
      {"trajectories.norm_tol", "1e-12", "tolerance on the squared norm at a jump"},
      {"trajectories.threads", "0", "worker threads; 0 defers to --threads / FABERDYN_THREADS"},
      {"trajectories.entropy_cut", "-1", "left block size for the entropy; -1 means L/2"},
      {"analysis.tau_fraction", "0.95", "plateau fraction defining tau*"},
  };
  return entries;
}

const std::map<std::string, std::string>& Config::aliases() {
  static const std::map<std::string, std::string> a = {
      {"J", "model.J"},
      {"gamma", "model.gamma"},
      {"delta", "model.delta"},
      {"L", "model.L"},
      {"boundary", "model.boundary"},
      {"t", "time.t_final"},
      {"dt", "time.dt"},
      {"samples", "time.samples"},
      {"threshold", "propagator.threshold"},
      {"order", "propagator.order"},
      {"seed", "trajectories.seed"},
      {"count", "trajectories.count"},
      {"trajectories", "trajectories.count"},
      {"out", "output"},
  };
  return a;
}

std::string Config::resolve_key(const std::string& name) {
  const auto& s = schema();
  if (std::any_of(s.begin(), s.end(), [&](const Entry& e) { return e.key == name; })) return name;
  const auto it = aliases().find(name);
  if (it != aliases().end()) return it->second;
  throw ConfigError(name, "unknown configuration key '" + name + "'");
}

Config::Config() {
  for (const auto& e : schema()) values_[e.key] = e.default_value;
}

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("", "line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    const auto& s = schema();
    if (!std::any_of(s.begin(), s.end(), [&](const Entry& e) { return e.key == full; }))
      throw ConfigError(full, "unknown configuration key '" + full + "'");
    c.values_[full] = value;
    c.explicit_[full] = true;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void Config::set(const std::string& name, const std::string& value) {
  const std::string key = resolve_key(name);
  values_[key] = value;
  explicit_[key] = true;
}

bool Config::is_set(const std::string& key) const { return explicit_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "unknown configuration key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(key, "key '" + key + "' expects a finite number, got '" + s + "'");
  return v;
}

long long Config::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(key, "key '" + key + "' expects an integer, got '" + s + "'");
  return v;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string s = get_string(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(key, "key '" + key + "' expects a non-negative integer, got '" + s + "'");
  return v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key, "key '" + key + "' expects true or false, got '" + s + "'");
}

std::vector<std::pair<std::string, std::string>> Config::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : schema()) out.emplace_back(e.key, values_.at(e.key));
  return out;
}

}  // namespace faberdyn
