#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace faberdyn {

/// Configuration error tied to a key (empty when the error is structural).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat key/value configuration with dotted section names.
///
/// Text format:
///
///     # comment            (also ';')
///     experiment = ghd_compare
///     [model]
///     gamma = 0.2          -> key "model.gamma"
///     [trajectories.rng]
///     seed = 7             -> key "trajectories.rng.seed"
///
/// Every key must appear in the schema; unknown keys raise ConfigError.
class Config {
 public:
  struct Entry {
    std::string key;
    std::string default_value;
    std::string help;
  };

  /// The documented schema with defaults, in a stable order.
  static const std::vector<Entry>& schema();
  /// Short command-line aliases, e.g. "gamma" -> "model.gamma".
  static const std::map<std::string, std::string>& aliases();
  /// Canonical key for `name` (alias or full key); throws ConfigError if unknown.
  static std::string resolve_key(const std::string& name);

  Config();

  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  void set(const std::string& name, const std::string& value);
  bool is_set(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  /// All keys with their resolved values, in schema order.
  std::vector<std::pair<std::string, std::string>> resolved() const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> explicit_;
};

}  // namespace faberdyn
