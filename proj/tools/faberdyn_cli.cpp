// faberdyn command-line runner.
//
//   faberdyn list
//   faberdyn run <experiment> [--config FILE] [--threads N] [--key value ...]
//
// Exit codes: 0 ok, 1 numerical failure, 2 configuration error.

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "faberdyn/experiments.hpp"
#include "faberdyn/types.hpp"
#include "faberdyn/version.hpp"

namespace {

int emit_error(const std::string& kind, const std::string& key, const std::string& message, int code) {
  nlohmann::ordered_json e;
  e["error"] = kind;
  if (!key.empty()) e["key"] = key;
  e["message"] = message;
  e["exit_code"] = code;
  std::cerr << e.dump() << '\n';
  return code;
}

unsigned threads_from_env() {
  const char* env = std::getenv("FABERDYN_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  try {
    const long v = std::stol(env);
    if (v < 1) throw std::invalid_argument("FABERDYN_THREADS");
    return static_cast<unsigned>(v);
  } catch (const std::exception&) {
    throw faberdyn::ConfigError("FABERDYN_THREADS", "FABERDYN_THREADS must be a positive integer");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Faber-polynomial propagation of non-Hermitian chains and quantum-jump ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(faberdyn::kGitDescribe));

  CLI::App* list = app.add_subcommand("list", "list the registered experiments");
  CLI::App* run = app.add_subcommand("run", "run one experiment; extra --key value pairs override the config");
  std::string name;
  std::string config_path;
  int threads = 0;
  run->add_option("experiment", name, "experiment name")->required();
  run->add_option("--config", config_path, "key-value config file");
  run->add_option("--threads", threads, "worker threads for trajectory ensembles")->check(CLI::PositiveNumber);
  run->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  if (*list) {
    for (const auto& e : faberdyn::experiment_registry()) std::cout << e.name << "\t" << e.figure << '\n';
    return 0;
  }

  try {
    faberdyn::Config cfg = config_path.empty() ? faberdyn::Config() : faberdyn::Config::load(config_path);
    const std::vector<std::string> extras = run->remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
      const std::string& tok = extras[i];
      if (tok.rfind("--", 0) != 0) throw faberdyn::ConfigError(tok, "unexpected argument '" + tok + "'");
      std::string key = tok.substr(2);
      std::string value;
      const auto eq = key.find('=');
      if (eq != std::string::npos) {
        value = key.substr(eq + 1);
        key.erase(eq);
      } else {
        if (i + 1 >= extras.size()) throw faberdyn::ConfigError(key, "missing value for --" + key);
        value = extras[++i];
      }
      cfg.set(key, value);
    }
    cfg.set("experiment", name);
    faberdyn::find_experiment(name);

    unsigned nthreads = threads > 0 ? static_cast<unsigned>(threads) : threads_from_env();
    if (nthreads == 0) nthreads = 1;

    const faberdyn::RunReport report = faberdyn::run_experiment(cfg, nthreads);
    for (const auto& f : report.files) std::cout << f << '\n';
    return 0;
  } catch (const faberdyn::ConfigError& e) {
    return emit_error("config", e.key(), e.what(), 2);
  } catch (const faberdyn::InvalidArgument& e) {
    return emit_error("invalid_argument", "", e.what(), 1);
  } catch (const faberdyn::NumericalError& e) {
    return emit_error("numerical", "", e.what(), 1);
  } catch (const std::exception& e) {
    return emit_error("internal", "", e.what(), 1);
  }
}
