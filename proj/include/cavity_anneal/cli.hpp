#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavity_anneal/csv.hpp"
#include "cavity_anneal/hamiltonians.hpp"

namespace cavity_anneal::cli {

/// Invalid command line or config file; maps to exit status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GridSpec {
  double first = 0;
  double last = 0;
  double step = 1;

  std::vector<double> values() const;
};

struct RunConfig {
  std::string command;
  AnnealParams params;
  std::filesystem::path out_dir = ".";
  GridSpec grid_U{0.0, 1.0, 0.05};
  GridSpec grid_V{1.0, 1.2, 0.01};
  std::vector<double> tf_grid{100, 200, 400, 800, 1300, 2000};
  std::vector<int> nc_set{1, 2, 3};
  std::vector<Model> models{Model::full, Model::adiabatic};
  unsigned workers = 1;
  int cadence = 100;
  bool plots = true;
  int levels = 10;
  int points = 201;

  /// Keys given explicitly on the command line or in the config file.
  std::set<std::string> explicit_keys;
};

inline constexpr std::string_view kCommands[] = {"spectrum",      "gap-scan",   "anneal",
                                                 "ramp-scan",     "phase-diagram",
                                                 "cutoff-scan"};

/// Parses `args` (without the program name). Config-file values are applied
/// first, flags override them. Throws ConfigError on any invalid input,
/// including unknown keys.
RunConfig parse_config(std::span<const std::string> args);

/// Parses the `key = value` config text; '#' starts a comment line.
KeyValues parse_config_text(const std::string& text);

/// Every resolved setting as config-file keys; written as the CSV header so
/// that a file's settings can be fed back through --config.
KeyValues config_entries(const RunConfig& config);

std::string usage();

/// Runs one subcommand. Returns 0 on success, 1 on numerical failure, 2 on
/// invalid configuration.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace cavity_anneal::cli
