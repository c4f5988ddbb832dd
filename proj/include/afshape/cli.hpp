// Command-line front end: configuration parsing, solve, export.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "afshape/solver.hpp"

namespace afshape {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "5,6,7", "-15..-13,11..14" -> sorted integer list. field names the
/// option in diagnostics.
std::vector<int> parse_index_list(std::string_view text, const std::string& field);

struct CliOptions {
  SolverConfig config;
  std::string outdir = "afshape_out";
  bool dry_run = false;
  bool verbose = false;
  bool timing = false;
};

/// Precedence per field: flag > config file > built-in default. The seed
/// additionally falls back to AFSHAPE_SEED when neither flag nor file sets it.
/// Throws ConfigError; the returned config has been validated.
CliOptions parse_config(const std::vector<std::string>& args);

nlohmann::json config_to_json(const SolverConfig& config);
/// Fields absent from j keep their value from base.
SolverConfig config_from_json(const nlohmann::json& j, SolverConfig base = {});

struct RunManifest {
  nlohmann::json config;
  std::string tool_version;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;
  double initial_C = 0.0;
  double final_C = 0.0;
  double suppression_db = 0.0;
  double zeta = 0.0;
  int outer_iterations = 0;
  bool converged = false;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Solves, then writes code.csv, af_grid.csv, af_grid_db.csv, trace.csv,
/// report.json and manifest.json (plus inner_trace.csv when verbose) into
/// opts.outdir. Files already written are removed if a later write fails.
RunManifest run_and_export(const CliOptions& opts);

/// Entry point for the executable; returns an ExitCode.
int cli_main(int argc, char** argv);

}  // namespace afshape
