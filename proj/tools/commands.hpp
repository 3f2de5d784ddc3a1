#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drlab/channels.hpp"
#include "drlab/json_io.hpp"
#include "drlab/physics.hpp"

namespace drlab::cli {

// Fully resolved run settings. Precedence: CLI flags > config file > preset defaults.
struct RunConfig {
  std::string command;
  std::string preset = "paper-device";
  std::string device_path;  // optional JSON overriding preset fields
  std::uint64_t seed = 1;
  std::string out = "out";

  // Channel calibration source: fit | ideal | explicit | file.
  std::string channel = "fit";
  NoiseParams noise;  // used when channel == explicit
  std::string channel_path;

  int n_max = 4;          // generate
  int n_exact = 8;
  int state_n_max = 4;    // dense state JSON is written up to this n

  std::string tomo_state = "psi_plus";  // psi_plus | chain
  int n_logical = 2;
  std::int64_t shots = 1000000;
  std::string shots_file;  // DRSHOT1 input; empty = synthesize
  bool save_shots = false;
  int bootstrap = 30;

  double threshold = 0.05;  // le
  int max_distance = 14;
  int matrix_n = 3;

  int compare_n_max = 10;   // compare

  int draws = 10;           // device

  json to_json() const;
};

// Applies a JSON config document; errors name the offending line.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin);

// One pass/fail line of a command's internal invariant suite.
struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CommandResult {
  std::vector<std::string> outputs;  // relative to cfg.out
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  bool ok() const;
};

CommandResult cmd_generate(const RunConfig& cfg);
CommandResult cmd_tomo(const RunConfig& cfg);
CommandResult cmd_le(const RunConfig& cfg);
CommandResult cmd_compare(const RunConfig& cfg);
CommandResult cmd_device(const RunConfig& cfg);

// Dispatches, writes manifest.json and returns the process exit status
// (0 ok, 2 error, 3 invariant failure).
int run(const RunConfig& cfg);

}  // namespace drlab::cli
