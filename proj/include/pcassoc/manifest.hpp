#pragma once

#include <map>
#include <string>
#include <vector>

namespace pcassoc {

/// Reproducibility record written alongside every command's outputs.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> parameters;
  std::string seed;  // empty when the command is deterministic
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double wall_time_seconds = 0.0;
  std::string timestamp_utc;

  void write(const std::string& path) const;
};

std::string utc_timestamp();

}  // namespace pcassoc
