#include "pcassoc/manifest.hpp"

#include <ctime>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "pcassoc/version.hpp"

namespace pcassoc {

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j;
  j["tool"] = "pcassoc";
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["parameters"] = parameters;
  if (!seed.empty()) j["seed"] = seed;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["wall_time_seconds"] = wall_time_seconds;
  j["timestamp_utc"] = timestamp_utc;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace pcassoc
