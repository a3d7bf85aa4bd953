#pragma once

#include <chrono>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsn/error.hpp"

namespace rsn::cli {

// Every command writes exactly one manifest next to its outputs: the
// command name, every option with defaults resolved, seed, inputs,
// outputs, artifact format versions, and wall-clock timestamps. Rerunning
// a command with the recorded configuration reproduces the run (timing
// fields aside).
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  nlohmann::json format_versions = nlohmann::json::object();
  std::chrono::system_clock::time_point started_at;
  std::chrono::system_clock::time_point finished_at;

  void start() { started_at = std::chrono::system_clock::now(); }

  void write(const std::string& path) {
    finished_at = std::chrono::system_clock::now();
    nlohmann::json doc;
    doc["command"] = command;
    doc["config"] = config;
    doc["seed"] = seed;
    doc["inputs"] = inputs;
    doc["outputs"] = outputs;
    doc["format_versions"] = format_versions;
    doc["started_at"] = iso8601(started_at);
    doc["finished_at"] = iso8601(finished_at);
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(errc::io_failure, "cannot create " + path);
    out << doc.dump(2) << '\n';
    if (!out) fail(errc::io_failure, "write failed for " + path);
  }

 private:
  static std::string iso8601(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }
};

}  // namespace rsn::cli
