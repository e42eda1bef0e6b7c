#pragma once

#include <unistd.h>

#include <chrono>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "delin/graph_io.hpp"
#include "delin/random.hpp"
#include "delin/service.hpp"

#ifndef DELIN_VERSION
#define DELIN_VERSION "0.1.0"
#endif

namespace delin {

inline std::string artifact_version() { return DELIN_VERSION; }

/// Sidecar written next to every output artifact.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json seeds = nlohmann::json::array();
  double wall_clock = 0.0;

  nlohmann::json to_json() const {
    char host[256] = {0};
    if (gethostname(host, sizeof host - 1) != 0) host[0] = 0;
    return {{"command", command},
            {"config", config},
            {"seeds", seeds},
            {"version", artifact_version()},
            {"rng", std::string(Rng::algorithm)},
            {"started_at", started_at},
            {"wall_clock_s", wall_clock},
            {"host",
             {{"name", std::string(host)},
              {"hardware_threads", std::thread::hardware_concurrency()},
              {"compiler", __VERSION__}}}};
  }

  std::string started_at = detail::utc_now();
};

/// Writes `<artifact>.manifest.json`.
inline void write_manifest(const std::string& artifact_path, const RunManifest& m) {
  write_file(artifact_path + ".manifest.json", m.to_json().dump(2) + "\n");
}

}  // namespace delin
