#pragma once

#include "ada/agent.hpp"
#include "ada/config.hpp"

#include <string>

namespace ada {

struct LoadedCheckpoint {
    RunConfig cfg;
    TrainerState state;
};

/// Binary container: magic "ADMC", version byte, then the config text and
/// every tensor in little-endian doubles. Round-trips bit-exactly.
void save_checkpoint(const std::string& path, const RunConfig& cfg, const TrainerState& state);

LoadedCheckpoint load_checkpoint(const std::string& path);

} // namespace ada
