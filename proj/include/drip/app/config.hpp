#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "drip/app/twin.hpp"
#include "drip/forecast/trainer.hpp"

namespace drip::app {

struct TrainSettings {
    forecast::TrainConfig train;
    forecast::ModelOptions model;
    std::size_t stride = 1;  // spacing of training windows; validation/test always use every window
};

struct GatewaySettings {
    std::string bind = "127.0.0.1";
    int port = 8080;
    std::string token = "changeme";
    std::size_t event_buffer = 1024;
    double time_scale = 1.0;  // sim seconds per wall second; <= 0 runs unpaced
    std::filesystem::path log = "telemetry.jsonl";
};

/// Everything the `[sim]`, `[firmware]`, `[controller]`, `[train]` and
/// `[gateway]` sections of a config file can set. Defaults match the
/// documented values.
struct AppConfig {
    TwinConfig twin;
    TrainSettings train;
    GatewaySettings gateway;

    void validate() const;
};

/// Parses INI text. Unknown sections or keys and unparsable values throw
/// drip::Error naming the offending key.
AppConfig parse_config(const std::string& text);
AppConfig load_config(const std::filesystem::path& path);

/// The defaults as a commented config file.
std::string default_config_text();

}  // namespace drip::app
