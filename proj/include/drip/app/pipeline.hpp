#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "drip/app/config.hpp"
#include "drip/forecast/trainer.hpp"

namespace drip::app {

struct SimulationSummary {
    std::int64_t duration_s = 0;
    std::uint64_t ticks = 0;
    std::uint64_t frames = 0;
    std::array<double, kPotCount> liters{};
    std::array<double, kPotCount> duty{};  // fraction of ticks each valve was open
};

/// Closed-loop run from t = 0 to `duration_s`, frames written to `out`
/// (replaced if it exists).
SimulationSummary simulate(const AppConfig& cfg, std::int64_t duration_s, const std::filesystem::path& out);

std::string format_summary(const SimulationSummary& s);

struct TrainOutcome {
    forecast::TrainResult result;
    forecast::EvalReport test;
    std::size_t rows = 0;
    std::size_t train_windows = 0;
    std::size_t val_windows = 0;
};

/// Split, fit, train and score one pot. Throws drip::Error when the log is
/// shorter than lookback + horizon rows.
TrainOutcome train_on_log(const std::vector<SensorSnapshot>& records, PotId pot, const TrainSettings& settings);

/// Scores a checkpoint on the held-out test segment of a log, using the
/// model's own scaler.
forecast::EvalReport evaluate_on_log(const forecast::ForecastModel& model, const std::vector<SensorSnapshot>& records);

/// One line per epoch: "epoch train_loss val_loss" with round-trip precision.
std::string format_history(const std::vector<forecast::EpochRecord>& history);

}  // namespace drip::app
