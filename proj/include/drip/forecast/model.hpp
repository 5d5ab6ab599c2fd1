#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "drip/forecast/network.hpp"
#include "drip/forecast/scaler.hpp"
#include "drip/forecast/sequences.hpp"

namespace drip::forecast {

/// Per-pot forecaster: LSTM -> dropout -> dense(ReLU) -> linear horizon outputs,
/// plus the scaler fitted on the pot's training rows.
struct ForecastModel {
    PotId pot{0};
    WindowSpec window;
    Params params;
    double dropout = 0.2;
    MinMaxScaler scaler;

    [[nodiscard]] const NetworkShape& shape() const { return params.shape(); }
    void validate() const;
};

struct ModelOptions {
    WindowSpec window;
    std::size_t hidden = 64;
    std::size_t dense = 32;
    double dropout = 0.2;
};

ForecastModel make_model(PotId pot, const ModelOptions& opts, std::uint64_t seed);

/// Inference on one scaled window (features x lookback); output in scaled space.
Eigen::VectorXd predict_scaled(const ForecastModel& m, const Eigen::MatrixXd& X);

/// Forecast of the pot's zone moisture in ADC counts from the most recent
/// telemetry. Uses the last `lookback` snapshots; throws drip::Error if fewer.
std::vector<double> forecast_counts(const ForecastModel& m, std::span<const SensorSnapshot> recent);

/// Binary checkpoint: a self-describing header (shapes, window, scaler) and the
/// raw parameter vector. Loading reproduces predictions bit-exactly.
void save_checkpoint(const ForecastModel& m, const std::filesystem::path& path);
ForecastModel load_checkpoint(const std::filesystem::path& path);

/// Conventional file name for a pot's checkpoint: model_pot<k>.bin, k = 1..3.
std::string checkpoint_name(PotId pot);

}  // namespace drip::forecast
