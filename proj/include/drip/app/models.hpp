#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include "drip/control/controller.hpp"
#include "drip/forecast/model.hpp"

namespace drip::app {

/// Serves AI-mode forecasts from per-pot checkpoints. Pots without a model
/// answer nullopt, which sends them to the controller's threshold fallback.
class ModelForecaster final : public control::ForecastProvider {
public:
    ModelForecaster() = default;

    /// Loads model_pot<k>.bin for every pot present in `dir`. A missing
    /// directory or file is not an error; a corrupt file is.
    static ModelForecaster from_directory(const std::filesystem::path& dir);

    void set(PotId pot, forecast::ForecastModel model);
    [[nodiscard]] bool has(PotId pot) const { return models_[pot.index()].has_value(); }
    [[nodiscard]] std::size_t loaded() const;

    [[nodiscard]] std::size_t lookback() const override;
    std::optional<std::vector<double>> forecast(PotId pot, std::span<const SensorSnapshot> history) override;

private:
    std::array<std::optional<forecast::ForecastModel>, kPotCount> models_;
};

}  // namespace drip::app
