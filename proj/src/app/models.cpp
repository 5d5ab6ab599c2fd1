#include "drip/app/models.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace drip::app {

ModelForecaster ModelForecaster::from_directory(const std::filesystem::path& dir) {
    ModelForecaster f;
    for (PotId pot : all_pots()) {
        const auto path = dir / forecast::checkpoint_name(pot);
        if (!std::filesystem::exists(path)) {
            spdlog::warn("no model for {} at {}; AI mode will use threshold logic for it", pot.name(), path.string());
            continue;
        }
        auto model = forecast::load_checkpoint(path);
        if (model.pot != pot) throw Error(path.string() + " holds a model for " + model.pot.name());
        f.set(pot, std::move(model));
    }
    return f;
}

void ModelForecaster::set(PotId pot, forecast::ForecastModel model) {
    model.validate();
    models_[pot.index()] = std::move(model);
}

std::size_t ModelForecaster::loaded() const {
    return static_cast<std::size_t>(std::count_if(models_.begin(), models_.end(), [](const auto& m) { return m.has_value(); }));
}

std::size_t ModelForecaster::lookback() const {
    std::size_t l = 0;
    for (const auto& m : models_) {
        if (m) l = std::max(l, m->window.lookback);
    }
    return l;
}

std::optional<std::vector<double>> ModelForecaster::forecast(PotId pot, std::span<const SensorSnapshot> history) {
    const auto& m = models_[pot.index()];
    if (!m || history.size() < m->window.lookback) return std::nullopt;
    return forecast::forecast_counts(*m, history.last(m->window.lookback));
}

}  // namespace drip::app
