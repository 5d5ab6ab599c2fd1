#include "drip/app/pipeline.hpp"

#include <fmt/format.h>

#include "drip/app/twin.hpp"

namespace drip::app {

namespace {

void require_rows(std::size_t rows, const forecast::WindowSpec& w) {
    const std::size_t need = w.lookback + w.horizon;
    if (rows < need) {
        throw Error(fmt::format("need ≥ {} rows (lookback {} + horizon {}), log has {}", need, w.lookback,
                                w.horizon, rows));
    }
}

}  // namespace

SimulationSummary simulate(const AppConfig& cfg, std::int64_t duration_s, const std::filesystem::path& out) {
    if (duration_s < 0) throw Error("duration must not be negative");
    std::filesystem::remove(out);
    store::TelemetryLog log(out);
    Twin twin(cfg.twin);
    twin.attach_log(&log);
    twin.run_until(duration_s);
    log.flush();

    SimulationSummary s;
    s.duration_s = twin.now();
    s.ticks = static_cast<std::uint64_t>(twin.now() / twin.dt());
    s.frames = twin.frames();
    for (std::size_t i = 0; i < kPotCount; ++i) {
        s.liters[i] = twin.plant().meter().liters(PotId(i));
        s.duty[i] = s.ticks ? static_cast<double>(twin.relay_on_ticks()[i]) / static_cast<double>(s.ticks) : 0.0;
    }
    return s;
}

std::string format_summary(const SimulationSummary& s) {
    std::string out = fmt::format("simulated {} s ({} ticks), {} frames\n", s.duration_s, s.ticks, s.frames);
    double total = 0.0;
    for (std::size_t i = 0; i < kPotCount; ++i) {
        out += fmt::format("{}: water {:.3f} L, valve duty {:.2f}%\n", PotId(i).name(), s.liters[i], 100.0 * s.duty[i]);
        total += s.liters[i];
    }
    out += fmt::format("total water {:.3f} L\n", total);
    return out;
}

TrainOutcome train_on_log(const std::vector<SensorSnapshot>& records, PotId pot, const TrainSettings& settings) {
    const auto& window = settings.model.window;
    require_rows(records.size(), window);
    const auto ds = store::to_dataset(records, pot);
    auto data = forecast::prepare(ds, window, settings.stride);
    if (data.train.empty()) throw Error("training segment is shorter than one window");
    if (data.test.empty()) throw Error("test segment is shorter than one window");

    auto model = forecast::make_model(pot, settings.model, settings.train.seed);
    model.scaler = data.scaler;

    TrainOutcome out{forecast::train(std::move(model), data.train, data.val, settings.train), {}, ds.size(),
                     data.train.size(), data.val.size()};
    out.test = forecast::evaluate(out.result.model, data.test);
    return out;
}

forecast::EvalReport evaluate_on_log(const forecast::ForecastModel& model, const std::vector<SensorSnapshot>& records) {
    require_rows(records.size(), model.window);
    const auto parts = store::split(store::to_dataset(records, model.pot));
    const auto rows = model.scaler.transform(parts.test.rows);
    const forecast::SequenceSet test(rows, model.window);
    if (test.empty()) throw Error("test segment is shorter than one window");
    return forecast::evaluate(model, test);
}

std::string format_history(const std::vector<forecast::EpochRecord>& history) {
    std::string out;
    for (const auto& e : history) out += fmt::format("{} {} {}\n", e.epoch, e.train_loss, e.val_loss);
    return out;
}

}  // namespace drip::app
