#include <csignal>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "drip/app/models.hpp"
#include "drip/app/pipeline.hpp"
#include "drip/app/runtime.hpp"
#include "drip/wire/protocol.hpp"

using namespace drip;

namespace {

/// "90", "90s", "15m", "6h", "3d" -> seconds.
std::int64_t parse_duration(const std::string& text) {
    if (text.empty()) throw Error("empty duration");
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        throw Error("bad duration '" + text + "'");
    }
    const std::string unit = text.substr(used);
    long long scale = 1;
    if (unit == "m") scale = 60;
    else if (unit == "h") scale = 3600;
    else if (unit == "d") scale = 86400;
    else if (!unit.empty() && unit != "s") throw Error("bad duration unit in '" + text + "' (use s, m, h or d)");
    if (v < 0) throw Error("duration must not be negative");
    return v * scale;
}

app::AppConfig config_from(const std::string& path) {
    return path.empty() ? app::AppConfig{} : app::load_config(path);
}

PotId pot_from(int pot) {
    if (pot < 1 || pot > static_cast<int>(kPotCount)) throw Error("--pot must be 1, 2 or 3");
    return PotId(static_cast<std::size_t>(pot - 1));
}

std::vector<SensorSnapshot> read_log(const std::string& path) {
    if (!std::filesystem::exists(path)) throw Error("no such log: " + path);
    return store::TelemetryLog::read_file(path);
}

int cmd_simulate(const std::string& config, const std::string& duration, std::optional<std::uint64_t> seed,
                 const std::string& out) {
    auto cfg = config_from(config);
    if (seed) cfg.twin.sim.seed = *seed;
    cfg.validate();
    const auto summary = app::simulate(cfg, parse_duration(duration), out);
    std::cout << app::format_summary(summary) << "log: " << out << "\n";
    return 0;
}

int cmd_train(const std::string& config, const std::string& log, int pot, std::optional<std::size_t> epochs,
              std::optional<std::uint64_t> seed, std::filesystem::path out) {
    auto cfg = config_from(config);
    if (epochs) cfg.train.train.epochs = *epochs;
    if (seed) cfg.train.train.seed = *seed;
    cfg.validate();
    const PotId id = pot_from(pot);
    const auto records = read_log(log);

    const auto t0 = std::chrono::steady_clock::now();
    const auto r = app::train_on_log(records, id, cfg.train);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (std::filesystem::is_directory(out)) out /= forecast::checkpoint_name(id);
    forecast::save_checkpoint(r.result.model, out);

    std::cout << "rows " << r.rows << ", windows train " << r.train_windows << " val " << r.val_windows << " test "
              << r.test.windows << "\n";
    for (const auto& e : r.result.history) {
        std::printf("epoch %3zu  train %.6f  val %.6f\n", e.epoch, e.train_loss, e.val_loss);
    }
    std::printf("best epoch %zu\n", r.result.best_epoch);
    std::printf("test MAE normalized %.6f\ntest MAE counts %.3f\n", r.test.mae_scaled, r.test.mae_counts);
    std::printf("trained in %.1f s, checkpoint %s\n", secs, out.c_str());
    return 0;
}

int cmd_eval(const std::string& model, const std::string& log) {
    const auto m = forecast::load_checkpoint(model);
    const auto report = app::evaluate_on_log(m, read_log(log));
    std::printf("%s: %zu test windows\n", m.pot.name().c_str(), report.windows);
    std::printf("test MAE normalized %.6f\ntest MAE counts %.3f\n", report.mae_scaled, report.mae_counts);
    return 0;
}

int cmd_serve(const std::string& config, const std::string& models, std::optional<int> port,
              std::optional<double> time_scale) {
    auto cfg = config_from(config);
    if (port) cfg.gateway.port = *port;
    if (time_scale) cfg.gateway.time_scale = *time_scale;
    cfg.validate();

    // handled by sigwait below; threads started after this inherit the mask
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    app::ModelForecaster forecaster;
    if (!models.empty()) forecaster = app::ModelForecaster::from_directory(models);
    if (forecaster.loaded() == 0) spdlog::warn("no forecast models loaded; AI mode will use threshold logic");

    app::Runtime runtime(cfg, std::make_unique<store::TelemetryLog>(cfg.gateway.log), &forecaster);
    gateway::Server server(runtime, {cfg.gateway.bind, cfg.gateway.port, cfg.gateway.token});
    server.bind();
    std::printf("listening on http://%s:%d\n", cfg.gateway.bind.c_str(), server.port());
    std::fflush(stdout);

    runtime.start();
    std::thread http([&] { server.run(); });
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {}, shutting down", sig);
    runtime.events().close();
    server.stop();
    http.join();
    runtime.stop();
    std::printf("stopped at t=%lld, %zu frames in %s\n", static_cast<long long>(runtime.now()), runtime.log().size(),
                cfg.gateway.log.c_str());
    return 0;
}

int cmd_replay(const std::string& log, double speed) {
    if (speed < 0) throw Error("--speed must not be negative");
    const auto records = read_log(log);
    const auto start = std::chrono::steady_clock::now();
    for (const auto& r : records) {
        if (speed > 0) {
            const double offset = static_cast<double>(r.timestamp - records.front().timestamp) / speed;
            std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                      std::chrono::duration<double>(offset)));
        }
        std::cout << wire::encode_telemetry(r) << std::flush;
    }
    return 0;
}

int cmd_export(const std::string& log, const std::string& out) {
    const auto records = read_log(log);
    store::export_csv(records, out);
    std::printf("%zu rows -> %s\n", records.size(), out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drip irrigation digital twin"};
    app.require_subcommand(1);

    std::string config, out, log, model, models;
    std::string duration = "2d";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
    std::optional<int> port;
    std::optional<double> time_scale;
    int pot = 1;
    double speed = 0.0;

    auto* sim = app.add_subcommand("simulate", "Run the closed loop and write a telemetry log");
    sim->add_option("--config", config, "INI config file")->check(CLI::ExistingFile);
    sim->add_option("--duration", duration, "sim time, e.g. 3600, 90m, 6h, 3d")->capture_default_str();
    sim->add_option("--seed", seed, "overrides [sim] seed");
    sim->add_option("--out", out, "telemetry log to write")->required();

    auto* train = app.add_subcommand("train", "Train one pot's forecaster on a log");
    train->add_option("--config", config, "INI config file ([train] section)")->check(CLI::ExistingFile);
    train->add_option("--log", log, "telemetry log")->required();
    train->add_option("--pot", pot, "pot 1..3")->capture_default_str();
    train->add_option("--epochs", epochs, "overrides [train] epochs");
    train->add_option("--seed", seed, "overrides [train] seed");
    train->add_option("--out", out, "checkpoint file or directory")->required();

    auto* eval = app.add_subcommand("eval", "Score a checkpoint on the test segment of a log");
    eval->add_option("--model", model, "checkpoint")->required()->check(CLI::ExistingFile);
    eval->add_option("--log", log, "telemetry log")->required();

    auto* serve = app.add_subcommand("serve", "Run the twin behind the HTTP gateway");
    serve->add_option("--config", config, "INI config file")->check(CLI::ExistingFile);
    serve->add_option("--models", models, "directory with model_pot<k>.bin checkpoints");
    serve->add_option("--port", port, "overrides [gateway] port");
    serve->add_option("--time-scale", time_scale, "sim seconds per wall second; 0 runs unpaced");

    auto* replay = app.add_subcommand("replay", "Print a log's frames, paced by their timestamps");
    replay->add_option("--log", log, "telemetry log")->required();
    replay->add_option("--speed", speed, "sim seconds per wall second; 0 = no pacing")->capture_default_str();

    auto* exp = app.add_subcommand("export", "Write a log as CSV");
    exp->add_option("--log", log, "telemetry log")->required();
    exp->add_option("--out", out, "CSV file")->required();

    CLI11_PARSE(app, argc, argv);
    // results go to stdout, logs to stderr
    spdlog::set_default_logger(spdlog::stderr_color_mt("dripctl"));

    try {
        if (*sim) return cmd_simulate(config, duration, seed, out);
        if (*train) return cmd_train(config, log, pot, epochs, seed, out);
        if (*eval) return cmd_eval(model, log);
        if (*serve) return cmd_serve(config, models, port, time_scale);
        if (*replay) return cmd_replay(log, speed);
        if (*exp) return cmd_export(log, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
