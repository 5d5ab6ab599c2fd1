#include "drip/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace drip::app {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& raw, const std::string& key) {
    const std::string v = trim(raw);
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw Error("config: cannot parse '" + v + "' for " + key);
    }
    return out;
}

bool parse_bool(const std::string& raw, const std::string& key) {
    const std::string v = trim(raw);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error("config: expected true/false for " + key + ", got '" + v + "'");
}

template <typename T, std::size_t N>
std::array<T, N> parse_list(const std::string& raw, const std::string& key) {
    std::vector<std::string> parts;
    std::stringstream ss(raw);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
    std::array<T, N> out{};
    if (parts.size() == 1) {
        out.fill(parse_number<T>(parts[0], key));
        return out;
    }
    if (parts.size() != N) throw Error("config: " + key + " needs 1 or " + std::to_string(N) + " values");
    for (std::size_t i = 0; i < N; ++i) out[i] = parse_number<T>(parts[i], key);
    return out;
}

template <typename T>
std::string show(T v) {
    if constexpr (std::is_same_v<T, bool>) {
        return v ? "true" : "false";
    } else if constexpr (std::is_floating_point_v<T>) {
        std::array<char, 64> buf{};
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), ptr);
    } else {
        return std::to_string(v);
    }
}

template <typename T, std::size_t N>
std::string show_list(const std::array<T, N>& a) {
    std::string s;
    for (std::size_t i = 0; i < N; ++i) s += (i ? ", " : "") + show(a[i]);
    return s;
}

struct Field {
    std::string section;
    std::string key;
    std::function<void(AppConfig&, const std::string&)> set;
    std::function<std::string(const AppConfig&)> get;
    std::string help;
};

#define NUM_FIELD(sec, name, member, type, help)                                                          \
    Field {                                                                                                \
        sec, name, [](AppConfig& c, const std::string& v) { c.member = parse_number<type>(v, sec "." name); }, \
            [](const AppConfig& c) { return show<type>(c.member); }, help                                  \
    }
#define BOOL_FIELD(sec, name, member, help)                                                               \
    Field {                                                                                                \
        sec, name, [](AppConfig& c, const std::string& v) { c.member = parse_bool(v, sec "." name); },     \
            [](const AppConfig& c) { return show<bool>(c.member); }, help                                  \
    }
#define LIST_FIELD(sec, name, member, type, help)                                                          \
    Field {                                                                                                 \
        sec, name,                                                                                          \
            [](AppConfig& c, const std::string& v) { c.member = parse_list<type, kPotCount>(v, sec "." name); }, \
            [](const AppConfig& c) { return show_list(c.member); }, help                                    \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        NUM_FIELD("sim", "dt", twin.sim.dt, double, "seconds per tick, whole number in [1, 10]"),
        NUM_FIELD("sim", "seed", twin.sim.seed, std::uint64_t, "weather and sensor noise seed"),
        NUM_FIELD("sim", "e0", twin.sim.e0, double, "evaporation per degC above t0 per second"),
        NUM_FIELD("sim", "t0", twin.sim.t0, double, "evaporation onset, degC"),
        NUM_FIELD("sim", "d", twin.sim.d, double, "drainage rate per second"),
        NUM_FIELD("sim", "q_irr", twin.sim.q_irr, double, "moisture added per second per open valve"),
        NUM_FIELD("sim", "m_sat", twin.sim.m_sat, double, "saturation moisture fraction"),
        NUM_FIELD("sim", "adc_dry", twin.sim.adc_dry, int, "ADC counts of bone-dry soil"),
        NUM_FIELD("sim", "adc_wet", twin.sim.adc_wet, int, "ADC counts of saturated soil"),
        NUM_FIELD("sim", "noise_sigma", twin.sim.noise_sigma, double, "soil probe noise, counts"),
        NUM_FIELD("sim", "pulses_per_l", twin.sim.pulses_per_l, double, "flow meter pulses per litre"),
        NUM_FIELD("sim", "lpm_per_valve", twin.sim.lpm_per_valve, double, "flow through one open valve, L/min"),
        LIST_FIELD("sim", "initial_moisture", twin.sim.initial_moisture, double, "per pot"),
        LIST_FIELD("sim", "evap_factor", twin.sim.evap_factor, double, "per pot evaporation multiplier"),
        NUM_FIELD("sim", "t_mean", twin.sim.weather.t_mean, double, "degC"),
        NUM_FIELD("sim", "t_amp", twin.sim.weather.t_amp, double, "degC"),
        NUM_FIELD("sim", "h_mean", twin.sim.weather.h_mean, double, "%RH"),
        NUM_FIELD("sim", "h_amp", twin.sim.weather.h_amp, double, "%RH"),
        NUM_FIELD("sim", "rain_mean_interval_s", twin.sim.weather.rain_mean_interval_s, double,
                  "mean dry spell; 0 disables rain"),
        NUM_FIELD("sim", "rain_mean_duration_s", twin.sim.weather.rain_mean_duration_s, double, "mean shower length"),
        NUM_FIELD("sim", "rain_rate", twin.sim.weather.rain_rate, double, "moisture per second while raining"),

        NUM_FIELD("firmware", "send_interval", twin.send_interval, std::int64_t, "seconds between frames"),

        NUM_FIELD("controller", "alpha", twin.controller.ai.alpha, double, "AI seconds of watering per count of deficit"),
        NUM_FIELD("controller", "dur_min", twin.controller.ai.dur_min, int, "shortest AI watering, s"),
        NUM_FIELD("controller", "dur_max", twin.controller.ai.dur_max, int, "longest AI watering, s"),
        NUM_FIELD("controller", "replan_interval", twin.controller.ai.replan_interval, std::int64_t,
                  "seconds between AI plans for an idle pot"),
        BOOL_FIELD("controller", "skip_when_raining", twin.controller.ai.skip_when_raining,
                   "AI mode does not water while the rain sensor is wet"),
        NUM_FIELD("controller", "failure_window", twin.controller.failure_window, std::size_t,
                  "consecutive stuck frames before a sensor counts as failed"),
        NUM_FIELD("controller", "divergence_frames", twin.controller.divergence_frames, std::size_t,
                  "disagreeing AUTO frames before a diagnostic"),
        LIST_FIELD("controller", "threshold", twin.controller.threshold, int, "per pot, ADC counts (higher is drier)"),

        NUM_FIELD("train", "epochs", train.train.epochs, std::size_t, ""),
        NUM_FIELD("train", "batch_size", train.train.batch_size, std::size_t, ""),
        NUM_FIELD("train", "learning_rate", train.train.learning_rate, double, ""),
        NUM_FIELD("train", "beta1", train.train.beta1, double, ""),
        NUM_FIELD("train", "beta2", train.train.beta2, double, ""),
        NUM_FIELD("train", "epsilon", train.train.epsilon, double, ""),
        NUM_FIELD("train", "clip_norm", train.train.clip_norm, double, "0 disables clipping"),
        NUM_FIELD("train", "seed", train.train.seed, std::uint64_t, ""),
        NUM_FIELD("train", "hidden", train.model.hidden, std::size_t, "LSTM units"),
        NUM_FIELD("train", "dense", train.model.dense, std::size_t, "dense layer units"),
        NUM_FIELD("train", "dropout", train.model.dropout, double, ""),
        NUM_FIELD("train", "lookback", train.model.window.lookback, std::size_t, "input steps"),
        NUM_FIELD("train", "horizon", train.model.window.horizon, std::size_t, "forecast steps"),
        NUM_FIELD("train", "stride", train.stride, std::size_t, "spacing of training windows"),

        Field{"gateway", "bind", [](AppConfig& c, const std::string& v) { c.gateway.bind = trim(v); },
              [](const AppConfig& c) { return c.gateway.bind; }, "listen address"},
        NUM_FIELD("gateway", "port", gateway.port, int, ""),
        Field{"gateway", "token", [](AppConfig& c, const std::string& v) { c.gateway.token = trim(v); },
              [](const AppConfig& c) { return c.gateway.token; }, "bearer token required on every request"},
        NUM_FIELD("gateway", "event_buffer", gateway.event_buffer, std::size_t, "events kept for slow clients"),
        NUM_FIELD("gateway", "time_scale", gateway.time_scale, double, "sim seconds per wall second; 0 = unpaced"),
        Field{"gateway", "log", [](AppConfig& c, const std::string& v) { c.gateway.log = trim(v); },
              [](const AppConfig& c) { return c.gateway.log.string(); }, "telemetry log file"},
    };
    return f;
}

#undef NUM_FIELD
#undef BOOL_FIELD
#undef LIST_FIELD

}  // namespace

void AppConfig::validate() const {
    twin.validate();
    train.train.validate();
    train.model.window.validate();
    if (train.model.hidden == 0 || train.model.dense == 0) throw Error("config: hidden and dense must be positive");
    if (train.model.dropout < 0.0 || train.model.dropout >= 1.0) throw Error("config: dropout must lie in [0, 1)");
    if (train.stride == 0) throw Error("config: train.stride must be positive");
    if (gateway.port < 0 || gateway.port > 65535) throw Error("config: gateway.port out of range");
    if (gateway.event_buffer == 0) throw Error("config: gateway.event_buffer must be positive");
}

AppConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(std::string("config: ") + e.what());
    }

    AppConfig cfg;
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw Error("config: key '" + section + "' outside a section");
        const auto& all = fields();
        if (std::none_of(all.begin(), all.end(), [&](const Field& f) { return f.section == section; })) {
            throw Error("config: unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            auto it = std::find_if(all.begin(), all.end(),
                                   [&](const Field& f) { return f.section == section && f.key == key; });
            if (it == all.end()) throw Error("config: unknown key " + section + "." + key);
            it->set(cfg, value.data());
        }
    }
    cfg.validate();
    return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string default_config_text() {
    const AppConfig defaults;
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            out += (section.empty() ? "" : "\n") + std::string("[") + f.section + "]\n";
            section = f.section;
        }
        if (!f.help.empty()) out += "; " + f.help + "\n";
        out += f.key + " = " + f.get(defaults) + "\n";
    }
    return out;
}

}  // namespace drip::app
