#include "drip/store/telemetry_log.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <string>

#include <spdlog/spdlog.h>

#include "drip/wire/protocol.hpp"

namespace drip::store {

namespace {

std::vector<SensorSnapshot> load(const std::filesystem::path& path, std::uintmax_t* valid_bytes) {
    std::vector<SensorSnapshot> out;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open telemetry log " + path.string());
    const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
        const std::size_t nl = content.find('\n', pos);
        if (nl == std::string::npos) {
            spdlog::warn("telemetry log {}: ignoring incomplete final line", path.string());
            break;
        }
        ++line_no;
        const std::string_view line(content.data() + pos, nl - pos);
        auto snap = wire::parse_telemetry(line);
        if (!snap) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + snap.error().describe());
        }
        if (!out.empty() && snap.value().timestamp <= out.back().timestamp) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": timestamps not increasing");
        }
        out.push_back(std::move(snap).value());
        pos = nl + 1;
    }
    if (valid_bytes) *valid_bytes = pos;
    return out;
}

}  // namespace

TelemetryLog::TelemetryLog(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(*path_)) {
        std::uintmax_t valid = 0;
        records_ = load(*path_, &valid);
        if (valid != std::filesystem::file_size(*path_)) std::filesystem::resize_file(*path_, valid);
    }
    out_.open(*path_, std::ios::binary | std::ios::app);
    if (!out_) throw Error("cannot open telemetry log for append: " + path_->string());
}

std::vector<SensorSnapshot> TelemetryLog::read_file(const std::filesystem::path& path) {
    return load(path, nullptr);
}

void TelemetryLog::append(const SensorSnapshot& snap) {
    std::unique_lock lock(mu_);
    if (!records_.empty() && snap.timestamp <= records_.back().timestamp) {
        throw Error("non-monotone timestamp " + std::to_string(snap.timestamp) + " after " +
                    std::to_string(records_.back().timestamp));
    }
    if (out_.is_open()) {
        const std::string line = wire::encode_telemetry(snap);
        out_.write(line.data(), static_cast<std::streamsize>(line.size()));
        out_.flush();
        if (!out_) throw Error("write failed on telemetry log " + path_->string());
    }
    records_.push_back(snap);
}

std::size_t TelemetryLog::size() const {
    std::shared_lock lock(mu_);
    return records_.size();
}

std::optional<SensorSnapshot> TelemetryLog::latest() const {
    std::shared_lock lock(mu_);
    if (records_.empty()) return std::nullopt;
    return records_.back();
}

std::vector<SensorSnapshot> TelemetryLog::records() const {
    std::shared_lock lock(mu_);
    return records_;
}

std::vector<SensorSnapshot> TelemetryLog::range(std::int64_t from, std::int64_t to) const {
    std::shared_lock lock(mu_);
    auto by_ts = [](const SensorSnapshot& s, std::int64_t t) { return s.timestamp < t; };
    auto lo = std::lower_bound(records_.begin(), records_.end(), from, by_ts);
    auto hi = std::lower_bound(lo, records_.end(), to, by_ts);
    if (hi != records_.end() && hi->timestamp == to) ++hi;
    return {lo, hi};
}

void TelemetryLog::flush() {
    std::unique_lock lock(mu_);
    if (out_.is_open()) out_.flush();
}

void export_csv(const std::vector<SensorSnapshot>& records, const std::filesystem::path& out) {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + out.string());
    f << "ts,temp,hum,rain,flow,soil0,soil1,soil2,soil3,soil4,soil5,relay0,relay1,relay2,mode\n";
    for (const auto& s : records) {
        f << s.timestamp << ',' << s.temperature_c << ',' << s.humidity_pct << ','
          << (s.rain_wet ? 1 : 0) << ',' << wire::format_flow(s.flow_lpm);
        for (int v : s.soil_adc) f << ',' << v;
        for (auto r : s.relay) f << ',' << (r == RelayState::ON ? 1 : 0);
        f << ',' << mode_code(s.mode) << '\n';
    }
    if (!f) throw Error("write failed on " + out.string());
}

}  // namespace drip::store
