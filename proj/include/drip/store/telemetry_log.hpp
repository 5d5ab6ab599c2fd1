#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "drip/core/types.hpp"

namespace drip::store {

/// Append-only, strictly time-ordered record of telemetry frames. When backed
/// by a file, every record is one canonical frame line (same codec as the
/// serial link) and is flushed before append() returns.
///
/// One writer, any number of concurrent readers.
class TelemetryLog {
public:
    /// In-memory log.
    TelemetryLog() = default;

    /// Opens (or creates) a file-backed log, loading existing records. A final
    /// line without its newline is treated as a torn write and truncated.
    explicit TelemetryLog(std::filesystem::path path);

    TelemetryLog(const TelemetryLog&) = delete;
    TelemetryLog& operator=(const TelemetryLog&) = delete;

    /// Loads a log file read-only. Throws drip::Error on a malformed line.
    static std::vector<SensorSnapshot> read_file(const std::filesystem::path& path);

    /// Throws drip::Error unless snap.timestamp exceeds the last timestamp.
    void append(const SensorSnapshot& snap);

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] bool empty() const { return size() == 0; }
    [[nodiscard]] std::optional<SensorSnapshot> latest() const;
    [[nodiscard]] std::vector<SensorSnapshot> records() const;

    /// Records with from <= ts <= to.
    [[nodiscard]] std::vector<SensorSnapshot> range(std::int64_t from, std::int64_t to) const;

    [[nodiscard]] const std::optional<std::filesystem::path>& path() const { return path_; }

    void flush();

private:
    mutable std::shared_mutex mu_;
    std::vector<SensorSnapshot> records_;
    std::optional<std::filesystem::path> path_;
    std::ofstream out_;
};

/// Writes `ts,temp,hum,rain,flow,soil0..soil5,relay0..relay2,mode` plus one row per record.
void export_csv(const std::vector<SensorSnapshot>& records, const std::filesystem::path& out);

}  // namespace drip::store
