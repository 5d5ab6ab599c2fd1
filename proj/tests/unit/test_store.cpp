#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "drip/store/dataset.hpp"
#include "drip/store/telemetry_log.hpp"
#include "drip/wire/protocol.hpp"

using namespace drip;
using namespace drip::store;
namespace fs = std::filesystem;

namespace {

SensorSnapshot frame(std::int64_t ts, SoilArray soil = {3000, 2980, 2100, 2120, 2600, 2590}) {
    SensorSnapshot s;
    s.timestamp = ts;
    s.temperature_c = 24;
    s.humidity_pct = 55;
    s.flow_lpm = 2.0;
    s.soil_adc = soil;
    s.relay = {RelayState::ON, RelayState::OFF, RelayState::OFF};
    return s;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("drip_store_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// Integer oracle for floor(r*N) with r given in hundredths.
std::size_t floor_percent(std::size_t n, std::size_t pct) { return n * pct / 100; }

}  // namespace

TEST_CASE("append enforces strictly increasing timestamps") {
    TelemetryLog log;
    CHECK_NOTHROW(log.append(frame(3)));
    CHECK_NOTHROW(log.append(frame(5)));
    CHECK(log.size() == 2);
    CHECK_THROWS_AS(log.append(frame(5)), Error);
    CHECK_THROWS_AS(log.append(frame(4)), Error);
    CHECK(log.size() == 2);
    CHECK(log.latest()->timestamp == 5);
}

TEST_CASE("range queries are inclusive") {
    TelemetryLog log;
    for (int t = 1; t <= 10; ++t) log.append(frame(t * 2));
    auto r = log.range(4, 10);
    REQUIRE(r.size() == 4);
    CHECK(r.front().timestamp == 4);
    CHECK(r.back().timestamp == 10);
    CHECK(log.range(30, 40).empty());
    CHECK(log.range(10, 4).empty());
}

TEST_CASE("dataset rows follow the feature layout") {
    std::vector<SensorSnapshot> recs{frame(1), frame(2), frame(3)};
    recs[1].rain_wet = true;
    auto ds0 = to_dataset(recs, PotId(0));
    REQUIRE(ds0.size() == 3);
    CHECK(ds0.rows[0][kZoneMoisture] == (3000.0 + 2980.0) / 2.0);
    CHECK(ds0.rows[0][kZoneMoisture] == 2990.0);
    CHECK(ds0.rows[0][kTemperature] == 24.0);
    CHECK(ds0.rows[0][kHumidity] == 55.0);
    CHECK(ds0.rows[1][kRain] == 1.0);
    CHECK(ds0.rows[0][kFlow] == 2.0);
    CHECK(ds0.timestamps == std::vector<std::int64_t>{1, 2, 3});

    auto ds2 = to_dataset(recs, PotId(2));
    CHECK(ds2.rows[0][kZoneMoisture] == (2600.0 + 2590.0) / 2.0);
    CHECK_THROWS_AS(to_dataset({}, PotId(0)), Error);
}

TEST_CASE("split sizes for the reference lengths") {
    CHECK(split_sizes(100) == SplitSizes{70, 15, 15});
    CHECK(split_sizes(10) == SplitSizes{7, 1, 2});
    CHECK(split_sizes(3) == SplitSizes{2, 0, 1});
}

TEST_CASE("property: split partitions every length contiguously") {
    for (std::size_t n = 1; n <= 1000; ++n) {
        const SplitSizes s = split_sizes(n);
        REQUIRE(s.train == floor_percent(n, 70));
        REQUIRE(s.val == floor_percent(n, 15));
        REQUIRE(s.train + s.val + s.test == n);
    }
    std::vector<SensorSnapshot> recs;
    for (int t = 0; t < 57; ++t) recs.push_back(frame(t));
    const auto parts = split(to_dataset(recs, PotId(1)));
    CHECK(parts.train.size() + parts.val.size() + parts.test.size() == 57);
    CHECK(parts.train.timestamps.back() + 1 == parts.val.timestamps.front());
    CHECK(parts.val.timestamps.back() + 1 == parts.test.timestamps.front());
}

TEST_CASE("file-backed log round-trips and truncates a torn tail") {
    TempDir dir;
    const auto path = dir.path / "telemetry.jsonl";
    std::vector<SensorSnapshot> written;
    {
        TelemetryLog log(path);
        for (int t = 1; t <= 50; ++t) {
            auto f = frame(t);
            f.flow_lpm = t * 0.1;
            f.rain_wet = t % 7 == 0;
            log.append(f);
            written.push_back(f);
        }
    }
    CHECK(TelemetryLog::read_file(path) == written);

    {
        std::ofstream out(path, std::ios::app);
        out << R"({"ts":51,"temp":2)";
    }
    TelemetryLog reopened(path);
    CHECK(reopened.records() == written);
    reopened.append(frame(60));
    auto again = TelemetryLog::read_file(path);
    REQUIRE(again.size() == 51);
    CHECK(again.back().timestamp == 60);
}

TEST_CASE("log file with a malformed interior line is rejected") {
    TempDir dir;
    const auto path = dir.path / "bad.jsonl";
    {
        std::ofstream out(path);
        out << wire::encode_telemetry(frame(1)) << "not a frame\n" << wire::encode_telemetry(frame(2));
    }
    CHECK_THROWS_AS(TelemetryLog::read_file(path), Error);
}

TEST_CASE("CSV export writes the documented header") {
    TempDir dir;
    const auto path = dir.path / "telemetry.csv";
    export_csv({frame(1), frame(2)}, path);
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "ts,temp,hum,rain,flow,soil0,soil1,soil2,soil3,soil4,soil5,relay0,relay1,relay2,mode");
    CHECK(row == "1,24,55,0,2.0,3000,2980,2100,2120,2600,2590,1,0,0,2");
}
