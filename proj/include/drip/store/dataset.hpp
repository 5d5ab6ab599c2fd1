#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "drip/core/types.hpp"

namespace drip::store {

inline constexpr std::size_t kFeatureCount = 5;

/// Column order of a dataset row.
enum Feature : std::size_t { kTemperature = 0, kHumidity, kRain, kFlow, kZoneMoisture };

using FeatureRow = std::array<double, kFeatureCount>;

/// One row per telemetry frame for one pot; the target is the zone moisture column.
struct Dataset {
    PotId pot{0};
    std::vector<std::int64_t> timestamps;
    std::vector<FeatureRow> rows;

    [[nodiscard]] std::size_t size() const { return rows.size(); }
    [[nodiscard]] bool empty() const { return rows.empty(); }
    /// Rows [begin, end) as a new dataset.
    [[nodiscard]] Dataset slice(std::size_t begin, std::size_t end) const;
};

FeatureRow feature_row(const SensorSnapshot& snap, PotId pot);

/// Throws drip::Error on an empty record list.
Dataset to_dataset(const std::vector<SensorSnapshot>& records, PotId pot);

struct SplitRatios {
    double train = 0.70;
    double val = 0.15;
    double test = 0.15;
};

struct SplitSizes {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
    friend bool operator==(const SplitSizes&, const SplitSizes&) = default;
};

/// Chronological sizes: floor(train*N), floor(val*N), remainder.
SplitSizes split_sizes(std::size_t n, const SplitRatios& ratios = {});

struct Split {
    Dataset train;
    Dataset val;
    Dataset test;
};

/// Contiguous, unshuffled partition in time order.
Split split(const Dataset& ds, const SplitRatios& ratios = {});

}  // namespace drip::store
