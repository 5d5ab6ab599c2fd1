#include "drip/store/dataset.hpp"

#include <cmath>

namespace drip::store {

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
    Dataset out;
    out.pot = pot;
    out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                          timestamps.begin() + static_cast<std::ptrdiff_t>(end));
    out.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                    rows.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

FeatureRow feature_row(const SensorSnapshot& snap, PotId pot) {
    const auto [a, b] = pot.soil_channels();
    return {static_cast<double>(snap.temperature_c), static_cast<double>(snap.humidity_pct),
            snap.rain_wet ? 1.0 : 0.0, snap.flow_lpm,
            (static_cast<double>(snap.soil_adc[a]) + static_cast<double>(snap.soil_adc[b])) / 2.0};
}

Dataset to_dataset(const std::vector<SensorSnapshot>& records, PotId pot) {
    if (records.empty()) throw Error("cannot build a dataset from an empty log");
    Dataset ds;
    ds.pot = pot;
    ds.timestamps.reserve(records.size());
    ds.rows.reserve(records.size());
    for (const auto& r : records) {
        ds.timestamps.push_back(r.timestamp);
        ds.rows.push_back(feature_row(r, pot));
    }
    return ds;
}

SplitSizes split_sizes(std::size_t n, const SplitRatios& ratios) {
    if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
        std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
        throw Error("split ratios must be non-negative and sum to 1");
    }
    // the guard absorbs representation error such as 0.7 * 10 = 6.999...
    auto portion = [n](double r) {
        return static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9));
    };
    SplitSizes s;
    s.train = portion(ratios.train);
    s.val = std::min(portion(ratios.val), n - s.train);
    s.test = n - s.train - s.val;
    return s;
}

Split split(const Dataset& ds, const SplitRatios& ratios) {
    const SplitSizes s = split_sizes(ds.size(), ratios);
    return {ds.slice(0, s.train), ds.slice(s.train, s.train + s.val), ds.slice(s.train + s.val, ds.size())};
}

}  // namespace drip::store
