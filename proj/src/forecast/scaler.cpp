#include "drip/forecast/scaler.hpp"

#include <algorithm>
#include <string>

namespace drip::forecast {

MinMaxScaler::MinMaxScaler(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
    if (mins_.size() != maxs_.size()) throw Error("scaler min/max size mismatch");
    for (std::size_t i = 0; i < mins_.size(); ++i) {
        if (!(maxs_[i] >= mins_[i])) throw Error("scaler max below min for feature " + std::to_string(i));
    }
}

MinMaxScaler MinMaxScaler::fit(std::span<const store::FeatureRow> rows) {
    if (rows.empty()) throw Error("cannot fit a scaler on zero rows");
    std::vector<double> mins(rows.front().begin(), rows.front().end());
    std::vector<double> maxs = mins;
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            mins[j] = std::min(mins[j], row[j]);
            maxs[j] = std::max(maxs[j], row[j]);
        }
    }
    return {std::move(mins), std::move(maxs)};
}

void MinMaxScaler::require_fitted(std::size_t feature) const {
    if (!fitted()) throw Error("scaler used before fit");
    if (feature >= mins_.size()) throw Error("scaler feature index out of range");
}

double MinMaxScaler::transform(std::size_t feature, double x) const {
    require_fitted(feature);
    const double span = maxs_[feature] - mins_[feature];
    if (span == 0.0) return 0.0;
    return (x - mins_[feature]) / span;
}

double MinMaxScaler::inverse_transform(std::size_t feature, double x) const {
    require_fitted(feature);
    return mins_[feature] + x * (maxs_[feature] - mins_[feature]);
}

store::FeatureRow MinMaxScaler::transform(const store::FeatureRow& row) const {
    store::FeatureRow out{};
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = transform(j, row[j]);
    return out;
}

store::FeatureRow MinMaxScaler::inverse_transform(const store::FeatureRow& row) const {
    store::FeatureRow out{};
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = inverse_transform(j, row[j]);
    return out;
}

std::vector<store::FeatureRow> MinMaxScaler::transform(std::span<const store::FeatureRow> rows) const {
    std::vector<store::FeatureRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(transform(r));
    return out;
}

}  // namespace drip::forecast
