#pragma once

#include <span>
#include <vector>

#include "drip/store/dataset.hpp"

namespace drip::forecast {

/// Per-feature min-max scaler. A constant feature (max == min) maps to 0 and
/// inverts to its constant value.
class MinMaxScaler {
public:
    MinMaxScaler() = default;
    MinMaxScaler(std::vector<double> mins, std::vector<double> maxs);

    /// Fits on the given rows; throws drip::Error when `rows` is empty.
    static MinMaxScaler fit(std::span<const store::FeatureRow> rows);

    [[nodiscard]] bool fitted() const noexcept { return !mins_.empty(); }
    [[nodiscard]] std::size_t features() const noexcept { return mins_.size(); }

    [[nodiscard]] double transform(std::size_t feature, double x) const;
    [[nodiscard]] double inverse_transform(std::size_t feature, double x) const;

    [[nodiscard]] store::FeatureRow transform(const store::FeatureRow& row) const;
    [[nodiscard]] store::FeatureRow inverse_transform(const store::FeatureRow& row) const;
    [[nodiscard]] std::vector<store::FeatureRow> transform(std::span<const store::FeatureRow> rows) const;

    [[nodiscard]] const std::vector<double>& mins() const noexcept { return mins_; }
    [[nodiscard]] const std::vector<double>& maxs() const noexcept { return maxs_; }

    friend bool operator==(const MinMaxScaler&, const MinMaxScaler&) = default;

private:
    void require_fitted(std::size_t feature) const;

    std::vector<double> mins_;
    std::vector<double> maxs_;
};

}  // namespace drip::forecast
