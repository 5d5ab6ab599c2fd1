#include "drip/forecast/metrics.hpp"

#include <cmath>

#include "drip/core/types.hpp"

namespace drip::forecast {

namespace {
void check(std::span<const double> y, std::span<const double> y_hat) {
    if (y.empty() || y.size() != y_hat.size()) throw Error("metric inputs must be non-empty and equal length");
}
}  // namespace

double mse(std::span<const double> y, std::span<const double> y_hat) {
    check(y, y_hat);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
    return acc / static_cast<double>(y.size());
}

double mae(std::span<const double> y, std::span<const double> y_hat) {
    check(y, y_hat);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(y[i] - y_hat[i]);
    return acc / static_cast<double>(y.size());
}

}  // namespace drip::forecast
