#pragma once

#include <span>

namespace drip::forecast {

/// Mean squared error. Throws drip::Error on empty or unequal inputs.
double mse(std::span<const double> y, std::span<const double> y_hat);

/// Mean absolute error. Throws drip::Error on empty or unequal inputs.
double mae(std::span<const double> y, std::span<const double> y_hat);

}  // namespace drip::forecast
