#include "drip/forecast/sequences.hpp"

namespace drip::forecast {

void WindowSpec::validate() const {
    if (lookback < 1 || horizon < 1) throw Error("lookback and horizon must be at least 1");
    if (features < 1) throw Error("window needs at least one feature");
}

std::size_t window_count(std::size_t n, const WindowSpec& spec) {
    const std::size_t span = spec.lookback + spec.horizon;
    return n >= span ? n - span + 1 : 0;
}

SequenceSet::SequenceSet(std::span<const store::FeatureRow> scaled_rows, const WindowSpec& spec,
                         std::size_t stride, std::size_t target_feature)
    : spec_(spec), target_feature_(target_feature) {
    spec_.validate();
    if (stride < 1) throw Error("window stride must be at least 1");
    if (spec_.features != store::kFeatureCount || target_feature_ >= spec_.features) {
        throw Error("window spec does not match the dataset layout");
    }
    const auto n = static_cast<Eigen::Index>(scaled_rows.size());
    data_.resize(static_cast<Eigen::Index>(spec_.features), n);
    for (Eigen::Index t = 0; t < n; ++t) {
        for (std::size_t j = 0; j < spec_.features; ++j) {
            data_(static_cast<Eigen::Index>(j), t) = scaled_rows[static_cast<std::size_t>(t)][j];
        }
    }
    const std::size_t count = window_count(scaled_rows.size(), spec_);
    for (std::size_t s = 0; s < count; s += stride) starts_.push_back(s);
}

Eigen::MatrixXd SequenceSet::input(std::size_t i) const {
    return data_.middleCols(static_cast<Eigen::Index>(start(i)), static_cast<Eigen::Index>(spec_.lookback));
}

Eigen::VectorXd SequenceSet::target(std::size_t i) const {
    const auto from = static_cast<Eigen::Index>(start(i) + spec_.lookback);
    return data_.row(static_cast<Eigen::Index>(target_feature_))
        .segment(from, static_cast<Eigen::Index>(spec_.horizon))
        .transpose();
}

Batch SequenceSet::batch(std::span<const std::size_t> indices) const {
    const auto b = static_cast<Eigen::Index>(indices.size());
    const auto f = static_cast<Eigen::Index>(spec_.features);
    Batch out;
    out.steps.assign(spec_.lookback, Eigen::MatrixXd(f, b));
    out.targets.resize(static_cast<Eigen::Index>(spec_.horizon), b);
    for (Eigen::Index k = 0; k < b; ++k) {
        const std::size_t s = start(indices[static_cast<std::size_t>(k)]);
        for (std::size_t t = 0; t < spec_.lookback; ++t) {
            out.steps[t].col(k) = data_.col(static_cast<Eigen::Index>(s + t));
        }
        out.targets.col(k) = target(indices[static_cast<std::size_t>(k)]);
    }
    return out;
}

SequenceSet make_sequences(std::span<const store::FeatureRow> scaled_rows, const WindowSpec& spec) {
    return SequenceSet(scaled_rows, spec);
}

}  // namespace drip::forecast
