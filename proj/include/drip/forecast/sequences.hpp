#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "drip/store/dataset.hpp"

namespace drip::forecast {

struct WindowSpec {
    std::size_t lookback = 60;
    std::size_t horizon = 30;
    std::size_t features = store::kFeatureCount;

    void validate() const;
    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// max(0, n - lookback - horizon + 1)
std::size_t window_count(std::size_t n, const WindowSpec& spec);

/// Inputs for a minibatch: one (features x B) matrix per time step, targets (horizon x B).
struct Batch {
    std::vector<Eigen::MatrixXd> steps;
    Eigen::MatrixXd targets;

    [[nodiscard]] Eigen::Index size() const { return targets.cols(); }
};

/// Sliding windows over a scaled series. Sample s has inputs rows[s, s+L) and
/// targets the target column over rows[s+L, s+L+F). Windows are views into the
/// series, so memory stays linear in the series length.
class SequenceSet {
public:
    SequenceSet() = default;
    SequenceSet(std::span<const store::FeatureRow> scaled_rows, const WindowSpec& spec,
                std::size_t stride = 1, std::size_t target_feature = store::kZoneMoisture);

    [[nodiscard]] std::size_t size() const noexcept { return starts_.size(); }
    [[nodiscard]] bool empty() const noexcept { return starts_.empty(); }
    [[nodiscard]] const WindowSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::size_t start(std::size_t i) const { return starts_.at(i); }

    /// features x lookback, one column per time step.
    [[nodiscard]] Eigen::MatrixXd input(std::size_t i) const;
    [[nodiscard]] Eigen::VectorXd target(std::size_t i) const;

    [[nodiscard]] Batch batch(std::span<const std::size_t> indices) const;

private:
    WindowSpec spec_;
    std::size_t target_feature_ = store::kZoneMoisture;
    Eigen::MatrixXd data_;  // features x N
    std::vector<std::size_t> starts_;
};

/// All windows of `scaled_rows` (stride 1).
SequenceSet make_sequences(std::span<const store::FeatureRow> scaled_rows, const WindowSpec& spec);

}  // namespace drip::forecast
