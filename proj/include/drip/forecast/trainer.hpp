#pragma once

#include <cstdint>
#include <vector>

#include "drip/forecast/model.hpp"

namespace drip::forecast {

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double clip_norm = 5.0;  // global gradient-norm cap; <= 0 disables
    std::uint64_t seed = 42;

    void validate() const;
};

/// Adaptive-moment optimizer with bias correction.
class Adam {
public:
    Adam(Eigen::Index size, const TrainConfig& cfg);
    void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad);
    [[nodiscard]] std::uint64_t steps() const noexcept { return t_; }

private:
    double lr_, beta1_, beta2_, eps_;
    Eigen::VectorXd m_, v_;
    std::uint64_t t_ = 0;
};

/// Rescales grad in place so its norm is at most max_norm. Returns the norm before clipping.
double clip_gradient(Eigen::VectorXd& grad, double max_norm);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;  // mean minibatch loss, dropout active
    double val_loss = 0.0;    // NaN when there is no validation data
};

struct TrainResult {
    ForecastModel model;
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
};

/// Inference-mode MSE over every window of the set.
double dataset_loss(const ForecastModel& m, const SequenceSet& set);

/// Minibatch training; returns the parameters from the epoch with the lowest
/// validation loss (the last epoch when `val` is empty). Throws drip::Error on
/// a non-finite loss.
TrainResult train(ForecastModel model, const SequenceSet& train_set, const SequenceSet& val_set,
                  const TrainConfig& cfg);

struct EvalReport {
    double mae_scaled = 0.0;
    double mae_counts = 0.0;
    std::size_t windows = 0;
};

/// MAE over all test windows in scaled space, and in ADC counts after the
/// inverse transform. Throws drip::Error on an empty test set.
EvalReport evaluate(const ForecastModel& m, const SequenceSet& test_set);

/// Chronological split of one pot's dataset, scaler fitted on the training rows,
/// and the windows of each segment.
struct PreparedData {
    store::Split split;
    MinMaxScaler scaler;
    SequenceSet train;
    SequenceSet val;
    SequenceSet test;
};

PreparedData prepare(const store::Dataset& ds, const WindowSpec& window, std::size_t train_stride = 1,
                     const store::SplitRatios& ratios = {});

}  // namespace drip::forecast
