#include "drip/forecast/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>


namespace drip::forecast {

namespace {
constexpr std::size_t kEvalChunk = 256;

std::vector<std::size_t> iota_indices(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> v(end - begin);
    std::iota(v.begin(), v.end(), begin);
    return v;
}
}  // namespace

void TrainConfig::validate() const {
    if (batch_size == 0) throw Error("batch size must be positive");
    if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) throw Error("decay terms must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
}

Adam::Adam(Eigen::Index size, const TrainConfig& cfg)
    : lr_(cfg.learning_rate), beta1_(cfg.beta1), beta2_(cfg.beta2), eps_(cfg.epsilon),
      m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    theta.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

double clip_gradient(Eigen::VectorXd& grad, double max_norm) {
    const double norm = grad.norm();
    if (max_norm > 0.0 && norm > max_norm) grad *= max_norm / norm;
    return norm;
}

double dataset_loss(const ForecastModel& m, const SequenceSet& set) {
    if (set.empty()) throw Error("loss over an empty window set");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < set.size(); b += kEvalChunk) {
        const auto idx = iota_indices(b, std::min(set.size(), b + kEvalChunk));
        const Batch batch = set.batch(idx);
        sum += batch_loss(m.params, batch) * static_cast<double>(batch.targets.size());
        count += static_cast<std::size_t>(batch.targets.size());
    }
    return sum / static_cast<double>(count);
}

TrainResult train(ForecastModel model, const SequenceSet& train_set, const SequenceSet& val_set,
                  const TrainConfig& cfg) {
    cfg.validate();
    model.validate();
    if (train_set.empty()) throw Error("training needs at least one window");
    if (train_set.spec() != model.window) throw Error("training windows do not match the model");

    TrainResult result;
    result.model = model;
    if (cfg.epochs == 0) return result;

    std::mt19937_64 rng(cfg.seed);
    Adam adam(model.params.theta().size(), cfg);
    std::vector<std::size_t> order = iota_indices(0, train_set.size());
    double best_val = std::numeric_limits<double>::infinity();

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
            const std::span<const std::size_t> idx(order.data() + b, std::min(cfg.batch_size, order.size() - b));
            const Batch batch = train_set.batch(idx);
            const Eigen::MatrixXd mask = dropout_mask(model.shape().hidden, batch.size(), model.dropout, rng);
            const Tape tape = forward_batch(model.params, batch.steps, &mask);
            const double loss = batch_loss(tape.output, batch.targets);
            if (!std::isfinite(loss)) {
                throw Error("non-finite training loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                            std::to_string(b));
            }
            Eigen::VectorXd grad = backward(model.params, batch, tape);
            clip_gradient(grad, cfg.clip_norm);
            adam.step(model.params.theta(), grad);
            loss_sum += loss * static_cast<double>(idx.size());
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(order.size());
        rec.val_loss = val_set.empty() ? std::numeric_limits<double>::quiet_NaN() : dataset_loss(model, val_set);
        if (!val_set.empty() && !std::isfinite(rec.val_loss)) {
            throw Error("non-finite validation loss at epoch " + std::to_string(epoch));
        }
        result.history.push_back(rec);

        if (val_set.empty() || rec.val_loss < best_val) {
            best_val = val_set.empty() ? best_val : rec.val_loss;
            result.model = model;
            result.best_epoch = epoch;
        }
    }
    return result;
}

EvalReport evaluate(const ForecastModel& m, const SequenceSet& test_set) {
    if (test_set.empty()) throw Error("evaluation needs at least one test window");
    double abs_scaled = 0.0;
    double abs_counts = 0.0;
    std::size_t n = 0;
    for (std::size_t b = 0; b < test_set.size(); b += kEvalChunk) {
        const auto idx = iota_indices(b, std::min(test_set.size(), b + kEvalChunk));
        const Batch batch = test_set.batch(idx);
        const Eigen::MatrixXd y_hat = forward_batch(m.params, batch.steps).output;
        for (Eigen::Index j = 0; j < y_hat.cols(); ++j) {
            for (Eigen::Index i = 0; i < y_hat.rows(); ++i) {
                const double y = batch.targets(i, j);
                abs_scaled += std::abs(y_hat(i, j) - y);
                abs_counts += std::abs(m.scaler.inverse_transform(store::kZoneMoisture, y_hat(i, j)) -
                                       m.scaler.inverse_transform(store::kZoneMoisture, y));
                ++n;
            }
        }
    }
    // every window has the same horizon, so the pooled mean equals the mean of per-window MAEs
    return {abs_scaled / static_cast<double>(n), abs_counts / static_cast<double>(n), test_set.size()};
}

PreparedData prepare(const store::Dataset& ds, const WindowSpec& window, std::size_t train_stride,
                     const store::SplitRatios& ratios) {
    PreparedData out;
    out.split = store::split(ds, ratios);
    if (out.split.train.empty()) throw Error("training split is empty");
    out.scaler = MinMaxScaler::fit(out.split.train.rows);
    const auto train_rows = out.scaler.transform(out.split.train.rows);
    const auto val_rows = out.scaler.transform(out.split.val.rows);
    const auto test_rows = out.scaler.transform(out.split.test.rows);
    out.train = SequenceSet(train_rows, window, train_stride);
    out.val = SequenceSet(val_rows, window);
    out.test = SequenceSet(test_rows, window);
    return out;
}

}  // namespace drip::forecast
