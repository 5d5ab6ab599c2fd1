#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "drip/forecast/sequences.hpp"

namespace drip::forecast {

/// Gate blocks are stacked in this order inside the LSTM weight matrices.
enum class Gate : Eigen::Index { input = 0, forget = 1, output = 2, candidate = 3 };

struct NetworkShape {
    std::size_t features = store::kFeatureCount;
    std::size_t hidden = 64;
    std::size_t dense = 32;
    std::size_t horizon = 30;

    [[nodiscard]] std::size_t parameter_count() const;
    void validate() const;
    friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Borrowed view of LSTM weights: W (4H x features), U (4H x H), b (4H).
struct LstmWeights {
    Eigen::Ref<const Eigen::MatrixXd> W;
    Eigen::Ref<const Eigen::MatrixXd> U;
    Eigen::Ref<const Eigen::VectorXd> b;
};

struct CellOutput {
    Eigen::VectorXd h;
    Eigen::VectorXd c;
};

/// One LSTM step:
///   i = sig(W_i x + U_i h + b_i), f = sig(...), o = sig(...), g = tanh(...)
///   c' = f*c + i*g,  h' = o*tanh(c')
/// Throws drip::Error on inconsistent shapes.
CellOutput lstm_cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev, const Eigen::VectorXd& c_prev,
                     const LstmWeights& w);

/// All trainable parameters in one contiguous vector so optimizers, gradient
/// checks and checkpoints can treat them uniformly. Views are column-major maps.
class Params {
public:
    using Map = Eigen::Map<Eigen::MatrixXd>;
    using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
    using VecMap = Eigen::Map<Eigen::VectorXd>;
    using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

    Params() = default;
    explicit Params(const NetworkShape& shape);

    [[nodiscard]] const NetworkShape& shape() const noexcept { return shape_; }
    [[nodiscard]] Eigen::VectorXd& theta() noexcept { return theta_; }
    [[nodiscard]] const Eigen::VectorXd& theta() const noexcept { return theta_; }

    Map W();
    Map U();
    VecMap b();
    Map W1();
    VecMap b1();
    Map W2();
    VecMap b2();
    [[nodiscard]] ConstMap W() const;
    [[nodiscard]] ConstMap U() const;
    [[nodiscard]] ConstVecMap b() const;
    [[nodiscard]] ConstMap W1() const;
    [[nodiscard]] ConstVecMap b1() const;
    [[nodiscard]] ConstMap W2() const;
    [[nodiscard]] ConstVecMap b2() const;

    [[nodiscard]] LstmWeights lstm() const { return {W(), U(), b()}; }

    /// Offsets of each block inside theta, in declaration order W,U,b,W1,b1,W2,b2.
    struct Layout {
        std::size_t W, U, b, W1, b1, W2, b2, end;
    };
    [[nodiscard]] static Layout layout(const NetworkShape& s);

private:
    NetworkShape shape_;
    Eigen::VectorXd theta_;
};

/// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases except the
/// forget gate bias which starts at 1.
Params init_params(const NetworkShape& shape, std::uint64_t seed);

/// Inverted-dropout keep mask (H x B): entries are 0 or 1/(1-rate).
Eigen::MatrixXd dropout_mask(std::size_t hidden, Eigen::Index batch, double rate, std::mt19937_64& rng);

/// Activations recorded during a forward pass, consumed by backward().
struct Tape {
    std::vector<Eigen::MatrixXd> gates;    // per step, 4H x B post-activation
    std::vector<Eigen::MatrixXd> cells;    // c_0 .. c_L
    std::vector<Eigen::MatrixXd> hiddens;  // h_0 .. h_L
    Eigen::MatrixXd mask;                  // empty when dropout is off
    Eigen::MatrixXd dropped;               // H x B
    Eigen::MatrixXd pre_dense;             // D x B
    Eigen::MatrixXd dense;                 // D x B after ReLU
    Eigen::MatrixXd output;                // horizon x B
};

/// Unrolls the LSTM from zero state over the batch steps, then applies the
/// optional dropout mask, the ReLU dense layer and the linear output layer.
Tape forward_batch(const Params& p, std::span<const Eigen::MatrixXd> steps, const Eigen::MatrixXd* mask = nullptr);

/// Mean squared error over every element of the batch.
double batch_loss(const Eigen::MatrixXd& output, const Eigen::MatrixXd& targets);

/// Loss of a forward pass with the given mask (nullptr: no dropout).
double batch_loss(const Params& p, const Batch& batch, const Eigen::MatrixXd* mask = nullptr);

/// Exact gradient of batch_loss with respect to theta, by backpropagation
/// through time over every step. Uses the mask recorded in the tape.
Eigen::VectorXd backward(const Params& p, const Batch& batch, const Tape& tape);

/// Single-window prediction in scaled space. X is features x lookback. With
/// training=true a fresh dropout mask is drawn from rng.
Eigen::VectorXd forward(const Eigen::MatrixXd& X, const Params& p, bool training, double dropout_rate,
                        std::mt19937_64& rng);

}  // namespace drip::forecast
