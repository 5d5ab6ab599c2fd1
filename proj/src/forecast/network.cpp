#include "drip/forecast/network.hpp"

#include <cmath>
#include <string>

namespace drip::forecast {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

Index idx(std::size_t v) { return static_cast<Index>(v); }

// Takes the block by value: Eigen blocks are views, so this writes through.
template <typename Block>
void sigmoid_inplace(Block m) {
    m.array() = (1.0 + (-m.array()).exp()).inverse();
}

}  // namespace

std::size_t NetworkShape::parameter_count() const { return Params::layout(*this).end; }

void NetworkShape::validate() const {
    if (features == 0 || hidden == 0 || dense == 0 || horizon == 0) {
        throw Error("network dimensions must be positive");
    }
}

CellOutput lstm_cell(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev, const Eigen::VectorXd& c_prev,
                     const LstmWeights& w) {
    const Index h = h_prev.size();
    if (w.U.rows() != 4 * h || w.U.cols() != h || w.W.rows() != 4 * h || w.W.cols() != x.size() ||
        w.b.size() != 4 * h || c_prev.size() != h) {
        throw Error("lstm_cell: inconsistent shapes");
    }
    Eigen::VectorXd z = w.W * x + w.U * h_prev + w.b;
    sigmoid_inplace(z.head(3 * h));
    z.tail(h) = z.tail(h).array().tanh();

    CellOutput out;
    out.c = z.segment(idx(0), h).cwiseProduct(z.tail(h)) + z.segment(h, h).cwiseProduct(c_prev);
    out.h = z.segment(2 * h, h).cwiseProduct(out.c.array().tanh().matrix());
    return out;
}

Params::Layout Params::layout(const NetworkShape& s) {
    Layout l{};
    std::size_t at = 0;
    auto take = [&at](std::size_t n) {
        const std::size_t here = at;
        at += n;
        return here;
    };
    l.W = take(4 * s.hidden * s.features);
    l.U = take(4 * s.hidden * s.hidden);
    l.b = take(4 * s.hidden);
    l.W1 = take(s.dense * s.hidden);
    l.b1 = take(s.dense);
    l.W2 = take(s.horizon * s.dense);
    l.b2 = take(s.horizon);
    l.end = at;
    return l;
}

Params::Params(const NetworkShape& shape) : shape_(shape) {
    shape_.validate();
    theta_ = Eigen::VectorXd::Zero(idx(layout(shape_).end));
}

#define DRIP_PARAM_VIEW(name, rows, cols)                                                        \
    Params::Map Params::name() {                                                                 \
        return {theta_.data() + layout(shape_).name, idx(rows), idx(cols)};                      \
    }                                                                                            \
    Params::ConstMap Params::name() const {                                                      \
        return {theta_.data() + layout(shape_).name, idx(rows), idx(cols)};                      \
    }
#define DRIP_PARAM_VEC(name, rows)                                                               \
    Params::VecMap Params::name() { return {theta_.data() + layout(shape_).name, idx(rows)}; }  \
    Params::ConstVecMap Params::name() const {                                                   \
        return {theta_.data() + layout(shape_).name, idx(rows)};                                 \
    }

DRIP_PARAM_VIEW(W, 4 * shape_.hidden, shape_.features)
DRIP_PARAM_VIEW(U, 4 * shape_.hidden, shape_.hidden)
DRIP_PARAM_VEC(b, 4 * shape_.hidden)
DRIP_PARAM_VIEW(W1, shape_.dense, shape_.hidden)
DRIP_PARAM_VEC(b1, shape_.dense)
DRIP_PARAM_VIEW(W2, shape_.horizon, shape_.dense)
DRIP_PARAM_VEC(b2, shape_.horizon)

#undef DRIP_PARAM_VIEW
#undef DRIP_PARAM_VEC

Params init_params(const NetworkShape& shape, std::uint64_t seed) {
    Params p(shape);
    std::mt19937_64 rng(seed);
    auto fill = [&rng](auto&& m, std::size_t fan_in) {
        const double r = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> u(-r, r);
        for (Index j = 0; j < m.cols(); ++j) {
            for (Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
        }
    };
    fill(p.W(), shape.features);
    fill(p.U(), shape.hidden);
    fill(p.W1(), shape.hidden);
    fill(p.W2(), shape.dense);
    const Index h = idx(shape.hidden);
    p.b().segment(static_cast<Index>(Gate::forget) * h, h).setOnes();
    return p;
}

MatrixXd dropout_mask(std::size_t hidden, Index batch, double rate, std::mt19937_64& rng) {
    if (rate < 0.0 || rate >= 1.0) throw Error("dropout rate must lie in [0, 1)");
    const double keep = 1.0 - rate;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MatrixXd m(idx(hidden), batch);
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng) < keep ? 1.0 / keep : 0.0;
    }
    return m;
}

Tape forward_batch(const Params& p, std::span<const MatrixXd> steps, const MatrixXd* mask) {
    const auto& s = p.shape();
    if (steps.empty()) throw Error("forward pass needs at least one time step");
    const Index h = idx(s.hidden);
    const Index batch = steps.front().cols();

    Tape tape;
    tape.gates.reserve(steps.size());
    tape.cells.reserve(steps.size() + 1);
    tape.hiddens.reserve(steps.size() + 1);
    tape.cells.push_back(MatrixXd::Zero(h, batch));
    tape.hiddens.push_back(MatrixXd::Zero(h, batch));

    const auto W = p.W();
    const auto U = p.U();
    const auto b = p.b();
    for (const auto& x : steps) {
        if (x.rows() != idx(s.features) || x.cols() != batch) throw Error("forward pass: input shape mismatch");
        MatrixXd z = W * x + U * tape.hiddens.back();
        z.colwise() += b;
        sigmoid_inplace(z.topRows(3 * h));
        z.bottomRows(h) = z.bottomRows(h).array().tanh();

        MatrixXd c = z.topRows(h).cwiseProduct(z.bottomRows(h)) + z.middleRows(h, h).cwiseProduct(tape.cells.back());
        MatrixXd hn = z.middleRows(2 * h, h).cwiseProduct(c.array().tanh().matrix());
        tape.gates.push_back(std::move(z));
        tape.cells.push_back(std::move(c));
        tape.hiddens.push_back(std::move(hn));
    }

    if (mask) {
        if (mask->rows() != h || mask->cols() != batch) throw Error("dropout mask shape mismatch");
        tape.mask = *mask;
        tape.dropped = tape.hiddens.back().cwiseProduct(*mask);
    } else {
        tape.dropped = tape.hiddens.back();
    }
    tape.pre_dense = p.W1() * tape.dropped;
    tape.pre_dense.colwise() += p.b1();
    tape.dense = tape.pre_dense.cwiseMax(0.0);
    tape.output = p.W2() * tape.dense;
    tape.output.colwise() += p.b2();
    return tape;
}

double batch_loss(const MatrixXd& output, const MatrixXd& targets) {
    if (output.rows() != targets.rows() || output.cols() != targets.cols() || output.size() == 0) {
        throw Error("loss: output/target shape mismatch");
    }
    return (output - targets).squaredNorm() / static_cast<double>(output.size());
}

double batch_loss(const Params& p, const Batch& batch, const MatrixXd* mask) {
    return batch_loss(forward_batch(p, batch.steps, mask).output, batch.targets);
}

Eigen::VectorXd backward(const Params& p, const Batch& batch, const Tape& tape) {
    const auto& s = p.shape();
    const Index h = idx(s.hidden);
    const auto steps = tape.gates.size();
    if (steps != batch.steps.size() || tape.output.cols() != batch.targets.cols()) {
        throw Error("backward: tape does not match batch");
    }

    Params grad(s);
    const MatrixXd d_out = 2.0 * (tape.output - batch.targets) / static_cast<double>(tape.output.size());

    grad.W2() = d_out * tape.dense.transpose();
    grad.b2() = d_out.rowwise().sum();
    const MatrixXd d_pre =
        (p.W2().transpose() * d_out).cwiseProduct((tape.pre_dense.array() > 0.0).cast<double>().matrix());
    grad.W1() = d_pre * tape.dropped.transpose();
    grad.b1() = d_pre.rowwise().sum();
    MatrixXd d_h = p.W1().transpose() * d_pre;
    if (tape.mask.size() != 0) d_h = d_h.cwiseProduct(tape.mask);

    MatrixXd d_c = MatrixXd::Zero(h, d_h.cols());
    MatrixXd d_z(4 * h, d_h.cols());
    auto dW = grad.W();
    auto dU = grad.U();
    auto db = grad.b();
    const auto U = p.U();

    for (std::size_t t = steps; t-- > 0;) {
        const MatrixXd& z = tape.gates[t];
        const auto i = z.topRows(h).array();
        const auto f = z.middleRows(h, h).array();
        const auto o = z.middleRows(2 * h, h).array();
        const auto g = z.bottomRows(h).array();
        const Eigen::ArrayXXd tc = tape.cells[t + 1].array().tanh();

        d_c.array() += d_h.array() * o * (1.0 - tc.square());
        d_z.topRows(h).array() = d_c.array() * g * i * (1.0 - i);
        d_z.middleRows(h, h).array() = d_c.array() * tape.cells[t].array() * f * (1.0 - f);
        d_z.middleRows(2 * h, h).array() = d_h.array() * tc * o * (1.0 - o);
        d_z.bottomRows(h).array() = d_c.array() * i * (1.0 - g.square());

        dW.noalias() += d_z * batch.steps[t].transpose();
        dU.noalias() += d_z * tape.hiddens[t].transpose();
        db += d_z.rowwise().sum();

        d_h.noalias() = U.transpose() * d_z;
        d_c.array() *= f;
    }
    return std::move(grad.theta());
}

Eigen::VectorXd forward(const MatrixXd& X, const Params& p, bool training, double dropout_rate,
                        std::mt19937_64& rng) {
    std::vector<MatrixXd> steps;
    steps.reserve(static_cast<std::size_t>(X.cols()));
    for (Index t = 0; t < X.cols(); ++t) steps.emplace_back(X.col(t));
    if (training) {
        const MatrixXd mask = dropout_mask(p.shape().hidden, 1, dropout_rate, rng);
        return forward_batch(p, steps, &mask).output.col(0);
    }
    return forward_batch(p, steps).output.col(0);
}

}  // namespace drip::forecast
