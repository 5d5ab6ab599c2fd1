#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "drip/forecast/metrics.hpp"
#include "drip/forecast/model.hpp"
#include "drip/forecast/trainer.hpp"
#include "gradcheck.hpp"

using namespace drip;
using namespace drip::forecast;
using store::FeatureRow;
namespace fs = std::filesystem;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<FeatureRow> sine_rows(std::size_t n, double period = 40.0) {
    std::vector<FeatureRow> rows(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double phase = 2.0 * M_PI * static_cast<double>(t) / period;
        rows[t] = {0.5 + 0.5 * std::sin(phase), 0.5 + 0.5 * std::cos(phase), 0.0, 0.0, 0.5 + 0.4 * std::sin(phase)};
    }
    return rows;
}

ModelOptions tiny_options(std::size_t lookback, std::size_t horizon, std::size_t hidden = 8) {
    ModelOptions o;
    o.window = {lookback, horizon, store::kFeatureCount};
    o.hidden = hidden;
    o.dense = 8;
    o.dropout = 0.2;
    return o;
}

ForecastModel tiny_model(const std::vector<FeatureRow>& rows, const ModelOptions& o, std::uint64_t seed) {
    ForecastModel m = make_model(PotId(0), o, seed);
    m.scaler = MinMaxScaler::fit(rows);
    return m;
}

}  // namespace

TEST_CASE("scaler maps min to 0 and inverts exactly") {
    std::vector<FeatureRow> rows{{2, 5, 0, 0, 0}, {4, 5, 1, 0, 0}, {6, 5, 0, 0, 0}};
    const auto sc = MinMaxScaler::fit(rows);
    CHECK(sc.transform(0, 2.0) == 0.0);
    CHECK(sc.transform(0, 4.0) == doctest::Approx((4.0 - 2.0) / (6.0 - 2.0)));
    CHECK(sc.inverse_transform(0, 0.5) == doctest::Approx(4.0));
    CHECK(sc.transform(1, 5.0) == 0.0);
    CHECK(sc.inverse_transform(1, 0.0) == 5.0);

    MinMaxScaler unfitted;
    CHECK_THROWS_AS((void)unfitted.transform(0, 1.0), Error);
    CHECK_THROWS_AS(MinMaxScaler::fit(std::vector<FeatureRow>{}), Error);
}

TEST_CASE("property: scaler round-trip for non-degenerate features") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1000.0, 5000.0);
    std::vector<FeatureRow> rows(50);
    for (auto& r : rows)
        for (auto& v : r) v = u(rng);
    const auto sc = MinMaxScaler::fit(rows);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t f = static_cast<std::size_t>(k) % store::kFeatureCount;
        const double x = u(rng);
        CHECK(std::abs(sc.inverse_transform(f, sc.transform(f, x)) - x) < 1e-9);
    }
}

TEST_CASE("window counts agree with brute-force enumeration") {
    CHECK(window_count(90, {60, 30, 5}) == 1);
    CHECK(window_count(89, {60, 30, 5}) == 0);
    CHECK(window_count(200, {60, 30, 5}) == 111);
    for (std::size_t n = 1; n <= 200; ++n) {
        for (std::size_t l = 1; l <= 10; ++l) {
            for (std::size_t f = 1; f <= 10; ++f) {
                std::size_t brute = 0;
                for (std::size_t s = 0; s < n; ++s) brute += (s + l + f <= n);
                REQUIRE(window_count(n, {l, f, 5}) == brute);
            }
        }
    }
}

TEST_CASE("sequence windows slice inputs and targets") {
    const auto rows = sine_rows(20);
    const SequenceSet set(rows, {4, 3, 5});
    REQUIRE(set.size() == 14);
    const auto x = set.input(2);
    CHECK(x.rows() == 5);
    CHECK(x.cols() == 4);
    CHECK(x(0, 0) == rows[2][0]);
    CHECK(x(4, 3) == rows[5][4]);
    const auto y = set.target(2);
    CHECK(y.size() == 3);
    CHECK(y[0] == rows[6][store::kZoneMoisture]);
    CHECK(y[2] == rows[8][store::kZoneMoisture]);

    const SequenceSet strided(rows, {4, 3, 5}, 5);
    CHECK(strided.size() == 3);
    CHECK(strided.start(2) == 10);
}

TEST_CASE("lstm cell reference cases") {
    SUBCASE("zero parameters and state") {
        const Eigen::MatrixXd W = Eigen::MatrixXd::Zero(8, 3), U = Eigen::MatrixXd::Zero(8, 2);
        const Eigen::VectorXd b = Eigen::VectorXd::Zero(8);
        const auto out = lstm_cell(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), {W, U, b});
        CHECK(out.h.isZero());
        CHECK(out.c.isZero());
    }
    SUBCASE("scalar cell with c_prev = 2") {
        const Eigen::MatrixXd W = Eigen::MatrixXd::Zero(4, 1), U = Eigen::MatrixXd::Zero(4, 1);
        const Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
        const auto out =
            lstm_cell(Eigen::VectorXd::Constant(1, 0.7), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 2.0), {W, U, b});
        const double i = sigmoid(0.0), f = sigmoid(0.0), o = sigmoid(0.0), g = std::tanh(0.0);
        const double c = f * 2.0 + i * g;
        CHECK(out.c[0] == doctest::Approx(c).epsilon(1e-15));
        CHECK(out.h[0] == doctest::Approx(o * std::tanh(c)).epsilon(1e-15));
        CHECK(out.h[0] == doctest::Approx(0.380797).epsilon(1e-6));
    }
    SUBCASE("saturated forget and closed input gates keep the cell") {
        const Eigen::MatrixXd W = Eigen::MatrixXd::Zero(4, 1), U = Eigen::MatrixXd::Zero(4, 1);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
        b[0] = -60.0;
        b[1] = 60.0;
        const auto out =
            lstm_cell(Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 1.3), {W, U, b});
        CHECK(out.c[0] == doctest::Approx(1.3).epsilon(1e-12));
    }
    SUBCASE("shape mismatch") {
        const Eigen::MatrixXd W = Eigen::MatrixXd::Zero(4, 2), U = Eigen::MatrixXd::Zero(4, 1);
        const Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
        CHECK_THROWS_AS(lstm_cell(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), {W, U, b}),
                        Error);
    }
}

TEST_CASE("batched forward matches the single-step cell") {
    std::mt19937_64 rng(8);
    const NetworkShape s{5, 6, 4, 3};
    const Params p = drip::testing::random_params(s, 0.5, rng);
    const Batch batch = drip::testing::random_batch(s, 7, 2, rng);
    const Tape tape = forward_batch(p, batch.steps);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(6), c = Eigen::VectorXd::Zero(6);
    for (const auto& x : batch.steps) {
        auto out = lstm_cell(x.col(1), h, c, p.lstm());
        h = out.h;
        c = out.c;
    }
    CHECK((tape.hiddens.back().col(1) - h).cwiseAbs().maxCoeff() < 1e-14);
    const Eigen::VectorXd dense = (p.W1() * h + p.b1()).cwiseMax(0.0);
    const Eigen::VectorXd y = p.W2() * dense + p.b2();
    CHECK((tape.output.col(1) - y).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("zero network outputs the output bias") {
    Params p(NetworkShape{5, 4, 3, 6});
    for (Eigen::Index k = 0; k < 6; ++k) p.b2()[k] = 0.1 * static_cast<double>(k) - 0.2;
    std::mt19937_64 rng(0);
    const Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 10);
    CHECK(forward(X, p, false, 0.2, rng) == Eigen::VectorXd(p.b2()));
    CHECK(forward(X, p, true, 0.2, rng) == Eigen::VectorXd(p.b2()));
}

TEST_CASE("inference is deterministic and training dropout is seeded") {
    const Params p = init_params(NetworkShape{5, 8, 4, 3}, 4);
    const Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 12);
    std::mt19937_64 a(1), b(1), c(2);
    CHECK(forward(X, p, false, 0.2, a) == forward(X, p, false, 0.2, b));
    const auto ya = forward(X, p, true, 0.5, a);
    const auto yb = forward(X, p, true, 0.5, b);
    CHECK(ya == yb);
    bool differs = false;
    for (int k = 0; k < 10 && !differs; ++k) differs = forward(X, p, true, 0.5, c) != ya;
    CHECK(differs);
}

TEST_CASE("initialization bounds and forget bias") {
    const NetworkShape s{5, 16, 8, 4};
    const Params p = init_params(s, 3);
    CHECK(p.W().cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(5.0));
    CHECK(p.U().cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(16.0));
    CHECK(p.W2().cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(8.0));
    CHECK(p.b().segment(16, 16).isOnes());
    CHECK(p.b().head(16).isZero());
    CHECK(p.b().tail(32).isZero());
    CHECK(p.theta().size() == static_cast<Eigen::Index>(s.parameter_count()));
}

TEST_CASE("error metrics") {
    const std::vector<double> y{0, 0}, yh{1, 3};
    CHECK(mse(y, yh) == doctest::Approx((1.0 + 9.0) / 2.0));
    CHECK(mae(y, yh) == doctest::Approx((1.0 + 3.0) / 2.0));
    CHECK(mse(y, y) == 0.0);
    CHECK(mae(yh, yh) == 0.0);
    CHECK_THROWS_AS(mse(y, std::vector<double>{1}), Error);
    CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), Error);

    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(17), b(17);
        for (auto& v : a) v = n(rng);
        for (auto& v : b) v = n(rng);
        CHECK(mae(a, b) <= std::sqrt(mse(a, b)) + 1e-12);
    }
}

TEST_CASE("analytic gradient matches central differences") {
    std::mt19937_64 rng(12);
    const NetworkShape s{5, 4, 3, 2};
    std::size_t resolved = 0, total = 0;
    for (int draw = 0; draw < 10; ++draw) {
        const Params p = drip::testing::random_params(s, 0.5, rng);
        const Batch batch = drip::testing::random_batch(s, 3, 4, rng);
        const Eigen::MatrixXd mask = dropout_mask(s.hidden, 4, 0.2, rng);
        const auto plain = drip::testing::check_gradient(p, batch, nullptr, 1e-4);
        CHECK_MESSAGE(plain.max_rel_error < 1e-4, "draw " << draw << " index " << plain.worst_index);
        CHECK(plain.passes());
        const auto dropped = drip::testing::check_gradient(p, batch, &mask, 1e-4);
        CHECK_MESSAGE(dropped.max_rel_error < 1e-4, "draw " << draw << " index " << dropped.worst_index);
        CHECK(dropped.passes());
        resolved += plain.resolved + dropped.resolved;
        total += plain.resolved + plain.unresolved + dropped.resolved + dropped.unresolved;
    }
    // most components are large enough for a relative comparison
    CHECK(resolved * 5 > total * 4);
}

TEST_CASE("the gradient oracle catches small corruptions") {
    std::mt19937_64 rng(16);
    const NetworkShape s{5, 4, 3, 2};
    const Params p = drip::testing::random_params(s, 0.5, rng);
    const Batch batch = drip::testing::random_batch(s, 3, 4, rng);
    const Eigen::VectorXd g = backward(p, batch, forward_batch(p, batch.steps));

    Eigen::Index big = 0;
    g.cwiseAbs().maxCoeff(&big);
    Eigen::VectorXd bad = g;
    bad[big] *= 1.0 + 1e-3;
    CHECK(drip::testing::compare_gradient(p, batch, nullptr, bad, 1e-4).max_rel_error > 1e-4);

    // a tiny spurious value on a parameter with no gradient at all
    bad = g;
    Eigen::Index tiny = 0;
    g.cwiseAbs().minCoeff(&tiny);
    bad[tiny] += 1e-8;
    const auto r = drip::testing::compare_gradient(p, batch, nullptr, bad, 1e-4);
    CHECK_FALSE((r.max_rel_error < 1e-4 && r.passes()));
}

TEST_CASE("zero residual gives a zero gradient") {
    std::mt19937_64 rng(13);
    const NetworkShape s{5, 4, 3, 2};
    Params p = drip::testing::random_params(s, 0.5, rng);
    Batch batch = drip::testing::random_batch(s, 3, 5, rng);
    batch.targets = forward_batch(p, batch.steps).output;
    const Eigen::VectorXd g = backward(p, batch, forward_batch(p, batch.steps));
    CHECK(g.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("duplicating a sample leaves the mean gradient unchanged") {
    std::mt19937_64 rng(14);
    const NetworkShape s{5, 4, 3, 2};
    const Params p = drip::testing::random_params(s, 0.5, rng);
    const Batch one = drip::testing::random_batch(s, 3, 1, rng);
    Batch two;
    for (const auto& x : one.steps) {
        Eigen::MatrixXd d(x.rows(), 2);
        d << x, x;
        two.steps.push_back(d);
    }
    two.targets.resize(one.targets.rows(), 2);
    two.targets << one.targets, one.targets;
    const Eigen::VectorXd g1 = backward(p, one, forward_batch(p, one.steps));
    const Eigen::VectorXd g2 = backward(p, two, forward_batch(p, two.steps));
    CHECK((g1 - g2).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("batch loss is invariant under sample reordering") {
    std::mt19937_64 rng(15);
    const NetworkShape s{5, 4, 3, 2};
    const Params p = drip::testing::random_params(s, 0.5, rng);
    const Batch batch = drip::testing::random_batch(s, 3, 4, rng);
    Batch rev = batch;
    for (auto& x : rev.steps) x = x.rowwise().reverse().eval();
    rev.targets = rev.targets.rowwise().reverse().eval();
    CHECK(batch_loss(p, batch) == doctest::Approx(batch_loss(p, rev)).epsilon(1e-14));
}

TEST_CASE("gradient clipping caps the global norm") {
    Eigen::VectorXd g(3);
    g << 3.0, 4.0, 0.0;
    CHECK(clip_gradient(g, 2.5) == doctest::Approx(5.0));
    CHECK(g.norm() == doctest::Approx(2.5));
    Eigen::VectorXd small(2);
    small << 0.1, 0.1;
    clip_gradient(small, 5.0);
    CHECK(small[0] == 0.1);
}

TEST_CASE("adam first step moves each coordinate by the learning rate") {
    TrainConfig cfg;
    Adam adam(3, cfg);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd g(3);
    g << 2.0, -0.5, 0.0;
    adam.step(theta, g);
    // bias-corrected first step: m_hat = g, v_hat = g^2
    CHECK(theta[0] == doctest::Approx(-1e-3 * 2.0 / (2.0 + 1e-8)));
    CHECK(theta[1] == doctest::Approx(1e-3 * 0.5 / (0.5 + 1e-8)));
    CHECK(theta[2] == 0.0);
}

TEST_CASE("training with zero epochs returns the model unchanged") {
    const auto rows = sine_rows(80);
    const auto o = tiny_options(6, 3);
    const ForecastModel m = tiny_model(rows, o, 1);
    const SequenceSet set(rows, o.window);
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto r = train(m, set, set, cfg);
    CHECK(r.history.empty());
    CHECK(r.model.params.theta() == m.params.theta());
}

TEST_CASE("training is deterministic and reduces loss on a sine series") {
    const auto rows = sine_rows(400);
    const auto o = tiny_options(10, 5, 16);
    const ForecastModel m = tiny_model(rows, o, 7);
    const std::span<const FeatureRow> all(rows);
    const SequenceSet train_set(all.first(300), o.window);
    const SequenceSet val_set(all.subspan(300), o.window);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.learning_rate = 1e-2;
    const double before = dataset_loss(m, train_set);
    const auto a = train(m, train_set, val_set, cfg);
    const auto b = train(m, train_set, val_set, cfg);
    REQUIRE(a.history.size() == 30);
    for (std::size_t k = 0; k < a.history.size(); ++k) {
        CHECK(a.history[k].train_loss == b.history[k].train_loss);
        CHECK(a.history[k].val_loss == b.history[k].val_loss);
    }
    CHECK(a.model.params.theta() == b.model.params.theta());
    CHECK(dataset_loss(a.model, train_set) < before);

    const auto best = std::min_element(a.history.begin(), a.history.end(),
                                       [](const EpochRecord& x, const EpochRecord& y) { return x.val_loss < y.val_loss; });
    CHECK(a.best_epoch == best->epoch);
    CHECK(dataset_loss(a.model, val_set) == doctest::Approx(best->val_loss).epsilon(1e-12));
}

TEST_CASE("evaluate: perfect and mean predictors") {
    // targets in scaled space: zone column cycles through known values
    const std::vector<double> zone{0.0, 1.0, 0.5, 0.25, 0.75, 1.0, 0.0, 0.5};
    std::vector<FeatureRow> rows;
    for (double z : zone) rows.push_back({0.0, 0.0, 0.0, 0.0, z});
    const WindowSpec w{2, 1, 5};
    const SequenceSet set(rows, w);

    ModelOptions o;
    o.window = w;
    o.hidden = 2;
    o.dense = 2;
    ForecastModel m = make_model(PotId(0), o, 1);
    m.scaler = MinMaxScaler(std::vector<double>(5, 0.0), std::vector<double>{1, 1, 1, 1, 4000});
    m.params.theta().setZero();

    std::vector<double> targets;
    for (std::size_t i = 0; i < set.size(); ++i) targets.push_back(set.target(i)[0]);
    const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(targets.size());
    double mad = 0.0;
    for (double t : targets) mad += std::abs(t - mean);
    mad /= static_cast<double>(targets.size());

    m.params.b2()[0] = mean;
    const auto report = evaluate(m, set);
    CHECK(report.windows == targets.size());
    CHECK(report.mae_scaled == doctest::Approx(mad).epsilon(1e-12));
    CHECK(report.mae_counts == doctest::Approx(mad * 4000.0).epsilon(1e-9));

    const std::vector<FeatureRow> flat(8, FeatureRow{0, 0, 0, 0, 0.3});
    m.params.b2()[0] = 0.3;
    CHECK(evaluate(m, SequenceSet(flat, w)).mae_scaled == 0.0);
    CHECK_THROWS_AS(evaluate(m, SequenceSet(std::span(flat).first(2), w)), Error);
}

TEST_CASE("checkpoint reload reproduces predictions bit-exactly") {
    const auto rows = sine_rows(100);
    const auto o = tiny_options(8, 4);
    ForecastModel m = tiny_model(rows, o, 11);
    m.pot = PotId(2);
    const auto path = fs::temp_directory_path() / "drip_ckpt_test.bin";
    save_checkpoint(m, path);
    const ForecastModel back = load_checkpoint(path);
    CHECK(back.pot == PotId(2));
    CHECK(back.window == m.window);
    CHECK(back.shape() == m.shape());
    CHECK(back.scaler == m.scaler);
    CHECK(back.params.theta() == m.params.theta());
    const SequenceSet set(rows, o.window);
    for (std::size_t i = 0; i < set.size(); i += 7) {
        CHECK(predict_scaled(back, set.input(i)) == predict_scaled(m, set.input(i)));
    }
    CHECK(checkpoint_name(PotId(2)) == "model_pot3.bin");

    {
        std::ofstream trunc(path, std::ios::binary | std::ios::trunc);
        trunc << "DRIPLSTM";
    }
    CHECK_THROWS_AS(load_checkpoint(path), Error);
    fs::remove(path);
}
