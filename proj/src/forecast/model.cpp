#include "drip/forecast/model.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace drip::forecast {

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes little-endian hosts");

namespace {

constexpr std::array<char, 8> kMagic = {'D', 'R', 'I', 'P', 'L', 'S', 'T', 'M'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ofstream& out) : out_(out) {}
    template <typename T>
    void put(const T& v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put_doubles(const double* p, std::size_t n) {
        out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    }

private:
    std::ofstream& out_;
};

class Reader {
public:
    Reader(std::ifstream& in, std::string path) : in_(in), path_(std::move(path)) {}
    template <typename T>
    T get() {
        T v{};
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (!in_) throw Error("truncated checkpoint " + path_);
        return v;
    }
    void get_doubles(double* p, std::size_t n) {
        in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
        if (!in_) throw Error("truncated checkpoint " + path_);
    }

private:
    std::ifstream& in_;
    std::string path_;
};

}  // namespace

void ForecastModel::validate() const {
    window.validate();
    const auto& s = shape();
    if (s.features != window.features || s.horizon != window.horizon) {
        throw Error("network shape does not match window spec");
    }
    if (dropout < 0.0 || dropout >= 1.0) throw Error("dropout must lie in [0, 1)");
    if (scaler.fitted() && scaler.features() != window.features) throw Error("scaler width mismatch");
    if (!params.theta().allFinite()) throw Error("model parameters are not finite");
}

ForecastModel make_model(PotId pot, const ModelOptions& opts, std::uint64_t seed) {
    ForecastModel m;
    m.pot = pot;
    m.window = opts.window;
    m.dropout = opts.dropout;
    m.params = init_params({opts.window.features, opts.hidden, opts.dense, opts.window.horizon}, seed);
    m.validate();
    return m;
}

Eigen::VectorXd predict_scaled(const ForecastModel& m, const Eigen::MatrixXd& X) {
    if (X.rows() != static_cast<Eigen::Index>(m.window.features) ||
        X.cols() != static_cast<Eigen::Index>(m.window.lookback)) {
        throw Error("prediction window has the wrong shape");
    }
    std::mt19937_64 unused(0);
    return forward(X, m.params, false, m.dropout, unused);
}

std::vector<double> forecast_counts(const ForecastModel& m, std::span<const SensorSnapshot> recent) {
    if (!m.scaler.fitted()) throw Error("model has no fitted scaler");
    const std::size_t L = m.window.lookback;
    if (recent.size() < L) {
        throw Error("forecast needs " + std::to_string(L) + " frames, have " + std::to_string(recent.size()));
    }
    const auto window = recent.subspan(recent.size() - L);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(m.window.features), static_cast<Eigen::Index>(L));
    for (std::size_t t = 0; t < L; ++t) {
        const auto row = m.scaler.transform(store::feature_row(window[t], m.pot));
        for (std::size_t j = 0; j < row.size(); ++j) X(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t)) = row[j];
    }
    const Eigen::VectorXd y = predict_scaled(m, X);
    std::vector<double> out(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        out[static_cast<std::size_t>(i)] = m.scaler.inverse_transform(store::kZoneMoisture, y(i));
    }
    return out;
}

void save_checkpoint(const ForecastModel& m, const std::filesystem::path& path) {
    m.validate();
    if (!m.scaler.fitted()) throw Error("refusing to save a model without a fitted scaler");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint " + path.string());
    Writer w(out);
    out.write(kMagic.data(), kMagic.size());
    const auto& s = m.shape();
    w.put(kVersion);
    w.put(static_cast<std::uint32_t>(m.pot.index()));
    w.put(static_cast<std::uint32_t>(s.features));
    w.put(static_cast<std::uint32_t>(s.hidden));
    w.put(static_cast<std::uint32_t>(s.dense));
    w.put(static_cast<std::uint32_t>(s.horizon));
    w.put(static_cast<std::uint32_t>(m.window.lookback));
    w.put(m.dropout);
    w.put_doubles(m.scaler.mins().data(), m.scaler.features());
    w.put_doubles(m.scaler.maxs().data(), m.scaler.features());
    w.put(static_cast<std::uint64_t>(m.params.theta().size()));
    w.put_doubles(m.params.theta().data(), static_cast<std::size_t>(m.params.theta().size()));
    if (!out) throw Error("write failed on checkpoint " + path.string());
}

ForecastModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint " + path.string());
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw Error(path.string() + " is not a forecaster checkpoint");

    Reader r(in, path.string());
    if (r.get<std::uint32_t>() != kVersion) throw Error("unsupported checkpoint version in " + path.string());
    const auto pot = r.get<std::uint32_t>();
    NetworkShape shape;
    shape.features = r.get<std::uint32_t>();
    shape.hidden = r.get<std::uint32_t>();
    shape.dense = r.get<std::uint32_t>();
    shape.horizon = r.get<std::uint32_t>();
    const auto lookback = r.get<std::uint32_t>();
    if (shape.features != store::kFeatureCount || shape.hidden > 4096 || shape.dense > 4096 ||
        shape.horizon > 4096 || lookback > 100000) {
        throw Error("implausible dimensions in checkpoint " + path.string());
    }

    ForecastModel m;
    m.pot = PotId(pot);
    m.window = WindowSpec{lookback, shape.horizon, shape.features};
    m.dropout = r.get<double>();
    std::vector<double> mins(shape.features), maxs(shape.features);
    r.get_doubles(mins.data(), mins.size());
    r.get_doubles(maxs.data(), maxs.size());
    m.scaler = MinMaxScaler(std::move(mins), std::move(maxs));
    m.params = Params(shape);
    if (r.get<std::uint64_t>() != static_cast<std::uint64_t>(m.params.theta().size())) {
        throw Error("parameter count mismatch in checkpoint " + path.string());
    }
    r.get_doubles(m.params.theta().data(), static_cast<std::size_t>(m.params.theta().size()));
    if (in.peek() != std::char_traits<char>::eof()) throw Error("trailing bytes in checkpoint " + path.string());
    m.validate();
    return m;
}

std::string checkpoint_name(PotId pot) { return "model_pot" + std::to_string(pot.index() + 1) + ".bin"; }

}  // namespace drip::forecast
