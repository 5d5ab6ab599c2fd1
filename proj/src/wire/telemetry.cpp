#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>

#include "drip/wire/protocol.hpp"

namespace drip::wire {

std::string format_flow(double flow) {
    if (flow == 0.0) flow = 0.0;  // drops the sign of -0.0
    std::array<char, 512> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), flow, std::chars_format::fixed);
    std::string text(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
    if (text.find('.') == std::string::npos) text += ".0";
    return text;
}

namespace {

enum class Key : std::size_t { ts, temp, hum, rain, flow, soil, relay, mode, count };

constexpr std::array<std::string_view, static_cast<std::size_t>(Key::count)> kKeys = {
    "ts", "temp", "hum", "rain", "flow", "soil", "relay", "mode"};

class FrameParser {
public:
    explicit FrameParser(std::string_view s) : s_(s) {}

    Parsed<SensorSnapshot> run();

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[nodiscard]] bool at_end() const { return pos_ >= s_.size(); }
    [[nodiscard]] char peek() const { return s_[pos_]; }

    void skip_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    [[nodiscard]] ParseError error_here(std::string message) const {
        std::string tok = at_end() ? std::string() : std::string(s_.substr(pos_, 16));
        return ParseError{pos_ + 1, std::move(tok), std::move(message)};
    }
    [[nodiscard]] ParseError error_at(std::size_t at, std::size_t len, std::string message) const {
        return ParseError{at + 1, std::string(s_.substr(at, std::min<std::size_t>(len, 32))),
                          std::move(message)};
    }

    std::optional<ParseError> expect(char c) {
        skip_ws();
        if (at_end() || peek() != c) {
            return error_here(std::string("expected '") + c + "'");
        }
        ++pos_;
        return std::nullopt;
    }

    // Scans a JSON number token and returns [start, end).
    std::pair<std::size_t, std::size_t> scan_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (!at_end() && peek() >= '0' && peek() <= '9') ++pos_;
        };
        if (!at_end() && peek() == '-') ++pos_;
        digits();
        if (!at_end() && peek() == '.') {
            ++pos_;
            digits();
        }
        if (!at_end() && (peek() == 'e' || peek() == 'E')) {
            ++pos_;
            if (!at_end() && (peek() == '+' || peek() == '-')) ++pos_;
            digits();
        }
        return {start, pos_};
    }

    Parsed<std::int64_t> parse_int() {
        skip_ws();
        const auto [b, e] = scan_number();
        const std::string_view tok = s_.substr(b, e - b);
        if (tok.empty()) return error_here("expected integer");
        std::string_view digits = tok;
        if (digits.front() == '-') digits.remove_prefix(1);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos) {
            return error_at(b, tok.size(), "expected integer");
        }
        if (digits.size() > 1 && digits.front() == '0') {
            return error_at(b, tok.size(), "leading zero");
        }
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            return error_at(b, tok.size(), "integer overflow");
        }
        return v;
    }

    Parsed<std::int64_t> parse_int_in(std::int64_t lo, std::int64_t hi, const char* what) {
        skip_ws();
        const std::size_t at = pos_;
        auto v = parse_int();
        if (!v) return v;
        if (v.value() < lo || v.value() > hi) {
            return error_at(at, pos_ - at, std::string(what) + " out of range");
        }
        return v;
    }

    Parsed<double> parse_real() {
        skip_ws();
        const auto [b, e] = scan_number();
        const std::string_view tok = s_.substr(b, e - b);
        if (tok.empty()) return error_here("expected number");
        // JSON forbids leading zeros, '+', and bare '.'; from_chars is laxer.
        std::string_view mant = tok;
        if (mant.front() == '-') mant.remove_prefix(1);
        const bool digit_first = !mant.empty() && mant.front() >= '0' && mant.front() <= '9';
        const bool leading_zero = mant.size() > 1 && mant[0] == '0' && mant[1] >= '0' && mant[1] <= '9';
        const std::size_t dot = mant.find('.');
        const bool bad_frac = dot != std::string_view::npos &&
                              (dot + 1 >= mant.size() || mant[dot + 1] < '0' || mant[dot + 1] > '9');
        const char last = tok.back();
        if (!digit_first || leading_zero || bad_frac || last < '0' || last > '9') {
            return error_at(b, tok.size(), "malformed number");
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
            return error_at(b, tok.size(), "malformed number");
        }
        return v;
    }

    template <std::size_t N>
    std::optional<ParseError> parse_int_array(std::array<std::int64_t, N>& out, std::int64_t lo,
                                              std::int64_t hi, const char* what) {
        if (auto e = expect('[')) return e;
        const std::size_t open = pos_ - 1;
        std::size_t n = 0;
        skip_ws();
        if (!at_end() && peek() == ']') {
            ++pos_;
            return error_at(open, 2, std::string(what) + " arity");
        }
        while (true) {
            auto v = parse_int_in(lo, hi, what);
            if (!v) return v.error();
            if (n >= N) return error_at(open, pos_ - open, std::string(what) + " arity");
            out[n++] = v.value();
            skip_ws();
            if (at_end()) return error_here("unterminated array");
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() == ']') {
                ++pos_;
                break;
            }
            return error_here("expected ',' or ']'");
        }
        if (n != N) return error_at(open, pos_ - open, std::string(what) + " arity");
        return std::nullopt;
    }

    Parsed<Key> parse_key() {
        skip_ws();
        if (at_end() || peek() != '"') return error_here("expected key");
        const std::size_t open = pos_++;
        const std::size_t start = pos_;
        while (!at_end() && peek() != '"') {
            const auto c = static_cast<unsigned char>(peek());
            if (c == '\\' || c < 0x20) return error_here("unsupported character in key");
            ++pos_;
        }
        if (at_end()) return error_at(open, pos_ - open, "unterminated key");
        const std::string_view name = s_.substr(start, pos_ - start);
        ++pos_;
        for (std::size_t i = 0; i < kKeys.size(); ++i) {
            if (kKeys[i] == name) return static_cast<Key>(i);
        }
        return error_at(open, name.size() + 2, "unknown key");
    }
};

Parsed<SensorSnapshot> FrameParser::run() {
    for (std::size_t i = 0; i < s_.size(); ++i) {
        if (s_[i] == '\n' || s_[i] == '\r') {
            return ParseError{i + 1, "", "line break inside frame"};
        }
    }

    SensorSnapshot snap;
    std::array<bool, kKeys.size()> seen{};
    std::optional<std::int64_t> temp, hum;

    if (auto e = expect('{')) return *e;
    skip_ws();
    if (!at_end() && peek() == '}') return error_here("missing key 'ts'");

    while (true) {
        const std::size_t key_at = pos_;
        auto key = parse_key();
        if (!key) return key.error();
        const auto k = static_cast<std::size_t>(key.value());
        if (seen[k]) return error_at(key_at, kKeys[k].size() + 2, "duplicate key");
        seen[k] = true;
        if (auto e = expect(':')) return *e;

        switch (key.value()) {
        case Key::ts: {
            auto v = parse_int_in(0, INT64_MAX, "ts");
            if (!v) return v.error();
            snap.timestamp = v.value();
            break;
        }
        case Key::temp: {
            auto v = parse_int_in(kDhtUnreadable, kTempMax, "temp");
            if (!v) return v.error();
            temp = v.value();
            break;
        }
        case Key::hum: {
            skip_ws();
            const std::size_t at = pos_;
            auto v = parse_int_in(kDhtUnreadable, kHumMax, "hum");
            if (!v) return v.error();
            if (v.value() < kHumMin && v.value() != kDhtUnreadable) {
                return error_at(at, pos_ - at, "hum out of range");
            }
            hum = v.value();
            break;
        }
        case Key::rain: {
            auto v = parse_int_in(0, 1, "rain");
            if (!v) return v.error();
            snap.rain_wet = v.value() == 1;
            break;
        }
        case Key::flow: {
            skip_ws();
            const std::size_t at = pos_;
            auto v = parse_real();
            if (!v) return v.error();
            if (v.value() < 0.0 || v.value() > kFlowMax) return error_at(at, pos_ - at, "flow out of range");
            snap.flow_lpm = v.value() == 0.0 ? 0.0 : v.value();
            break;
        }
        case Key::soil: {
            std::array<std::int64_t, kSoilChannels> soil{};
            if (auto e = parse_int_array(soil, 0, kAdcMax, "soil")) return *e;
            for (std::size_t i = 0; i < soil.size(); ++i) snap.soil_adc[i] = static_cast<int>(soil[i]);
            break;
        }
        case Key::relay: {
            std::array<std::int64_t, kPotCount> relay{};
            if (auto e = parse_int_array(relay, 0, 1, "relay")) return *e;
            for (std::size_t i = 0; i < relay.size(); ++i) {
                snap.relay[i] = relay[i] == 1 ? RelayState::ON : RelayState::OFF;
            }
            break;
        }
        case Key::mode: {
            auto v = parse_int_in(1, 3, "mode");
            if (!v) return v.error();
            snap.mode = parse_mode(static_cast<int>(v.value()));
            break;
        }
        case Key::count: break;
        }

        skip_ws();
        if (at_end()) return error_here("unterminated object");
        if (peek() == ',') {
            ++pos_;
            continue;
        }
        if (peek() == '}') break;
        return error_here("expected ',' or '}'");
    }

    const std::size_t close = pos_++;
    skip_ws();
    if (!at_end()) return error_here("trailing characters after frame");

    for (std::size_t i = 0; i < kKeys.size(); ++i) {
        if (!seen[i]) return ParseError{close + 1, "}", "missing key '" + std::string(kKeys[i]) + "'"};
    }
    if ((*temp == kDhtUnreadable) != (*hum == kDhtUnreadable)) {
        return ParseError{close + 1, "}", "unreadable marker must cover both temp and hum"};
    }
    snap.temperature_c = static_cast<int>(*temp);
    snap.humidity_pct = static_cast<int>(*hum);
    return snap;
}

}  // namespace

std::string encode_telemetry(const SensorSnapshot& s) {
    std::string out;
    out.reserve(128);
    out += "{\"ts\":";
    out += std::to_string(s.timestamp);
    out += ",\"temp\":";
    out += std::to_string(s.temperature_c);
    out += ",\"hum\":";
    out += std::to_string(s.humidity_pct);
    out += ",\"rain\":";
    out += s.rain_wet ? '1' : '0';
    out += ",\"flow\":";
    out += format_flow(s.flow_lpm);
    out += ",\"soil\":[";
    for (std::size_t i = 0; i < s.soil_adc.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s.soil_adc[i]);
    }
    out += "],\"relay\":[";
    for (std::size_t i = 0; i < s.relay.size(); ++i) {
        if (i) out += ',';
        out += s.relay[i] == RelayState::ON ? '1' : '0';
    }
    out += "],\"mode\":";
    out += std::to_string(mode_code(s.mode));
    out += "}\n";
    return out;
}

Parsed<SensorSnapshot> parse_telemetry(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return FrameParser(line).run();
}

}  // namespace drip::wire
