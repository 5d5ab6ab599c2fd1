#include <charconv>
#include <vector>

#include "drip/wire/protocol.hpp"

namespace drip::wire {

std::string ParseError::describe() const {
    std::string out = "column " + std::to_string(column) + ": " + message;
    if (!token.empty()) {
        out += " (near '" + token + "')";
    }
    return out;
}

namespace {

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

std::string_view strip_line_end(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

ParseError fail(const Token& t, std::string message) {
    return ParseError{t.column, std::string(t.text.substr(0, 32)), std::move(message)};
}

// Non-negative decimal without sign or leading zeros.
std::optional<int> parse_uint(std::string_view s) {
    if (s.empty() || s.size() > 9) return std::nullopt;
    if (s.size() > 1 && s.front() == '0') return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

Parsed<std::size_t> relay_index(const Token& t) {
    auto v = parse_uint(t.text);
    if (!v) return fail(t, "expected relay index");
    if (*v < 0 || *v >= static_cast<int>(kPotCount)) return fail(t, "relay index out of range");
    return static_cast<std::size_t>(*v);
}

}  // namespace

Parsed<Command> parse_command(std::string_view raw) {
    const std::string_view line = strip_line_end(raw);
    if (line.empty()) return ParseError{1, "", "empty command"};

    std::vector<Token> tokens;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ' ') {
            if (i == start) {
                return ParseError{i + 1, std::string(1, i < line.size() ? line[i] : ' '),
                                  "expected single space between tokens"};
            }
            tokens.push_back({line.substr(start, i - start), start + 1});
            start = i + 1;
        } else {
            const auto c = static_cast<unsigned char>(line[i]);
            if (c < 0x21 || c > 0x7e) {
                return ParseError{i + 1, "", "invalid character"};
            }
        }
    }

    const Token& kw = tokens.front();
    auto expect_args = [&](std::size_t n) -> std::optional<ParseError> {
        if (tokens.size() - 1 < n) {
            return ParseError{line.size() + 1, "", "missing argument for " + std::string(kw.text)};
        }
        if (tokens.size() - 1 > n) return fail(tokens[n + 1], "unexpected trailing token");
        return std::nullopt;
    };

    if (kw.text == "MODE") {
        if (auto e = expect_args(1)) return *e;
        auto v = parse_uint(tokens[1].text);
        if (!v) return fail(tokens[1], "expected mode code");
        if (*v < 1 || *v > 3) return fail(tokens[1], "mode code out of range");
        return Command{ModeCmd{parse_mode(*v)}};
    }
    if (kw.text == "THRESHOLD") {
        if (auto e = expect_args(2)) return *e;
        auto idx = relay_index(tokens[1]);
        if (!idx) return idx.error();
        auto v = parse_uint(tokens[2].text);
        if (!v) return fail(tokens[2], "expected threshold counts");
        if (*v > kAdcMax) return fail(tokens[2], "threshold out of range");
        return Command{ThresholdCmd{idx.value(), *v}};
    }
    if (kw.text == "RELAY") {
        if (auto e = expect_args(2)) return *e;
        auto idx = relay_index(tokens[1]);
        if (!idx) return idx.error();
        if (tokens[2].text == "ON") return Command{RelayCmd{idx.value(), RelayState::ON}};
        if (tokens[2].text == "OFF") return Command{RelayCmd{idx.value(), RelayState::OFF}};
        return fail(tokens[2], "expected ON or OFF");
    }
    return fail(kw, "unknown command");
}

std::string format_command(const Command& cmd) {
    struct Visitor {
        std::string operator()(const ModeCmd& c) const {
            return "MODE " + std::to_string(mode_code(c.mode));
        }
        std::string operator()(const ThresholdCmd& c) const {
            return "THRESHOLD " + std::to_string(c.relay) + " " + std::to_string(c.counts);
        }
        std::string operator()(const RelayCmd& c) const {
            return "RELAY " + std::to_string(c.relay) + (c.state == RelayState::ON ? " ON" : " OFF");
        }
    };
    return std::visit(Visitor{}, cmd);
}

}  // namespace drip::wire
