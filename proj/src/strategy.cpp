#include "ballvault/strategy.hpp"

#include <charconv>
#include <vector>

namespace ballvault {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t at = s.find(sep, start);
        parts.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos) {
            return parts;
        }
        start = at + 1;
    }
}

unsigned parse_param(std::string_view text, std::string_view whole) {
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || v == 0) {
        throw validation_error("bad strategy parameter '" + std::string(text) + "' in '" + std::string(whole) +
                               "'; expected " + std::string(strategy_grammar));
    }
    return v;
}

} // namespace

Strategy Strategy::parse(std::string_view text) {
    const auto parts = split(text, ':');
    const std::string_view name = parts[0];
    auto expect = [&](std::size_t count) {
        if (parts.size() != count) {
            throw validation_error("strategy '" + std::string(text) + "' has the wrong number of parameters; expected " +
                                   std::string(strategy_grammar));
        }
    };
    if (name == "eager") {
        expect(1);
        return eager();
    }
    if (name == "bitwalk") {
        expect(1);
        return bitwalk();
    }
    if (name == "marked") {
        expect(2);
        return marked(parse_param(parts[1], text));
    }
    if (name == "chunked") {
        expect(3);
        return chunked(parse_param(parts[1], text), parse_param(parts[2], text));
    }
    throw validation_error("unknown strategy '" + std::string(name) + "'; known: " + std::string(strategy_grammar));
}

std::string Strategy::to_string() const {
    switch (kind) {
    case StrategyKind::Eager:
        return "eager";
    case StrategyKind::BitWalk:
        return "bitwalk";
    case StrategyKind::Marked:
        return "marked:" + std::to_string(stride);
    case StrategyKind::Chunked:
        return "chunked:" + std::to_string(delta) + ":" + std::to_string(block);
    }
    return "?";
}

void Strategy::validate(unsigned depth) const {
    // A single-leaf tree has no levels to walk; any parameter >= 1 is accepted.
    const unsigned cap = depth == 0 ? ~0u : depth;
    switch (kind) {
    case StrategyKind::Eager:
    case StrategyKind::BitWalk:
        return;
    case StrategyKind::Marked:
        if (stride < 1 || stride > cap) {
            throw validation_error("marked stride must lie in [1, lg n]");
        }
        return;
    case StrategyKind::Chunked:
        if (delta < 1 || delta > cap) {
            throw validation_error("chunked delta must lie in [1, lg n]");
        }
        if (delta > 20) {
            throw validation_error("chunked delta above 20 needs more than 2^20 counters per block");
        }
        if (block < 1) {
            throw validation_error("chunked block must be at least 1");
        }
        return;
    }
}

} // namespace ballvault
