#pragma once

#include "ballvault/common.hpp"

#include <string>
#include <string_view>

namespace ballvault {

enum class StrategyKind { Eager, BitWalk, Marked, Chunked };

/// Which ball-inheritance layout a tree uses.
///
///  - Eager:   the leaf answer of every (node, ball) pair.
///  - BitWalk: one direction bit per ball per level; queries walk to the leaves.
///  - Marked:  BitWalk plus stored leaf answers at levels divisible by `stride`.
///  - Chunked: each ball stores its next `delta` path bits; a cumulative count
///             directory every `block` symbols lets a query jump `delta` levels.
struct Strategy {
    StrategyKind kind = StrategyKind::BitWalk;
    unsigned stride = 0;
    unsigned delta = 0;
    unsigned block = 0;

    static Strategy eager() { return {StrategyKind::Eager, 0, 0, 0}; }
    static Strategy bitwalk() { return {StrategyKind::BitWalk, 0, 0, 0}; }
    static Strategy marked(unsigned stride) { return {StrategyKind::Marked, stride, 0, 0}; }
    static Strategy chunked(unsigned delta, unsigned block) { return {StrategyKind::Chunked, 0, delta, block}; }

    /// Parses "name[:param[:param]]", e.g. "eager", "bitwalk", "marked:4", "chunked:4:16".
    static Strategy parse(std::string_view text);
    std::string to_string() const;

    /// Throws validation_error unless the parameters fit a tree with `depth` levels.
    void validate(unsigned depth) const;

    friend bool operator==(const Strategy&, const Strategy&) = default;
};

inline constexpr std::string_view strategy_grammar =
    "eager | bitwalk | marked:<stride> | chunked:<delta>:<block>";

} // namespace ballvault
