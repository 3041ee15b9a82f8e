#pragma once

#include "ballvault/balltree.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace testutil {

inline std::vector<std::uint32_t> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    std::mt19937_64 rng(seed);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

// One representative of every strategy family that fits a tree of this depth.
inline std::vector<ballvault::Strategy> strategies_for(unsigned depth) {
    using ballvault::Strategy;
    std::vector<Strategy> s{Strategy::eager(), Strategy::bitwalk()};
    const unsigned cap = std::max(depth, 1u);
    for (unsigned stride : {1u, 2u, 3u, 4u}) {
        if (stride <= cap) {
            s.push_back(Strategy::marked(stride));
        }
    }
    for (auto [delta, block] : {std::pair{1u, 1u}, {2u, 4u}, {3u, 16u}, {4u, 16u}, {5u, 7u}}) {
        if (delta <= cap) {
            s.push_back(Strategy::chunked(delta, block));
        }
    }
    return s;
}

inline std::size_t trace_ceiling(const ballvault::Strategy& s, unsigned depth) {
    using ballvault::StrategyKind;
    switch (s.kind) {
    case StrategyKind::Eager:
        return 2;
    case StrategyKind::BitWalk:
        return 2 * depth;
    case StrategyKind::Marked:
        return 2 * s.stride + 2;
    case StrategyKind::Chunked:
        return (depth + s.delta - 1) / s.delta * (s.block + 2);
    }
    return 0;
}

} // namespace testutil
