#pragma once

#include "ballvault/common.hpp"

#include <span>
#include <vector>

namespace ballvault {

/// Level sequences of a complete ball tree.
///
/// The sequence at depth d concatenates the ball lists of the 2^d nodes at
/// that depth, left to right; each entry is the leaf reached by that ball.
/// Depth 0 is the root list (leaf_of) and each deeper level is a stable
/// partition of its parent's segments on the next leaf bit.
namespace levels {

/// Reference implementation: one stable partition per node segment.
void partition_serial(std::span<const std::uint32_t> level, std::span<std::uint32_t> next, unsigned tree_depth,
                      unsigned depth);

/// OpenMP implementation: blocked prefix count of zero bits, then a parallel
/// scatter. Produces exactly the serial result.
void partition_parallel(std::span<const std::uint32_t> level, std::span<std::uint32_t> next, unsigned tree_depth,
                        unsigned depth);

/// Calls visit(depth, level_sequence) for depths 0..tree_depth in order.
/// Only two level buffers are alive at any time.
template <class Visitor>
void sweep(std::span<const std::uint32_t> leaf_of, unsigned tree_depth, bool parallel, Visitor&& visit) {
    std::vector<std::uint32_t> cur(leaf_of.begin(), leaf_of.end());
    std::vector<std::uint32_t> next(cur.size());
    for (unsigned d = 0;; ++d) {
        visit(d, std::span<const std::uint32_t>(cur));
        if (d == tree_depth) {
            break;
        }
        if (parallel) {
            partition_parallel(cur, next, tree_depth, d);
        } else {
            partition_serial(cur, next, tree_depth, d);
        }
        cur.swap(next);
    }
}

/// Bit of `leaf` that decides the child taken when leaving depth `depth`.
inline bool direction(std::uint32_t leaf, unsigned tree_depth, unsigned depth) noexcept {
    return ((leaf >> (tree_depth - 1 - depth)) & 1u) != 0;
}

} // namespace levels

/// Worker count for parallel kernels; honours BALLVAULT_THREADS when set.
int worker_threads();

} // namespace ballvault
