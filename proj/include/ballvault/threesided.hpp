#pragma once

#include "ballvault/balltree.hpp"
#include "ballvault/rmq.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace ballvault {

/// LeftOpen is [x_bound, inf) x [y_lo, y_hi]; RightOpen is (-inf, x_bound] x [y_lo, y_hi].
enum class Side { LeftOpen, RightOpen };

/// Max and Min extremum indexes over a node's implicit array
/// A[j] = leaf reached by ball j of the node's list.
struct NodeRmq {
    RmqIndex max;
    RmqIndex min;

    const RmqIndex& for_side(Side s) const noexcept { return s == Side::LeftOpen ? max : min; }
};

/// Cost of one 3-sided invocation.
struct ThreeSidedStats {
    std::size_t argextreme_calls = 0;
    std::size_t decompressions = 0;
    std::size_t emitted = 0;
    std::size_t failed = 0;
    std::size_t probes_total = 0;
    std::size_t probes_max = 0;
};

/// Reports every local y-rank j in [y_lo, y_hi] of `node` whose ball reaches a
/// leaf on the open side of x_bound, calling emit(j, leaf).
///
/// Each candidate is the extremum of a y-range and costs exactly one
/// ball-inheritance query; a failing candidate ends its branch, so the
/// number of extremum calls is at most 2k + 1 for k reported points.
/// `rmq` may be null only for single-ball nodes. A range with y_lo > y_hi
/// is empty. When `stats` is non-null the ball queries are traced.
template <class Sink>
std::size_t report_3sided(const BallTree& tree, const NodeRmq* rmq, NodeId node, Side kind, std::size_t x_bound,
                          std::size_t y_lo, std::size_t y_hi, Sink&& emit, ThreeSidedStats* stats = nullptr) {
    if (y_lo > y_hi) {
        return 0;
    }
    const std::size_t len = tree.list_length(node);
    if (y_hi >= len) {
        throw range_error("3-sided y-range exceeds the node's list");
    }
    if (rmq == nullptr && len > 1) {
        throw validation_error("3-sided query on a multi-ball node needs its extremum index");
    }
    if (rmq != nullptr && (rmq->max.size() != len || rmq->min.size() != len)) {
        throw validation_error("extremum index does not match the node's list length");
    }
    auto passes = [&](std::size_t leaf) { return kind == Side::LeftOpen ? leaf >= x_bound : leaf <= x_bound; };

    std::size_t emitted = 0;
    std::vector<std::pair<std::size_t, std::size_t>> work{{y_lo, y_hi}};
    while (!work.empty()) {
        const auto [lo, hi] = work.back();
        work.pop_back();
        const std::size_t m = rmq == nullptr ? lo : rmq->for_side(kind).argextreme(lo, hi + 1);
        std::size_t leaf = 0;
        if (stats != nullptr) {
            ++stats->argextreme_calls;
            ++stats->decompressions;
            auto [answer, trace] = tree.query_traced(node, m);
            leaf = answer;
            stats->probes_total += trace.size();
            stats->probes_max = std::max(stats->probes_max, trace.size());
        } else {
            leaf = tree.query(node, m);
        }
        if (!passes(leaf)) {
            if (stats != nullptr) {
                ++stats->failed;
            }
            continue;
        }
        emit(m, leaf);
        ++emitted;
        if (m + 1 <= hi) {
            work.emplace_back(m + 1, hi);
        }
        if (m > lo) {
            work.emplace_back(lo, m - 1);
        }
    }
    if (stats != nullptr) {
        stats->emitted += emitted;
    }
    return emitted;
}

} // namespace ballvault
