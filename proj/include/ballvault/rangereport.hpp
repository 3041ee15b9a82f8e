#pragma once

#include "ballvault/balltree.hpp"
#include "ballvault/bitvec.hpp"
#include "ballvault/rankspace.hpp"
#include "ballvault/threesided.hpp"

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace ballvault {

/// Deepest node whose subtree holds both leaves (leaf_a <= leaf_b).
NodeId lca(std::size_t leaf_a, std::size_t leaf_b, unsigned depth);

struct SpaceBreakdown {
    std::size_t points = 0;      // stored original points at packed coordinate width
    std::size_t tree = 0;        // ball-inheritance cell array
    std::size_t rmq = 0;         // per-node extremum indexes
    std::size_t navigation = 0;  // direction bits used to map y-ranges to children

    std::size_t total() const noexcept { return points + tree + rmq + navigation; }
};

struct ReportStats {
    std::vector<ThreeSidedStats> calls;
    std::size_t reported = 0;
};

/// 2D orthogonal range reporting by the ball-inheritance reduction.
///
/// Points are reduced to rank space and padded with sentinels to a power of
/// two. Ball j of the root is the point with y-rank j and reaches the leaf
/// equal to its x-rank. A query is decomposed at the lowest common ancestor
/// of its boundary leaves into a LeftOpen query at the left child and a
/// RightOpen query at the right child; each reported ball is decompressed
/// once through the tree and mapped back to the stored point.
class RangeReporter {
public:
    RangeReporter(std::vector<Point> points, Strategy strategy, RmqMode rmq_mode = RmqMode::Succinct,
                  bool parallel_build = true);

    /// Input indices of the points inside `rect`, in unspecified order.
    std::vector<std::uint32_t> report_indices(const QueryRect& rect, ReportStats* stats = nullptr) const;
    std::vector<Point> report(const QueryRect& rect, ReportStats* stats = nullptr) const;

    /// Child y-range for a parent y-range [y_lo, y_hi], via direction ranks.
    std::optional<std::pair<std::size_t, std::size_t>> map_y_range_to_child(NodeId parent, bool right_child,
                                                                            std::size_t y_lo,
                                                                            std::size_t y_hi) const;

    const RankedPointSet& points() const noexcept { return rps_; }
    const BallTree& tree() const noexcept { return tree_; }
    const NodeRmq* node_rmq(NodeId v) const;
    RmqMode rmq_mode() const noexcept { return rmq_mode_; }
    std::size_t padding() const noexcept { return tree_.size() - rps_.size(); }
    SpaceBreakdown space() const;

    /// "BVREP1", RMQ mode, the original points, then the embedded BALLV1 dump.
    void save(std::ostream& out) const;
    static RangeReporter load(std::istream& in, bool parallel_build = true);

    /// Root ball list: leaf of ball j for the padded set.
    static std::vector<std::uint32_t> padded_leaf_of(const RankedPointSet& rps);

private:
    RangeReporter(RankedPointSet rps, Strategy strategy, RmqMode mode, bool parallel_build, int);
    RangeReporter(RankedPointSet rps, BallTree tree, RmqMode mode, bool parallel_build);
    void build_indexes(bool parallel_build);

    RankedPointSet rps_;
    BallTree tree_;
    RmqMode rmq_mode_;
    std::vector<BitVector> navigation_;           // one per level above the leaves
    std::vector<std::vector<NodeRmq>> rmqs_;      // [depth][offset], multi-ball nodes only
};

/// Serial reference for the per-node extremum index build of one level.
std::vector<NodeRmq> build_level_rmqs_serial(std::span<const std::uint32_t> level, unsigned depth, RmqMode mode);
/// OpenMP version of the same kernel, one node per iteration.
std::vector<NodeRmq> build_level_rmqs_parallel(std::span<const std::uint32_t> level, unsigned depth, RmqMode mode);

} // namespace ballvault
