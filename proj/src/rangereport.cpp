#include "ballvault/rangereport.hpp"

#include "ballvault/binio.hpp"
#include "ballvault/levels.hpp"

#include <algorithm>
#include <bit>

namespace ballvault {

namespace {

constexpr std::string_view reporter_magic = "BVREP1";

RankedPointSet reduce_checked(std::vector<Point> points) {
    if (points.empty()) {
        throw validation_error("range reporter needs at least one point");
    }
    return RankedPointSet(std::move(points));
}

std::size_t padded_size(std::size_t n) { return std::size_t{1} << ceil_log2(n); }

} // namespace

NodeId lca(std::size_t leaf_a, std::size_t leaf_b, unsigned depth) {
    const auto diff = static_cast<unsigned>(std::bit_width(leaf_a ^ leaf_b));
    const unsigned d = depth - diff;
    return {d, leaf_a >> diff};
}

std::vector<std::uint32_t> RangeReporter::padded_leaf_of(const RankedPointSet& rps) {
    const std::size_t n = rps.size();
    std::vector<std::uint32_t> leaf_of(padded_size(n));
    for (const RankPoint& rp : rps.rank_points()) {
        leaf_of[rp.ry] = rp.rx;
    }
    // sentinels sit beyond every real rank on both axes
    for (std::size_t j = n; j < leaf_of.size(); ++j) {
        leaf_of[j] = static_cast<std::uint32_t>(j);
    }
    return leaf_of;
}

std::vector<NodeRmq> build_level_rmqs_serial(std::span<const std::uint32_t> level, unsigned depth, RmqMode mode) {
    const std::size_t nodes = std::size_t{1} << depth;
    const std::size_t seg = level.size() >> depth;
    std::vector<NodeRmq> out(nodes);
    for (std::size_t o = 0; o < nodes; ++o) {
        const auto slice = level.subspan(o * seg, seg);
        out[o] = NodeRmq{RmqIndex(slice, RmqDirection::Max, mode), RmqIndex(slice, RmqDirection::Min, mode)};
    }
    return out;
}

std::vector<NodeRmq> build_level_rmqs_parallel(std::span<const std::uint32_t> level, unsigned depth,
                                               RmqMode mode) {
    const auto nodes = static_cast<std::int64_t>(std::size_t{1} << depth);
    const std::size_t seg = level.size() >> depth;
    std::vector<NodeRmq> out(static_cast<std::size_t>(nodes));
    const int threads = worker_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 16)
    for (std::int64_t io = 0; io < nodes; ++io) {
        const auto o = static_cast<std::size_t>(io);
        const auto slice = level.subspan(o * seg, seg);
        out[o] = NodeRmq{RmqIndex(slice, RmqDirection::Max, mode), RmqIndex(slice, RmqDirection::Min, mode)};
    }
    return out;
}

RangeReporter::RangeReporter(std::vector<Point> points, Strategy strategy, RmqMode rmq_mode, bool parallel_build)
    : RangeReporter(reduce_checked(std::move(points)), strategy, rmq_mode, parallel_build, 0) {}

RangeReporter::RangeReporter(RankedPointSet rps, Strategy strategy, RmqMode mode, bool parallel_build, int)
    : rps_(std::move(rps)), tree_(padded_leaf_of(rps_), strategy, parallel_build), rmq_mode_(mode) {
    build_indexes(parallel_build);
}

RangeReporter::RangeReporter(RankedPointSet rps, BallTree tree, RmqMode mode, bool parallel_build)
    : rps_(std::move(rps)), tree_(std::move(tree)), rmq_mode_(mode) {
    build_indexes(parallel_build);
}

void RangeReporter::build_indexes(bool parallel_build) {
    const unsigned L = tree_.depth();
    const std::size_t n = tree_.size();
    navigation_.clear();
    rmqs_.assign(L + 1, {});
    levels::sweep(tree_.leaf_of(), L, parallel_build, [&](unsigned d, std::span<const std::uint32_t> seq) {
        if (d < L) {
            std::vector<bool> dirs(n);
            for (std::size_t p = 0; p < n; ++p) {
                dirs[p] = levels::direction(seq[p], L, d);
            }
            navigation_.emplace_back(dirs);
            rmqs_[d] = parallel_build ? build_level_rmqs_parallel(seq, d, rmq_mode_)
                                      : build_level_rmqs_serial(seq, d, rmq_mode_);
        }
    });
}

const NodeRmq* RangeReporter::node_rmq(NodeId v) const {
    if (v.depth >= rmqs_.size() || v.offset >= (std::size_t{1} << v.depth)) {
        throw range_error("node outside the tree");
    }
    if (v.depth == tree_.depth()) {
        return nullptr;
    }
    return &rmqs_[v.depth][v.offset];
}

std::optional<std::pair<std::size_t, std::size_t>> RangeReporter::map_y_range_to_child(NodeId parent,
                                                                                       bool right_child,
                                                                                       std::size_t y_lo,
                                                                                       std::size_t y_hi) const {
    if (parent.depth >= tree_.depth() || parent.offset >= (std::size_t{1} << parent.depth)) {
        throw range_error("parent must be an internal node");
    }
    const std::size_t seg = tree_.size() >> parent.depth;
    if (y_lo > y_hi || y_hi >= seg) {
        throw range_error("parent y-range outside the node's list");
    }
    const BitVector& dirs = navigation_[parent.depth];
    const std::size_t start = parent.offset * seg;
    const std::size_t before = parent.offset * (seg / 2);  // each child has seg/2 balls
    auto child_rank = [&](std::size_t y) {
        const std::size_t ones = dirs.rank1(start + y);
        return (right_child ? ones : start + y - ones) - before;
    };
    const std::size_t lo = child_rank(y_lo);
    const std::size_t end = child_rank(y_hi + 1);
    if (lo >= end) {
        return std::nullopt;
    }
    return std::pair{lo, end - 1};
}

std::vector<std::uint32_t> RangeReporter::report_indices(const QueryRect& rect, ReportStats* stats) const {
    std::vector<std::uint32_t> out;
    const auto rr = rps_.query_to_rank(rect);
    if (!rr) {
        return out;
    }
    if (rr->x_lo == rr->x_hi) {
        const std::uint32_t idx = rps_.index_by_x_rank(rr->x_lo);
        const std::uint32_t ry = rps_.rank_points()[idx].ry;
        if (rr->y_lo <= ry && ry <= rr->y_hi) {
            out.push_back(idx);
        }
        if (stats != nullptr) {
            stats->reported += out.size();
        }
        return out;
    }

    const NodeId w = lca(rr->x_lo, rr->x_hi, tree_.depth());
    std::size_t lo = rr->y_lo;
    std::size_t hi = rr->y_hi;
    NodeId v = tree_.root();
    while (v.depth < w.depth) {
        const bool right = ((w.offset >> (w.depth - 1 - v.depth)) & 1) != 0;
        const auto child = map_y_range_to_child(v, right, lo, hi);
        if (!child) {
            return out;
        }
        std::tie(lo, hi) = *child;
        v = right ? v.right() : v.left();
    }

    auto emit = [&](std::size_t, std::size_t leaf) {
        out.push_back(rps_.index_by_x_rank(static_cast<std::uint32_t>(leaf)));
    };
    auto run = [&](bool right, Side side, std::size_t bound) {
        const auto child_range = map_y_range_to_child(w, right, lo, hi);
        if (!child_range) {
            return;
        }
        const NodeId c = right ? w.right() : w.left();
        ThreeSidedStats* call = nullptr;
        if (stats != nullptr) {
            call = &stats->calls.emplace_back();
        }
        report_3sided(tree_, node_rmq(c), c, side, bound, child_range->first, child_range->second, emit, call);
    };
    run(false, Side::LeftOpen, rr->x_lo);
    run(true, Side::RightOpen, rr->x_hi);
    if (stats != nullptr) {
        stats->reported += out.size();
    }
    return out;
}

std::vector<Point> RangeReporter::report(const QueryRect& rect, ReportStats* stats) const {
    const auto idx = report_indices(rect, stats);
    std::vector<Point> out;
    out.reserve(idx.size());
    for (std::uint32_t i : idx) {
        out.push_back(rps_.original()[i]);
    }
    return out;
}

SpaceBreakdown RangeReporter::space() const {
    SpaceBreakdown s;
    std::uint64_t max_coord = 0;
    for (const Point& p : rps_.original()) {
        max_coord = std::max({max_coord, p.x, p.y});
    }
    const auto coord_bits = std::max<std::size_t>(1, static_cast<std::size_t>(std::bit_width(max_coord)));
    s.points = rps_.size() * 2 * coord_bits;
    s.tree = tree_.space_bits();
    for (const auto& level : rmqs_) {
        for (const NodeRmq& r : level) {
            s.rmq += r.max.size_bits() + r.min.size_bits();
        }
    }
    for (const BitVector& bv : navigation_) {
        s.navigation += bv.size_bits();
    }
    return s;
}

void RangeReporter::save(std::ostream& out) const {
    out.write(reporter_magic.data(), static_cast<std::streamsize>(reporter_magic.size()));
    const char mode = rmq_mode_ == RmqMode::Succinct ? 'S' : 'D';
    out.put(mode);
    binio::put_u64(out, rps_.size());
    for (const Point& p : rps_.original()) {
        binio::put_u64(out, p.x);
        binio::put_u64(out, p.y);
    }
    tree_.save(out);
}

RangeReporter RangeReporter::load(std::istream& in, bool parallel_build) {
    binio::expect_magic(in, reporter_magic);
    const int mode = in.get();
    if (mode != 'S' && mode != 'D') {
        throw format_error("reporter dump has an unknown extremum index mode");
    }
    const std::uint64_t n = binio::get_u64(in);
    if (n == 0 || n > (std::uint64_t{1} << 32)) {
        throw format_error("reporter dump has an invalid point count");
    }
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 20)));
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t x = binio::get_u64(in);
        const std::uint64_t y = binio::get_u64(in);
        pts.push_back({x, y});
    }
    RankedPointSet rps(std::move(pts));
    BallTree tree = BallTree::load(in);
    if (tree.leaf_of() != padded_leaf_of(rps)) {
        throw format_error("embedded ball tree does not match the stored points");
    }
    return RangeReporter(std::move(rps), std::move(tree), mode == 'S' ? RmqMode::Succinct : RmqMode::Debug,
                         parallel_build);
}

} // namespace ballvault
