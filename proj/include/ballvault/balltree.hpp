#pragma once

#include "ballvault/common.hpp"
#include "ballvault/strategy.hpp"

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace ballvault {

/// A node of the complete binary tree: `offset` counts nodes left to right
/// within level `depth` (the root is {0, 0}).
struct NodeId {
    unsigned depth = 0;
    std::size_t offset = 0;

    NodeId left() const { return {depth + 1, offset * 2}; }
    NodeId right() const { return {depth + 1, offset * 2 + 1}; }

    friend bool operator==(const NodeId&, const NodeId&) = default;
};

/// Where one level's data lives in the cell array.
struct LevelRegion {
    std::size_t directions = npos;  // BitVector over the level sequence
    std::size_t answers = npos;     // packed lg n-bit leaf answers
    std::size_t symbols = npos;     // packed path symbols (Chunked)
    std::size_t counters = npos;    // cumulative symbol counts per block (Chunked)
    unsigned window = 0;            // path bits per symbol at this level (Chunked)

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct TreeLayout {
    std::vector<LevelRegion> levels;
    std::size_t total_cells = 0;
    unsigned counter_bits = 0;

    static TreeLayout compute(std::size_t n, unsigned depth, const Strategy& strategy);
};

/// Ball-inheritance structure over a complete binary tree with n leaves.
///
/// The root's list orders ball b before ball b+1 and ball b reaches leaf
/// leaf_of[b]. Every node's list keeps the root's relative order. All
/// strategy data lives in one flat cell array laid out level-major then
/// ball-minor, so probe traces are reproducible cell addresses.
///
/// Queries at leaf depth answer the leaf itself without reading memory.
class BallTree {
public:
    /// Throws build_error when leaf_of.size() is not a power of two and
    /// validation_error when leaf_of is not a permutation or the strategy
    /// parameters do not fit.
    BallTree(std::span<const std::uint32_t> leaf_of, Strategy strategy, bool parallel_build = true);

    std::size_t size() const noexcept { return n_; }
    unsigned depth() const noexcept { return depth_; }
    const Strategy& strategy() const noexcept { return strategy_; }
    NodeId root() const noexcept { return {0, 0}; }

    /// Leaf reached by ball b of the root list.
    const std::vector<std::uint32_t>& leaf_of() const noexcept { return leaf_of_; }

    std::size_t list_length(NodeId v) const noexcept { return n_ >> v.depth; }

    std::size_t query(NodeId v, std::size_t i) const;
    std::pair<std::size_t, ProbeTrace> query_traced(NodeId v, std::size_t i) const;

    std::size_t space_bits() const noexcept { return memory_.size() * cell_bits; }
    std::size_t cell_count() const noexcept { return memory_.size(); }
    const std::vector<cell_t>& memory() const noexcept { return memory_; }
    const TreeLayout& layout() const noexcept { return layout_; }

    /// Versioned little-endian dump: "BALLV1", n, strategy descriptor, cells.
    void save(std::ostream& out) const;
    static BallTree load(std::istream& in);

private:
    BallTree() = default;

    std::size_t run_query(const CellReader& mem, NodeId v, std::size_t i) const;
    void check_query(NodeId v, std::size_t i) const;

    std::size_t n_ = 0;
    unsigned depth_ = 0;
    Strategy strategy_;
    std::vector<std::uint32_t> leaf_of_;
    TreeLayout layout_;
    std::vector<cell_t> memory_;
};

/// Test oracle: materializes v's ball list from leaf_of and returns the leaf
/// reached by its i-th ball.
std::size_t naive_track(std::span<const std::uint32_t> leaf_of, NodeId v, std::size_t i);

/// Throws validation_error unless `perm` is a permutation of [0, perm.size()).
void check_permutation(std::span<const std::uint32_t> perm);

} // namespace ballvault
