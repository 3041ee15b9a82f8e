#include "ballvault/balltree.hpp"

#include "ballvault/binio.hpp"
#include "ballvault/bitvec.hpp"
#include "ballvault/levels.hpp"

#include <algorithm>
#include <bit>

namespace ballvault {

namespace {

constexpr std::string_view tree_magic = "BALLV1";

std::size_t cells_for_bits(std::size_t bits) { return (bits + cell_bits - 1) / cell_bits; }

unsigned counter_width(std::size_t n) {
    const auto need = static_cast<unsigned>(std::bit_width(n));
    for (unsigned w : {8u, 16u, 32u}) {
        if (need <= w) {
            return w;
        }
    }
    return 64;
}

// Streams cells of one region in increasing address order, probing each once.
class SequentialCells {
public:
    SequentialCells(const CellReader& mem, std::size_t base, std::size_t first, std::size_t last,
                    std::vector<cell_t>& buf)
        : first_(first), buf_(buf) {
        buf_.clear();
        for (std::size_t c = first; c <= last; ++c) {
            buf_.push_back(mem(base + c));
        }
    }

    std::uint64_t bits(std::uint64_t bit, unsigned width) const {
        const std::size_t word = static_cast<std::size_t>(bit / cell_bits) - first_;
        const unsigned shift = static_cast<unsigned>(bit % cell_bits);
        const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
        std::uint64_t v = buf_[word] >> shift;
        if (shift + width > cell_bits) {
            v |= buf_[word + 1] << (cell_bits - shift);
        }
        return v & mask;
    }

private:
    std::size_t first_;
    std::vector<cell_t>& buf_;
};

} // namespace

TreeLayout TreeLayout::compute(std::size_t n, unsigned depth, const Strategy& strategy) {
    TreeLayout layout;
    layout.levels.resize(depth);
    layout.counter_bits = counter_width(n);
    std::size_t next = 0;
    for (unsigned d = 0; d < depth; ++d) {
        LevelRegion& r = layout.levels[d];
        auto directions = [&] {
            r.directions = next;
            next += BitVector::cells_for(n);
        };
        auto answers = [&] {
            r.answers = next;
            next += cells_for_bits(n * depth);
        };
        switch (strategy.kind) {
        case StrategyKind::Eager:
            answers();
            break;
        case StrategyKind::BitWalk:
            directions();
            break;
        case StrategyKind::Marked:
            if (d % strategy.stride == 0) {
                answers();
            } else {
                directions();
            }
            break;
        case StrategyKind::Chunked: {
            r.window = std::min(strategy.delta, depth - d);
            r.symbols = next;
            next += cells_for_bits(n * r.window);
            r.counters = next;
            const std::size_t blocks = (n + strategy.block - 1) / strategy.block;
            next += cells_for_bits((blocks << r.window) * layout.counter_bits);
            break;
        }
        }
    }
    layout.total_cells = std::max<std::size_t>(next, 1);
    return layout;
}

void check_permutation(std::span<const std::uint32_t> perm) {
    std::vector<bool> seen(perm.size(), false);
    for (std::uint32_t v : perm) {
        if (v >= perm.size() || seen[v]) {
            throw validation_error("leaf assignment is not a permutation of [0, n)");
        }
        seen[v] = true;
    }
}

BallTree::BallTree(std::span<const std::uint32_t> leaf_of, Strategy strategy, bool parallel_build)
    : n_(leaf_of.size()), strategy_(strategy), leaf_of_(leaf_of.begin(), leaf_of.end()) {
    if (!is_pow2(n_)) {
        throw build_error("ball tree needs a power-of-two leaf count, got " + std::to_string(n_));
    }
    if (n_ > (std::size_t{1} << 32)) {
        throw build_error("ball tree supports at most 2^32 leaves");
    }
    check_permutation(leaf_of);
    depth_ = ceil_log2(n_);
    strategy_.validate(depth_);
    layout_ = TreeLayout::compute(n_, depth_, strategy_);
    memory_.assign(layout_.total_cells, 0);

    const unsigned L = depth_;
    levels::sweep(leaf_of, L, parallel_build, [&](unsigned d, std::span<const std::uint32_t> seq) {
        if (d == L) {
            return;
        }
        const LevelRegion& r = layout_.levels[d];
        if (r.directions != LevelRegion::npos) {
            BitVector::encode_into(memory_, r.directions, n_,
                                   [&](std::size_t p) { return levels::direction(seq[p], L, d); });
        }
        if (r.answers != LevelRegion::npos) {
            for (std::size_t p = 0; p < n_; ++p) {
                write_bits(memory_, r.answers, std::uint64_t{p} * L, L, seq[p]);
            }
        }
        if (r.symbols != LevelRegion::npos) {
            const unsigned k = r.window;
            const std::uint32_t mask = (std::uint32_t{1} << k) - 1;
            const std::size_t alphabet = std::size_t{1} << k;
            std::vector<std::uint64_t> running(alphabet, 0);
            for (std::size_t p = 0; p < n_; ++p) {
                if (p % strategy_.block == 0) {
                    const std::size_t b = p / strategy_.block;
                    for (std::size_t s = 0; s < alphabet; ++s) {
                        write_bits(memory_, r.counters, (b * alphabet + s) * layout_.counter_bits,
                                   layout_.counter_bits, running[s]);
                    }
                }
                const std::uint32_t sym = (seq[p] >> (L - d - k)) & mask;
                write_bits(memory_, r.symbols, std::uint64_t{p} * k, k, sym);
                ++running[sym];
            }
        }
    });
}

void BallTree::check_query(NodeId v, std::size_t i) const {
    if (v.depth > depth_ || v.offset >= (std::size_t{1} << v.depth)) {
        throw range_error("node (" + std::to_string(v.depth) + ", " + std::to_string(v.offset) +
                          ") outside a tree of depth " + std::to_string(depth_));
    }
    if (i >= list_length(v)) {
        throw range_error("ball index " + std::to_string(i) + " outside a list of length " +
                          std::to_string(list_length(v)));
    }
}

std::size_t BallTree::run_query(const CellReader& mem, NodeId v, std::size_t i) const {
    const unsigned L = depth_;
    unsigned d = v.depth;
    std::size_t o = v.offset;
    std::size_t idx = i;

    auto walk_step = [&](const LevelRegion& r) {
        const std::size_t seg = n_ >> d;
        const std::size_t pos = o * seg + idx;
        const std::size_t half = seg / 2;
        const auto [bit, ones] = BitVector::access_rank_at(mem, r.directions, pos);
        if (bit) {
            idx = ones - o * half;
            o = 2 * o + 1;
        } else {
            idx = (pos - ones) - o * half;
            o = 2 * o;
        }
        ++d;
        if (idx >= (n_ >> d)) {
            throw format_error("ball tree memory is inconsistent");
        }
    };
    auto stored_answer = [&](const LevelRegion& r) {
        const std::size_t pos = o * (n_ >> d) + idx;
        return static_cast<std::size_t>(read_bits(mem, r.answers, std::uint64_t{pos} * L, L));
    };

    switch (strategy_.kind) {
    case StrategyKind::Eager:
        if (d == L) {
            return o;
        }
        return stored_answer(layout_.levels[d]);
    case StrategyKind::BitWalk:
        while (d < L) {
            walk_step(layout_.levels[d]);
        }
        return o;
    case StrategyKind::Marked:
        while (d < L) {
            const LevelRegion& r = layout_.levels[d];
            if (r.answers != LevelRegion::npos) {
                return stored_answer(r);
            }
            walk_step(r);
        }
        return o;
    case StrategyKind::Chunked: {
        thread_local std::vector<cell_t> buf;
        const std::size_t block = strategy_.block;
        while (d < L) {
            const LevelRegion& r = layout_.levels[d];
            const unsigned k = r.window;
            const std::size_t pos = o * (n_ >> d) + idx;
            const std::size_t block_start = pos / block * block;
            const std::uint64_t first_bit = std::uint64_t{block_start} * k;
            const std::uint64_t end_bit = std::uint64_t{pos + 1} * k;
            SequentialCells scan(mem, r.symbols, static_cast<std::size_t>(first_bit / cell_bits),
                                 static_cast<std::size_t>((end_bit - 1) / cell_bits), buf);
            const auto sym = static_cast<std::size_t>(scan.bits(std::uint64_t{pos} * k, k));
            std::size_t before = 0;
            for (std::size_t p = block_start; p < pos; ++p) {
                before += scan.bits(std::uint64_t{p} * k, k) == sym ? 1 : 0;
            }
            const std::size_t alphabet = std::size_t{1} << k;
            const auto cumulative = static_cast<std::size_t>(
                read_bits(mem, r.counters, ((pos / block) * alphabet + sym) * layout_.counter_bits,
                          layout_.counter_bits));
            // Every node at depth d + k holds exactly n >> (d + k) balls, so
            // the count of `sym` before node o's segment is o times that.
            idx = cumulative + before - o * (n_ >> (d + k));
            o = (o << k) | sym;
            d += k;
            if (idx >= (n_ >> d)) {
                throw format_error("ball tree memory is inconsistent");
            }
        }
        return o;
    }
    }
    return o;
}

std::size_t BallTree::query(NodeId v, std::size_t i) const {
    check_query(v, i);
    return run_query(CellReader(memory_.data(), memory_.size()), v, i);
}

std::pair<std::size_t, ProbeTrace> BallTree::query_traced(NodeId v, std::size_t i) const {
    check_query(v, i);
    ProbeTrace trace;
    const std::size_t leaf = run_query(CellReader(memory_.data(), memory_.size(), &trace), v, i);
    return {leaf, std::move(trace)};
}

void BallTree::save(std::ostream& out) const {
    out.write(tree_magic.data(), static_cast<std::streamsize>(tree_magic.size()));
    binio::put_u64(out, n_);
    binio::put_string(out, strategy_.to_string());
    binio::put_u64(out, memory_.size());
    for (cell_t c : memory_) {
        binio::put_u64(out, c);
    }
}

BallTree BallTree::load(std::istream& in) {
    binio::expect_magic(in, tree_magic);
    BallTree t;
    t.n_ = binio::get_u64(in);
    if (!is_pow2(t.n_) || t.n_ > (std::size_t{1} << 32)) {
        throw format_error("ball tree dump has an invalid leaf count");
    }
    t.depth_ = ceil_log2(t.n_);
    try {
        t.strategy_ = Strategy::parse(binio::get_string(in));
        t.strategy_.validate(t.depth_);
    } catch (const validation_error& e) {
        throw format_error(std::string("ball tree dump: ") + e.what());
    }
    t.layout_ = TreeLayout::compute(t.n_, t.depth_, t.strategy_);
    const std::uint64_t cells = binio::get_u64(in);
    if (cells != t.layout_.total_cells) {
        throw format_error("ball tree dump cell count does not match its strategy layout");
    }
    t.memory_.resize(cells);
    for (auto& c : t.memory_) {
        c = binio::get_u64(in);
    }
    t.leaf_of_.resize(t.n_);
    for (std::size_t b = 0; b < t.n_; ++b) {
        const std::size_t leaf = t.run_query(CellReader(t.memory_.data(), t.memory_.size()), t.root(), b);
        if (leaf >= t.n_) {
            throw format_error("ball tree dump decodes to an out-of-range leaf");
        }
        t.leaf_of_[b] = static_cast<std::uint32_t>(leaf);
    }
    try {
        check_permutation(t.leaf_of_);
    } catch (const validation_error&) {
        throw format_error("ball tree dump does not decode to a permutation");
    }
    return t;
}

std::size_t naive_track(std::span<const std::uint32_t> leaf_of, NodeId v, std::size_t i) {
    const std::size_t n = leaf_of.size();
    const unsigned L = ceil_log2(n);
    if (v.depth > L || v.offset >= (std::size_t{1} << v.depth)) {
        throw range_error("node outside the tree");
    }
    std::vector<std::uint32_t> list;
    for (std::uint32_t leaf : leaf_of) {
        if ((leaf >> (L - v.depth)) == v.offset) {
            list.push_back(leaf);
        }
    }
    if (i >= list.size()) {
        throw range_error("ball index outside the node's list");
    }
    return list[i];
}

} // namespace ballvault
