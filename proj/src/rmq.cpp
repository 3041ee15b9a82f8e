#include "ballvault/rmq.hpp"

#include <algorithm>
#include <array>
#include <bit>

namespace ballvault {

namespace {

constexpr std::size_t superblock_bits = 512;
constexpr std::size_t select_sample = 256;
constexpr std::size_t min_block = 1024;  // prefix positions per excess-minimum block

struct ByteTable {
    std::array<std::int8_t, 256> delta{};
    std::array<std::int8_t, 256> min_prefix{};  // over prefixes before bits 0..7
    std::array<std::uint8_t, 256> rightmost{};
};

constexpr ByteTable make_byte_table() {
    ByteTable t;
    for (int v = 0; v < 256; ++v) {
        int e = 0;
        int best = 0;
        int at = 0;
        for (int k = 0; k < 8; ++k) {
            if (e <= best) {
                best = e;
                at = k;
            }
            e += ((v >> k) & 1) ? 1 : -1;
        }
        t.delta[static_cast<std::size_t>(v)] = static_cast<std::int8_t>(e);
        t.min_prefix[static_cast<std::size_t>(v)] = static_cast<std::int8_t>(best);
        t.rightmost[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(at);
    }
    return t;
}

constexpr ByteTable byte_table = make_byte_table();

unsigned floor_log2(std::size_t x) { return static_cast<unsigned>(std::bit_width(x)) - 1; }

} // namespace

RmqIndex::RmqIndex(std::span<const std::uint32_t> values, RmqDirection direction, RmqMode mode)
    : length_(values.size()), direction_(direction), mode_(mode) {
    if (length_ == 0) {
        throw validation_error("range extremum index needs at least one value");
    }
    if (mode_ == RmqMode::Debug) {
        values_.assign(values.begin(), values.end());
        table_.emplace_back(length_);
        for (std::size_t i = 0; i < length_; ++i) {
            table_[0][i] = static_cast<std::uint32_t>(i);
        }
        for (std::size_t k = 1; (std::size_t{1} << k) <= length_; ++k) {
            const std::size_t span = std::size_t{1} << k;
            const auto& prev = table_[k - 1];
            std::vector<std::uint32_t> row(length_ - span + 1);
            for (std::size_t i = 0; i + span <= length_; ++i) {
                const std::uint32_t a = prev[i];
                const std::uint32_t b = prev[i + span / 2];
                row[i] = better(values_[b], values_[a]) ? b : a;
            }
            table_.push_back(std::move(row));
        }
        return;
    }

    // Stack construction; equal values are never popped, which keeps the
    // leftmost of a tie at the bottom.
    std::vector<bool> seq;
    seq.reserve(2 * length_);
    std::vector<std::uint32_t> stack;
    for (std::size_t i = 0; i < length_; ++i) {
        while (!stack.empty() && better(values[i], stack.back())) {
            stack.pop_back();
            seq.push_back(false);
        }
        stack.push_back(values[i]);
        seq.push_back(true);
    }
    bits_ = seq.size();
    words_.assign((bits_ + 63) / 64 + 1, 0);
    for (std::size_t t = 0; t < bits_; ++t) {
        if (seq[t]) {
            words_[t / 64] |= std::uint64_t{1} << (t % 64);
        }
    }

    rank_dir_.assign(bits_ / superblock_bits + 2, 0);
    std::size_t ones = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if (w % (superblock_bits / 64) == 0) {
            rank_dir_[w / (superblock_bits / 64)] = static_cast<std::uint32_t>(ones);
        }
        const std::size_t before = ones;
        ones += static_cast<std::size_t>(std::popcount(words_[w]));
        for (std::size_t s = (before + select_sample - 1) / select_sample * select_sample; s < ones;
             s += select_sample) {
            select_samples_.push_back(static_cast<std::uint32_t>(w));
        }
    }

    const std::size_t blocks = bits_ / min_block + 1;
    std::vector<std::int32_t> level0(blocks);
    std::int64_t e = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t lo = b * min_block;
        const std::size_t hi = std::min(bits_, lo + min_block - 1);
        level0[b] = static_cast<std::int32_t>(scan_min(lo, hi, e).value);
        for (std::size_t t = lo; t < std::min(bits_, lo + min_block); ++t) {
            e += bit(t) ? 1 : -1;
        }
    }
    block_min_.push_back(std::move(level0));
    for (std::size_t k = 1; (std::size_t{1} << k) <= blocks; ++k) {
        const std::size_t span = std::size_t{1} << k;
        const auto& prev = block_min_[k - 1];
        std::vector<std::int32_t> row(blocks - span + 1);
        for (std::size_t i = 0; i + span <= blocks; ++i) {
            row[i] = std::min(prev[i], prev[i + span / 2]);
        }
        block_min_.push_back(std::move(row));
    }
}

std::size_t RmqIndex::argextreme(std::size_t l, std::size_t r) const {
    if (l >= r || r > length_) {
        throw range_error("extremum range [" + std::to_string(l) + ", " + std::to_string(r) +
                          ") invalid for length " + std::to_string(length_));
    }
    if (r - l == 1) {
        return l;
    }
    return mode_ == RmqMode::Debug ? debug_query(l, r) : succinct_query(l, r);
}

std::size_t RmqIndex::debug_query(std::size_t l, std::size_t r) const {
    const unsigned k = floor_log2(r - l);
    const std::uint32_t a = table_[k][l];
    const std::uint32_t b = table_[k][r - (std::size_t{1} << k)];
    return better(values_[b], values_[a]) ? b : a;
}

std::size_t RmqIndex::rank1(std::size_t t) const noexcept {
    const std::size_t sb = t / superblock_bits;
    std::size_t r = rank_dir_[sb];
    const std::size_t last_word = t / 64;
    for (std::size_t w = sb * (superblock_bits / 64); w < last_word; ++w) {
        r += static_cast<std::size_t>(std::popcount(words_[w]));
    }
    if (t % 64 != 0) {
        r += static_cast<std::size_t>(std::popcount(words_[last_word] & ((std::uint64_t{1} << (t % 64)) - 1)));
    }
    return r;
}

std::size_t RmqIndex::select1(std::size_t i) const noexcept {
    std::size_t w = select_samples_[i / select_sample];
    std::size_t count = rank1(w * 64);
    for (;;) {
        const auto c = static_cast<std::size_t>(std::popcount(words_[w]));
        if (count + c > i) {
            break;
        }
        count += c;
        ++w;
    }
    std::uint64_t word = words_[w];
    for (std::size_t skip = i - count; skip > 0; --skip) {
        word &= word - 1;
    }
    return w * 64 + static_cast<std::size_t>(std::countr_zero(word));
}

// Rightmost minimum of the excess over prefix positions [a, b], given the
// excess at a.
RmqIndex::MinAt RmqIndex::scan_min(std::size_t a, std::size_t b, std::int64_t start_excess) const noexcept {
    std::int64_t e = start_excess;
    MinAt best{e, a};
    std::size_t t = a;
    while (t <= b) {
        if (t % 8 == 0 && t + 7 <= b) {
            const auto byte = static_cast<std::uint8_t>(words_[t / 64] >> (t % 64));
            const std::int64_t m = e + byte_table.min_prefix[byte];
            if (m <= best.value) {
                best = {m, t + byte_table.rightmost[byte]};
            }
            e += byte_table.delta[byte];
            t += 8;
            continue;
        }
        if (e <= best.value) {
            best = {e, t};
        }
        if (t < bits_) {
            e += bit(t) ? 1 : -1;
        }
        ++t;
    }
    return best;
}

RmqIndex::MinAt RmqIndex::rightmost_min(std::size_t a, std::size_t b) const noexcept {
    const std::size_t ba = a / min_block;
    const std::size_t bb = b / min_block;
    if (bb <= ba + 1) {
        return scan_min(a, b, excess(a));
    }
    const MinAt left = scan_min(a, (ba + 1) * min_block - 1, excess(a));
    const std::size_t right_start = bb * min_block;
    const MinAt right = scan_min(right_start, b, excess(right_start));
    const std::size_t lo = ba + 1;
    const std::size_t hi = bb - 1;
    const unsigned k = floor_log2(hi - lo + 1);
    const std::int64_t middle =
        std::min(block_min_[k][lo], block_min_[k][hi + 1 - (std::size_t{1} << k)]);

    const std::int64_t best = std::min({left.value, middle, right.value});
    if (right.value == best) {
        return right;
    }
    if (middle == best) {
        std::size_t blk = hi;
        while (block_min_[0][blk] != best) {
            --blk;
        }
        const std::size_t start = blk * min_block;
        return scan_min(start, start + min_block - 1, excess(start));
    }
    return left;
}

std::size_t RmqIndex::succinct_query(std::size_t l, std::size_t r) const {
    const std::size_t a = select1(l);
    const std::size_t b = select1(r - 1);
    const MinAt m = rightmost_min(a, b);
    // The bit at the minimum is the push of the answer.
    return rank1(m.pos);
}

std::size_t RmqIndex::size_bits() const noexcept {
    if (mode_ == RmqMode::Debug) {
        std::size_t entries = values_.size();
        for (const auto& row : table_) {
            entries += row.size();
        }
        return entries * 32;
    }
    std::size_t bits = words_.size() * 64 + rank_dir_.size() * 32 + select_samples_.size() * 32;
    for (const auto& row : block_min_) {
        bits += row.size() * 32;
    }
    return bits;
}

} // namespace ballvault
