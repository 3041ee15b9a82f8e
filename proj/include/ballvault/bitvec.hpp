#pragma once

#include "ballvault/common.hpp"

#include <span>
#include <string_view>
#include <utility>

namespace ballvault {

/// Bit sequence with constant-probe rank.
///
/// Cells are grouped in blocks of five: one directory cell followed by four
/// payload words (256 bits). The directory cell holds the number of set bits
/// before the block in its low 40 bits and, in three 8-bit fields above that,
/// the in-block counts before payload words 1, 2 and 3. A rank therefore
/// reads the directory cell and at most one payload word. One trailing block
/// is always present so that rank1(size()) needs no special case.
///
/// The layout functions are static so that other structures can embed a bit
/// vector inside their own memory image and still get probe traces.
class BitVector {
public:
    static constexpr std::size_t block_bits = 4 * cell_bits;
    static constexpr std::size_t cells_per_block = 5;
    static constexpr unsigned abs_count_bits = 40;

    BitVector() : BitVector(std::span<const bool>{}) {}
    explicit BitVector(std::span<const bool> bits);
    explicit BitVector(const std::vector<bool>& bits);

    /// Parses a string of '0'/'1' characters; anything else is a validation error.
    static BitVector from_string(std::string_view bits);

    std::size_t size() const noexcept { return length_; }
    std::size_t count_ones() const { return rank1(length_); }

    std::size_t rank1(std::size_t i) const;
    std::size_t rank0(std::size_t i) const { return i - rank1(i); }
    bool access(std::size_t i) const;

    const std::vector<cell_t>& cells() const noexcept { return cells_; }
    std::size_t size_bits() const noexcept { return cells_.size() * cell_bits; }
    std::size_t payload_bits() const noexcept;
    std::size_t directory_bits() const noexcept;

    // Embedding interface.
    static std::size_t cells_for(std::size_t length) noexcept {
        return (length / block_bits + 1) * cells_per_block;
    }
    template <class BitSource>
    static void encode_into(std::vector<cell_t>& out, std::size_t base, std::size_t length, BitSource&& bit_at);
    static std::size_t rank1_at(const CellReader& mem, std::size_t base, std::size_t pos);
    /// Bit at `pos` together with rank1(pos); two probes.
    static std::pair<bool, std::size_t> access_rank_at(const CellReader& mem, std::size_t base, std::size_t pos);

private:
    std::size_t length_ = 0;
    std::vector<cell_t> cells_;
};

template <class BitSource>
void BitVector::encode_into(std::vector<cell_t>& out, std::size_t base, std::size_t length, BitSource&& bit_at) {
    const std::size_t blocks = length / block_bits + 1;
    std::uint64_t ones_before = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t dir = base + b * cells_per_block;
        std::uint64_t in_block = 0;
        std::uint64_t directory = ones_before;
        for (unsigned word = 0; word < 4; ++word) {
            if (word > 0) {
                directory |= in_block << (abs_count_bits + 8 * (word - 1));
            }
            cell_t payload = 0;
            const std::size_t first = b * block_bits + word * cell_bits;
            for (unsigned bit = 0; bit < cell_bits && first + bit < length; ++bit) {
                if (bit_at(first + bit)) {
                    payload |= cell_t{1} << bit;
                }
            }
            out[dir + 1 + word] = payload;
            in_block += static_cast<std::uint64_t>(__builtin_popcountll(payload));
        }
        out[dir] = directory;
        ones_before += in_block;
    }
}

} // namespace ballvault
