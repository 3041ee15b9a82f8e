#include "ballvault/bitvec.hpp"

#include <bit>

namespace ballvault {

BitVector::BitVector(std::span<const bool> bits) : length_(bits.size()), cells_(cells_for(bits.size()), 0) {
    if (length_ >= (std::size_t{1} << abs_count_bits)) {
        throw build_error("bit vector longer than 2^40 bits");
    }
    encode_into(cells_, 0, length_, [&](std::size_t i) { return bits[i]; });
}

BitVector::BitVector(const std::vector<bool>& bits) : length_(bits.size()), cells_(cells_for(bits.size()), 0) {
    if (length_ >= (std::size_t{1} << abs_count_bits)) {
        throw build_error("bit vector longer than 2^40 bits");
    }
    encode_into(cells_, 0, length_, [&](std::size_t i) { return static_cast<bool>(bits[i]); });
}

BitVector BitVector::from_string(std::string_view bits) {
    std::vector<bool> v;
    v.reserve(bits.size());
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw validation_error("bit string may contain only '0' and '1'");
        }
        v.push_back(c == '1');
    }
    return BitVector(v);
}

std::size_t BitVector::rank1_at(const CellReader& mem, std::size_t base, std::size_t pos) {
    const std::size_t block = pos / block_bits;
    const std::size_t within = pos % block_bits;
    const unsigned word = static_cast<unsigned>(within / cell_bits);
    const unsigned bit = static_cast<unsigned>(within % cell_bits);
    const std::size_t dir_addr = base + block * cells_per_block;
    const cell_t dir = mem(dir_addr);
    std::size_t r = dir & ((cell_t{1} << abs_count_bits) - 1);
    if (word > 0) {
        r += (dir >> (abs_count_bits + 8 * (word - 1))) & 0xFF;
    }
    if (bit > 0) {
        const cell_t payload = mem(dir_addr + 1 + word);
        r += static_cast<std::size_t>(std::popcount(payload & ((cell_t{1} << bit) - 1)));
    }
    return r;
}

std::pair<bool, std::size_t> BitVector::access_rank_at(const CellReader& mem, std::size_t base, std::size_t pos) {
    const std::size_t block = pos / block_bits;
    const std::size_t within = pos % block_bits;
    const unsigned word = static_cast<unsigned>(within / cell_bits);
    const unsigned bit = static_cast<unsigned>(within % cell_bits);
    const std::size_t dir_addr = base + block * cells_per_block;
    const cell_t dir = mem(dir_addr);
    std::size_t r = dir & ((cell_t{1} << abs_count_bits) - 1);
    if (word > 0) {
        r += (dir >> (abs_count_bits + 8 * (word - 1))) & 0xFF;
    }
    const cell_t payload = mem(dir_addr + 1 + word);
    r += static_cast<std::size_t>(std::popcount(payload & ((cell_t{1} << bit) - 1)));
    return {((payload >> bit) & 1) != 0, r};
}

std::size_t BitVector::rank1(std::size_t i) const {
    if (i > length_) {
        throw range_error("rank position " + std::to_string(i) + " beyond length " + std::to_string(length_));
    }
    return rank1_at(CellReader(cells_.data(), cells_.size()), 0, i);
}

bool BitVector::access(std::size_t i) const {
    if (i >= length_) {
        throw range_error("access position " + std::to_string(i) + " beyond length " + std::to_string(length_));
    }
    const std::size_t block = i / block_bits;
    const std::size_t within = i % block_bits;
    const cell_t payload = cells_[block * cells_per_block + 1 + within / cell_bits];
    return ((payload >> (within % cell_bits)) & 1) != 0;
}

std::size_t BitVector::payload_bits() const noexcept { return cells_.size() / cells_per_block * 4 * cell_bits; }

std::size_t BitVector::directory_bits() const noexcept { return cells_.size() / cells_per_block * cell_bits; }

} // namespace ballvault
