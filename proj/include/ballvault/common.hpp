#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef BALLVAULT_CELL_BITS
#define BALLVAULT_CELL_BITS 64
#endif

namespace ballvault {

// Width of one memory cell in the probe model. The rank directory layout
// packs a 40-bit cumulative count and three 8-bit in-block counts into one
// cell, so only 64-bit cells are supported.
inline constexpr unsigned cell_bits = BALLVAULT_CELL_BITS;
static_assert(cell_bits == 64, "ballvault memory images use 64-bit cells");

using cell_t = std::uint64_t;

struct range_error : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct build_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Malformed or truncated input files.
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ordered cell addresses read by one query.
struct ProbeTrace {
    std::vector<std::size_t> addresses;

    std::size_t size() const noexcept { return addresses.size(); }
    bool empty() const noexcept { return addresses.empty(); }
};

// Read access to a flat cell array. When a trace is attached every read is
// appended to it, including repeated reads of the same cell.
class CellReader {
public:
    CellReader(const cell_t* cells, std::size_t count, ProbeTrace* trace = nullptr) noexcept
        : cells_(cells), count_(count), trace_(trace) {}

    cell_t operator()(std::size_t addr) const {
        if (trace_ != nullptr) {
            trace_->addresses.push_back(addr);
        }
        return cells_[addr];
    }

    std::size_t size() const noexcept { return count_; }
    bool tracing() const noexcept { return trace_ != nullptr; }

private:
    const cell_t* cells_;
    std::size_t count_;
    ProbeTrace* trace_;
};

constexpr unsigned ceil_log2(std::uint64_t x) noexcept {
    unsigned r = 0;
    while ((std::uint64_t{1} << r) < x) {
        ++r;
    }
    return r;
}

constexpr bool is_pow2(std::uint64_t x) noexcept { return x != 0 && (x & (x - 1)) == 0; }

// Reads `width` bits starting at absolute bit offset `bit` of a cell region
// beginning at cell `base`. Touches one cell, or two when the field straddles.
inline std::uint64_t read_bits(const CellReader& mem, std::size_t base, std::uint64_t bit, unsigned width) {
    if (width == 0) {
        return 0;
    }
    const std::size_t word = base + static_cast<std::size_t>(bit / cell_bits);
    const unsigned shift = static_cast<unsigned>(bit % cell_bits);
    const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
    std::uint64_t v = mem(word) >> shift;
    if (shift + width > cell_bits) {
        v |= mem(word + 1) << (cell_bits - shift);
    }
    return v & mask;
}

inline void write_bits(std::vector<cell_t>& cells, std::size_t base, std::uint64_t bit, unsigned width,
                       std::uint64_t value) {
    if (width == 0) {
        return;
    }
    const std::size_t word = base + static_cast<std::size_t>(bit / cell_bits);
    const unsigned shift = static_cast<unsigned>(bit % cell_bits);
    const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
    value &= mask;
    cells[word] = (cells[word] & ~(mask << shift)) | (value << shift);
    if (shift + width > cell_bits) {
        const unsigned spill = cell_bits - shift;
        const std::uint64_t hi_mask = mask >> spill;
        cells[word + 1] = (cells[word + 1] & ~hi_mask) | (value >> spill);
    }
}

} // namespace ballvault
