#pragma once

#include "ballvault/common.hpp"

#include <span>
#include <vector>

namespace ballvault {

enum class RmqMode { Debug, Succinct };
enum class RmqDirection { Max, Min };

/// Range extremum index answering by position.
///
/// Debug keeps the values and a sparse table of positions. Succinct keeps
/// only the push/pop sequence of the left-to-right stack construction of the
/// Cartesian tree (one 1 per element, one 0 per pop): the extremum of [l, r]
/// is the element pushed right after the rightmost excess minimum between
/// the pushes of l and r. Ties resolve to the leftmost position in both modes.
class RmqIndex {
public:
    RmqIndex() = default;
    RmqIndex(std::span<const std::uint32_t> values, RmqDirection direction, RmqMode mode);

    std::size_t size() const noexcept { return length_; }
    RmqMode mode() const noexcept { return mode_; }
    RmqDirection direction() const noexcept { return direction_; }

    /// Position of the extremum in [l, r); throws range_error unless l < r <= size().
    std::size_t argextreme(std::size_t l, std::size_t r) const;

    std::size_t size_bits() const noexcept;

private:
    std::size_t debug_query(std::size_t l, std::size_t r) const;
    std::size_t succinct_query(std::size_t l, std::size_t r) const;

    bool better(std::uint32_t a, std::uint32_t b) const noexcept {
        return direction_ == RmqDirection::Max ? a > b : a < b;
    }

    // succinct helpers
    bool bit(std::size_t t) const noexcept { return ((words_[t / 64] >> (t % 64)) & 1) != 0; }
    std::size_t rank1(std::size_t t) const noexcept;
    std::size_t select1(std::size_t i) const noexcept;
    std::int64_t excess(std::size_t t) const noexcept {
        return 2 * static_cast<std::int64_t>(rank1(t)) - static_cast<std::int64_t>(t);
    }
    struct MinAt {
        std::int64_t value;
        std::size_t pos;
    };
    MinAt scan_min(std::size_t a, std::size_t b, std::int64_t start_excess) const noexcept;
    MinAt rightmost_min(std::size_t a, std::size_t b) const noexcept;

    std::size_t length_ = 0;
    RmqDirection direction_ = RmqDirection::Max;
    RmqMode mode_ = RmqMode::Succinct;

    // Debug
    std::vector<std::uint32_t> values_;
    std::vector<std::vector<std::uint32_t>> table_;

    // Succinct
    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
    std::vector<std::uint32_t> rank_dir_;            // ones before each 512-bit superblock
    std::vector<std::uint32_t> select_samples_;      // word holding every 256th one
    std::vector<std::vector<std::int32_t>> block_min_;  // sparse table of per-block excess minima
};

} // namespace ballvault
