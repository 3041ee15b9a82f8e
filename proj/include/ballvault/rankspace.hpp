#pragma once

#include "ballvault/common.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ballvault {

struct Point {
    std::uint64_t x = 0;
    std::uint64_t y = 0;

    friend bool operator==(const Point&, const Point&) = default;
    friend auto operator<=>(const Point&, const Point&) = default;
};

/// Axis-aligned query rectangle with inclusive bounds.
struct QueryRect {
    std::uint64_t x0 = 0;
    std::uint64_t x1 = 0;
    std::uint64_t y0 = 0;
    std::uint64_t y1 = 0;

    bool contains(const Point& p) const noexcept { return x0 <= p.x && p.x <= x1 && y0 <= p.y && p.y <= y1; }
    void validate() const;
};

struct RankPoint {
    std::uint32_t rx = 0;
    std::uint32_t ry = 0;

    friend bool operator==(const RankPoint&, const RankPoint&) = default;
};

/// Inclusive rank ranges on both axes.
struct RankRect {
    std::uint32_t x_lo = 0;
    std::uint32_t x_hi = 0;
    std::uint32_t y_lo = 0;
    std::uint32_t y_hi = 0;

    friend bool operator==(const RankRect&, const RankRect&) = default;
};

/// Points together with their rank-space images.
///
/// Ranks order coordinates by (value, input position), so duplicates get
/// distinct ranks and the image is a permutation matrix.
class RankedPointSet {
public:
    /// Throws validation_error on an empty input.
    explicit RankedPointSet(std::vector<Point> points);

    std::size_t size() const noexcept { return original_.size(); }
    const std::vector<Point>& original() const noexcept { return original_; }
    const std::vector<std::uint64_t>& sorted_x() const noexcept { return sorted_x_; }
    const std::vector<std::uint64_t>& sorted_y() const noexcept { return sorted_y_; }
    const std::vector<RankPoint>& rank_points() const noexcept { return ranks_; }

    /// Input index of the point with the given x-rank.
    std::uint32_t index_by_x_rank(std::uint32_t rx) const { return by_x_rank_[rx]; }

    /// Rank rectangle containing exactly the images of the points inside
    /// `rect`, or nullopt when no point can lie inside.
    std::optional<RankRect> query_to_rank(const QueryRect& rect) const;

private:
    std::vector<Point> original_;
    std::vector<std::uint64_t> sorted_x_;
    std::vector<std::uint64_t> sorted_y_;
    std::vector<RankPoint> ranks_;
    std::vector<std::uint32_t> by_x_rank_;
};

} // namespace ballvault
