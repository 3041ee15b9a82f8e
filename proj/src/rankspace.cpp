#include "ballvault/rankspace.hpp"

#include <algorithm>
#include <numeric>

namespace ballvault {

void QueryRect::validate() const {
    if (x0 > x1 || y0 > y1) {
        throw validation_error("malformed rectangle: need x0 <= x1 and y0 <= y1");
    }
}

RankedPointSet::RankedPointSet(std::vector<Point> points) : original_(std::move(points)) {
    const std::size_t n = original_.size();
    if (n == 0) {
        throw validation_error("rank reduction needs at least one point");
    }
    if (n > (std::size_t{1} << 32)) {
        throw validation_error("rank reduction supports at most 2^32 points");
    }
    std::vector<std::uint32_t> order(n);
    ranks_.resize(n);

    // stable sorts give the (coordinate, input index) tie-break
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return original_[a].x < original_[b].x; });
    sorted_x_.resize(n);
    by_x_rank_ = order;
    for (std::size_t r = 0; r < n; ++r) {
        ranks_[order[r]].rx = static_cast<std::uint32_t>(r);
        sorted_x_[r] = original_[order[r]].x;
    }

    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return original_[a].y < original_[b].y; });
    sorted_y_.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        ranks_[order[r]].ry = static_cast<std::uint32_t>(r);
        sorted_y_[r] = original_[order[r]].y;
    }
}

std::optional<RankRect> RankedPointSet::query_to_rank(const QueryRect& rect) const {
    rect.validate();
    // successor of (lo, -inf) and predecessor of (hi, +inf)
    auto axis = [](const std::vector<std::uint64_t>& sorted, std::uint64_t lo,
                   std::uint64_t hi) -> std::optional<std::pair<std::uint32_t, std::uint32_t>> {
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), lo);
        const auto last = std::upper_bound(sorted.begin(), sorted.end(), hi);
        if (first >= last) {
            return std::nullopt;
        }
        return std::pair{static_cast<std::uint32_t>(first - sorted.begin()),
                         static_cast<std::uint32_t>(last - sorted.begin() - 1)};
    };
    const auto xs = axis(sorted_x_, rect.x0, rect.x1);
    if (!xs) {
        return std::nullopt;
    }
    const auto ys = axis(sorted_y_, rect.y0, rect.y1);
    if (!ys) {
        return std::nullopt;
    }
    return RankRect{xs->first, xs->second, ys->first, ys->second};
}

} // namespace ballvault
