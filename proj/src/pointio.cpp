#include "ballvault/pointio.hpp"

#include "ballvault/binio.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>

namespace ballvault {

namespace {

constexpr std::string_view points_magic = "PTS1";

// Unbiased draw in [0, bound) that does not depend on the standard library's
// distribution implementation.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
        const std::uint64_t v = rng();
        if (v < limit) {
            return v % bound;
        }
    }
}

std::vector<std::uint64_t> distinct_values(std::size_t n, std::uint64_t universe, std::mt19937_64& rng) {
    std::vector<std::uint64_t> out;
    out.reserve(n);
    if (universe <= 4 * static_cast<std::uint64_t>(n)) {
        std::vector<std::uint64_t> all(static_cast<std::size_t>(universe));
        for (std::size_t i = 0; i < all.size(); ++i) {
            all[i] = i;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = i + static_cast<std::size_t>(draw(rng, all.size() - i));
            std::swap(all[i], all[j]);
            out.push_back(all[i]);
        }
        return out;
    }
    std::unordered_set<std::uint64_t> seen;
    while (out.size() < n) {
        const std::uint64_t v = draw(rng, universe);
        if (seen.insert(v).second) {
            out.push_back(v);
        }
    }
    return out;
}

bool parse_u64(std::string_view s, std::uint64_t& v) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace

void write_points(std::ostream& out, const std::vector<Point>& points, PointFormat format) {
    if (format == PointFormat::Binary) {
        out.write(points_magic.data(), static_cast<std::streamsize>(points_magic.size()));
        for (const Point& p : points) {
            binio::put_u64(out, p.x);
            binio::put_u64(out, p.y);
        }
        return;
    }
    for (const Point& p : points) {
        out << p.x << ' ' << p.y << '\n';
    }
}

std::vector<Point> read_points(std::istream& in) {
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<Point> pts;
    if (data.compare(0, points_magic.size(), points_magic) == 0) {
        const std::size_t body = data.size() - points_magic.size();
        if (body % 16 != 0) {
            throw format_error("binary point file ends inside a coordinate pair");
        }
        std::istringstream bin(data.substr(points_magic.size()));
        for (std::size_t k = 0; k < body / 16; ++k) {
            const std::uint64_t x = binio::get_u64(bin);
            const std::uint64_t y = binio::get_u64(bin);
            pts.push_back({x, y});
        }
        return pts;
    }
    std::istringstream text(data);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(text, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line);
        std::string xs, ys, extra;
        Point p;
        if (!(fields >> xs >> ys) || (fields >> extra) || !parse_u64(xs, p.x) || !parse_u64(ys, p.y)) {
            throw format_error("line " + std::to_string(lineno) + ": expected two unsigned integers");
        }
        pts.push_back(p);
    }
    return pts;
}

void save_points(const std::filesystem::path& path, const std::vector<Point>& points, PointFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw format_error("cannot write " + path.string());
    }
    write_points(out, points, format);
}

std::vector<Point> load_points(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw format_error("cannot read " + path.string());
    }
    return read_points(in);
}

Distribution parse_distribution(std::string_view name) {
    if (name == "uniform") {
        return Distribution::Uniform;
    }
    if (name == "grid-diagonal") {
        return Distribution::GridDiagonal;
    }
    if (name == "clustered") {
        return Distribution::Clustered;
    }
    throw validation_error("unknown distribution '" + std::string(name) +
                           "'; expected uniform | grid-diagonal | clustered");
}

std::vector<Point> generate_points(std::size_t n, std::uint64_t universe, std::uint64_t seed, Distribution dist) {
    if (n < 1) {
        throw validation_error("need at least one point");
    }
    if (universe < n) {
        throw validation_error("universe " + std::to_string(universe) + " is smaller than n=" + std::to_string(n));
    }
    std::mt19937_64 rng(seed);
    std::vector<Point> pts(n);
    switch (dist) {
    case Distribution::Uniform: {
        const auto xs = distinct_values(n, universe, rng);
        const auto ys = distinct_values(n, universe, rng);
        for (std::size_t i = 0; i < n; ++i) {
            pts[i] = {xs[i], ys[i]};
        }
        break;
    }
    case Distribution::GridDiagonal: {
        const std::uint64_t step = universe / n;
        for (std::size_t i = 0; i < n; ++i) {
            pts[i] = {i * step, i * step};
        }
        for (std::size_t i = n; i > 1; --i) {
            std::swap(pts[i - 1], pts[static_cast<std::size_t>(draw(rng, i))]);
        }
        break;
    }
    case Distribution::Clustered: {
        const std::size_t clusters = std::max<std::size_t>(1, n / 64);
        const std::uint64_t spread = std::max<std::uint64_t>(1, universe / (8 * clusters));
        std::vector<Point> centres(clusters);
        for (auto& c : centres) {
            c = {draw(rng, universe), draw(rng, universe)};
        }
        auto jitter = [&](std::uint64_t centre) {
            const std::uint64_t lo = centre >= spread ? centre - spread : 0;
            const std::uint64_t hi = std::min(universe - 1, centre + spread);
            return lo + draw(rng, hi - lo + 1);
        };
        for (auto& p : pts) {
            const Point& c = centres[static_cast<std::size_t>(draw(rng, clusters))];
            const std::uint64_t x = jitter(c.x);
            p = {x, jitter(c.y)};
        }
        break;
    }
    }
    return pts;
}

} // namespace ballvault
