#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballvault/pointio.hpp"

#include <algorithm>
#include <set>
#include <sstream>

using namespace ballvault;

namespace {

std::vector<Point> round_trip(const std::vector<Point>& pts, PointFormat f) {
    std::stringstream ss;
    write_points(ss, pts, f);
    return read_points(ss);
}

} // namespace

TEST_CASE("text and binary formats round trip") {
    const std::vector<Point> pts{{0, 0}, {18446744073709551615ull, 7}, {3, 3}, {3, 3}};
    CHECK(round_trip(pts, PointFormat::Text) == pts);
    CHECK(round_trip(pts, PointFormat::Binary) == pts);
    CHECK(round_trip({}, PointFormat::Binary).empty());
}

TEST_CASE("text parsing skips comments and blank lines") {
    std::istringstream in("# header\n\n1 2\r\n  3 4\n");
    CHECK(read_points(in) == std::vector<Point>{{1, 2}, {3, 4}});
}

TEST_CASE("malformed input is a format error") {
    for (const char* bad : {"1\n", "1 2 3\n", "1 -2\n", "a b\n", "1 99999999999999999999\n"}) {
        std::istringstream in(bad);
        CHECK_THROWS_AS(read_points(in), format_error);
    }
    std::stringstream bin;
    write_points(bin, {{1, 2}}, PointFormat::Binary);
    std::string data = bin.str();
    data.pop_back();
    std::istringstream cut(data);
    CHECK_THROWS_AS(read_points(cut), format_error);
}

TEST_CASE("binary layout is magic followed by little-endian pairs") {
    std::stringstream ss;
    write_points(ss, {{0x0102, 0x03}}, PointFormat::Binary);
    const std::string s = ss.str();
    REQUIRE(s.size() == 4 + 16);
    CHECK(s.substr(0, 4) == "PTS1");
    CHECK(static_cast<unsigned char>(s[4]) == 0x02);
    CHECK(static_cast<unsigned char>(s[5]) == 0x01);
    CHECK(static_cast<unsigned char>(s[12]) == 0x03);
}

TEST_CASE("generator respects bounds and is deterministic") {
    for (auto dist : {Distribution::Uniform, Distribution::GridDiagonal, Distribution::Clustered}) {
        for (std::uint64_t universe : {1000ull, 1500ull, 1ull << 40}) {
            const auto a = generate_points(1000, universe, 9, dist);
            CHECK(a.size() == 1000);
            CHECK(a == generate_points(1000, universe, 9, dist));
            for (const auto& p : a) {
                CHECK(p.x < universe);
                CHECK(p.y < universe);
            }
        }
    }
    CHECK(generate_points(1, 16, 5, Distribution::Uniform).size() == 1);
    CHECK(generate_points(50, 1 << 20, 1, Distribution::Uniform) != generate_points(50, 1 << 20, 2, Distribution::Uniform));
}

TEST_CASE("uniform points have distinct coordinates on each axis") {
    for (std::uint64_t universe : {500ull, 1ull << 32}) {
        const auto pts = generate_points(500, universe, 3, Distribution::Uniform);
        std::set<std::uint64_t> xs, ys;
        for (const auto& p : pts) {
            xs.insert(p.x);
            ys.insert(p.y);
        }
        CHECK(xs.size() == 500);
        CHECK(ys.size() == 500);
    }
}

TEST_CASE("grid-diagonal is a shuffled diagonal") {
    auto pts = generate_points(8, 80, 4, Distribution::GridDiagonal);
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i] == Point{i * 10, i * 10});
    }
}

TEST_CASE("generator preconditions") {
    CHECK_THROWS_AS(generate_points(0, 16, 1, Distribution::Uniform), validation_error);
    CHECK_THROWS_AS(generate_points(10, 9, 1, Distribution::Uniform), validation_error);
    CHECK_THROWS_AS(parse_distribution("gaussian"), validation_error);
}
