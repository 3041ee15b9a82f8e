#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballvault/audit.hpp"
#include "ballvault/bitvec.hpp"
#include "scatter_oracle.hpp"
#include "test_util.hpp"

#include <omp.h>

#include <cmath>

using namespace ballvault;

namespace {

std::vector<unsigned> divisors(unsigned L) {
    std::vector<unsigned> out;
    for (unsigned y = 1; y <= L; ++y) {
        if (L % y == 0) {
            out.push_back(y);
        }
    }
    return out;
}

AuditConfig with(unsigned zoom, unsigned alpha, std::size_t pop, std::size_t cs) {
    AuditConfig c;
    c.zoom = zoom;
    c.alpha = alpha;
    c.popularity_threshold = pop;
    c.cell_support_threshold = cs;
    return c;
}

} // namespace

TEST_CASE("query support under accept-all and accept-none") {
    const auto leaf_of = testutil::random_permutation(64, 1);
    const BallTree t(leaf_of, Strategy::bitwalk());
    for (unsigned y : divisors(6)) {
        AuditConfig all = with(y, 1, 1, 1);
        const auto census = QueryCensus::collect(t, all);
        for (std::size_t b = 0; b < 64; ++b) {
            for (std::size_t i = 0; i < 6 / y; ++i) {
                const auto q = query_support(census, all, b, i);
                REQUIRE(q.size() == y);
                for (const auto& bq : q) {
                    REQUIRE(t.query(bq.node, bq.index) == b);
                }
            }
        }
    }
    AuditConfig none = AuditConfig::accept_none();
    CHECK(query_support(t, none, 5, 0).empty());
    CHECK(level_support(t, none) == 0);
    CHECK(scatter_number(t, none).scatter_number == 0);
    CHECK_THROWS_AS(query_support(t, with(4, 1, 1, 1), 0, 0), config_error);
    CHECK_THROWS_AS(query_support(t, with(2, 1, 1, 1), 0, 3), range_error);
}

TEST_CASE("the unique depth-2 query answering a leaf") {
    const auto leaf_of = testutil::random_permutation(8, 4);
    const BallTree t(leaf_of, Strategy::chunked(2, 2));
    // exhaustive enumeration with the naive tracker
    std::vector<BallQuery> expect;
    for (std::size_t o = 0; o < 4; ++o) {
        for (std::size_t i = 0; i < 2; ++i) {
            if (naive_track(leaf_of, {2, o}, i) == 3) {
                expect.push_back({{2, o}, i});
            }
        }
    }
    REQUIRE(expect.size() == 1);
    CHECK(query_support(t, AuditConfig::accept_all(), 3, 2) == expect);
}

TEST_CASE("level support identity for every strategy and zoom") {
    const std::size_t n = 256;
    const unsigned L = 8;
    const auto leaf_of = testutil::random_permutation(n, 9);
    for (const auto& s : testutil::strategies_for(L)) {
        const BallTree t(leaf_of, s);
        const auto census = QueryCensus::collect(t, AuditConfig::accept_all());
        for (unsigned y : divisors(L)) {
            CHECK(level_support(census, with(y, 1, 1, 1)) == n * L / y);
        }
    }
    const BallTree t(leaf_of, Strategy::bitwalk());
    AuditConfig root_only;
    root_only.accept = [](const BallQuery& q) { return q.node.depth == 0; };
    CHECK(level_support(t, root_only) == n);
    CHECK_THROWS_AS(level_support(t, with(3, 1, 1, 1)), config_error);
    CHECK_THROWS_AS(level_support(t, with(1, 1, 0, 1)), config_error);
}

TEST_CASE("popular cells") {
    const std::size_t n = 256;
    const unsigned L = 8;
    const auto leaf_of = testutil::random_permutation(n, 2);

    const BallTree walk(leaf_of, Strategy::bitwalk());
    std::set<std::size_t> firsts;
    for (const auto& r : testutil::raw_traces(walk, AuditConfig::accept_all())) {
        firsts.insert(r.trace.front());
    }
    CHECK(popular_cells(walk, 1) == firsts);
    // all n root queries start at the root level's single directory cell
    const auto root_cell = walk.layout().levels[0].directions;
    CHECK(popular_cells(walk, n / 2).count(root_cell) == 1);
    CHECK_THROWS_AS(popular_cells(walk, 0), config_error);

    // Eager: the first probe is the cell holding the start of the stored answer
    const BallTree eager(leaf_of, Strategy::eager());
    std::map<std::size_t, std::size_t> starts;
    for (unsigned d = 0; d < L; ++d) {
        for (std::size_t pos = 0; pos < n; ++pos) {
            ++starts[eager.layout().levels[d].answers + pos * L / 64];
        }
    }
    std::set<std::size_t> expect;
    for (auto [cell, c] : starts) {
        if (c >= 2) {
            expect.insert(cell);
        }
    }
    CHECK(popular_cells(eager, 2) == expect);
    // a threshold above the answers per cell leaves nothing popular
    CHECK(popular_cells(eager, 64 / L + 2).empty());
}

TEST_CASE("scatter number matches the definition evaluated directly") {
    const std::size_t n = 64;
    const auto leaf_of = testutil::random_permutation(n, 64);
    const std::vector<AuditConfig> presets{with(1, 1, 8, 4), with(1, 2, 2, 2), with(2, 3, 64, 1),
                                           with(1, 3, 1000, 3), with(3, 2, 5, 6)};
    for (const auto& s : {Strategy::bitwalk(), Strategy::eager(), Strategy::marked(2), Strategy::chunked(2, 3)}) {
        const BallTree t(leaf_of, s);
        for (const auto& cfg : presets) {
            const auto stats = scatter_number(t, cfg);
            const auto oracle = testutil::brute_force_scatter(t, cfg);
            CAPTURE(s.to_string());
            CHECK(stats.scatter_number == oracle.gamma);
            CHECK(stats.scatter_level_support == oracle.support);
            CHECK(stats.scatter_number <= stats.scatter_level_support);
            CHECK(stats.scatter_level_support <= n * 6 / (cfg.zoom * cfg.alpha));
            CHECK(stats.level_support <= n * 6 / cfg.zoom);
        }
        // rejected queries and published cells
        AuditConfig partial = with(1, 2, 3, 2);
        partial.accept = [](const BallQuery& q) { return (q.index + q.node.offset) % 3 != 0; };
        for (std::size_t c = 0; c < t.cell_count(); c += 5) {
            partial.published_cells.insert(c);
        }
        CHECK(scatter_number(t, partial).scatter_number == testutil::brute_force_scatter(t, partial).gamma);
    }
}

TEST_CASE("scatter edge presets") {
    const std::size_t n = 64;
    const auto leaf_of = testutil::random_permutation(n, 3);
    const BallTree eager(leaf_of, Strategy::eager());
    auto cfg = with(1, 1, 1000, 1);
    const auto stats = scatter_number(eager, cfg);
    CHECK(stats.scatter_number == stats.level_support);
    CHECK(stats.level_support == n * 6);

    // publishing every cell makes every query zero-probe
    AuditConfig published = with(2, 1, 1000, 1000);
    for (std::size_t c = 0; c < eager.cell_count(); ++c) {
        published.published_cells.insert(c);
    }
    const auto zero = scatter_number(eager, published);
    CHECK(zero.scatter_number == n * 6 / 2);
    CHECK(zero.popularity_histogram.empty());

    CHECK_THROWS_AS(scatter_number(eager, with(2, 2, 1, 1)), config_error);
    auto detail = with(2, 1, 4, 2);
    detail.per_pair = true;
    const auto d = scatter_number(eager, detail);
    CHECK(d.per_pair.size() == d.scatter_level_support);
    std::size_t scattered = 0;
    for (const auto& p : d.per_pair) {
        CHECK(p.queries == 2);
        scattered += p.scattered ? 1 : 0;
    }
    CHECK(scattered == d.scatter_number);
}

TEST_CASE("popularity histogram mass equals distinct first-probe cells") {
    const auto leaf_of = testutil::random_permutation(128, 8);
    for (const auto& s : testutil::strategies_for(7)) {
        const BallTree t(leaf_of, s);
        const auto stats = scatter_number(t, with(7, 1, 1, 1));
        std::size_t mass = 0;
        std::size_t queries = 0;
        for (auto [count, cells] : stats.popularity_histogram) {
            mass += cells;
            queries += count * cells;
        }
        CHECK(mass == popular_cells(t, 1).size());
        CHECK(queries == 128 * 7);
    }
}

TEST_CASE("census kernels agree") {
    omp_set_num_threads(4);
    const auto leaf_of = testutil::random_permutation(1024, 10);
    for (const auto& s : {Strategy::bitwalk(), Strategy::chunked(3, 5)}) {
        const BallTree t(leaf_of, s);
        AuditConfig cfg;
        cfg.accept = [](const BallQuery& q) { return q.index % 2 == 0; };
        const auto a = QueryCensus::collect(t, cfg);
        const auto b = QueryCensus::collect_serial(t, cfg);
        REQUIRE(a.records().size() == b.records().size());
        for (std::size_t k = 0; k < a.records().size(); ++k) {
            const auto& x = a.records()[k];
            const auto& y = b.records()[k];
            REQUIRE((x.accepted == y.accepted && x.answer == y.answer && x.probes == y.probes &&
                     x.first_probe == y.first_probe));
        }
    }
}

TEST_CASE("lower-bound reference curve") {
    CHECK(lower_bound_reference(1 << 16, 1 << 20, 64) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(lower_bound_reference(1 << 16, 1 << 16, 64) == doctest::Approx(2.0).epsilon(1e-12));
    // denominator below 1 is clamped: n = 16 gives lg lg lg n = 1, S = n gives 0
    CHECK(lower_bound_reference(16, 16, 64) == doctest::Approx(2.0));
    double prev = 1e9;
    for (std::size_t s = 1 << 16; s < (std::size_t{1} << 40); s *= 3) {
        const double t = lower_bound_reference(1 << 16, s, 64);
        CHECK(t <= prev);
        prev = t;
    }
    CHECK_THROWS_AS(lower_bound_reference(1 << 16, 100, 64), domain_error);
    CHECK_THROWS_AS(lower_bound_reference(2, 100, 64), domain_error);
    CHECK(reference_words(1024, 10) == 1024);
    CHECK(reference_words(1024, 1024 * 10 * 3) == 3072);
}

TEST_CASE("formula thresholds") {
    const auto t = formula_thresholds(1 << 16, 1 << 20, 64, 3);
    CHECK(t.popularity == 64u * 64u * 64u);
    CHECK(t.cell_support == 1);
    CHECK(t.alpha == doctest::Approx(double(1 << 20) * 64 * std::pow(2.0, 36) / (double(1 << 16) * 16)));
}

TEST_CASE("tradeoff sweep") {
    const auto leaf_of = testutil::random_permutation(4096, 12);
    const std::vector<BallQuery> one{{{0, 0}, 17}};
    const auto single = tradeoff_sweep(std::span<const std::uint32_t>(leaf_of), {Strategy::bitwalk()}, one,
                                       AuditConfig::accept_all());
    REQUIRE(single.size() == 1);
    CHECK(single[0].probes_max == BallTree(leaf_of, Strategy::bitwalk()).query_traced({0, 0}, 17).second.size());
    CHECK(single[0].probes_mean == doctest::Approx(double(single[0].probes_max)));

    const auto workload = random_workload(4096, 5000, 1);
    const auto rows = tradeoff_sweep(std::span<const std::uint32_t>(leaf_of),
                                     {Strategy::bitwalk(), Strategy::eager(), Strategy::marked(4)}, workload,
                                     with(3, 2, 8, 2));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].strategy == "eager");
    CHECK(rows[1].strategy == "marked:4");
    CHECK(rows[2].strategy == "bitwalk");
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].level_support == 4096 * 12 / 3);
        CHECK(rows[k].t_reference == lower_bound_reference(4096, rows[k].reference_words, 12));
        if (k > 0) {
            CHECK(rows[k].space_bits < rows[k - 1].space_bits);
            CHECK(rows[k].probes_max >= rows[k - 1].probes_max);
        }
    }
    CHECK(rows[0].probes_max <= 2);

    const auto empty = tradeoff_sweep(std::span<const std::uint32_t>(leaf_of), {Strategy::eager()}, {},
                                      AuditConfig::accept_all());
    CHECK(empty[0].probes_max == 0);
    CHECK(random_workload(4096, 10, 3).size() == 10);
}
