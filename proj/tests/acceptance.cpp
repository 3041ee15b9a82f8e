// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "ballvault/audit.hpp"
#include "ballvault/pointio.hpp"
#include "ballvault/rangereport.hpp"
#include "scatter_oracle.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace ballvault;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Criterion 1 and 6 share a workload.
struct ReportingWorkload {
    std::vector<Point> points;
    std::vector<QueryRect> rects;
};

ReportingWorkload reporting_workload() {
    ReportingWorkload w;
    const std::uint64_t universe = 1ull << 32;
    w.points = generate_points(4096, universe, 20240601, Distribution::Uniform);
    std::mt19937_64 rng(17);
    for (int q = 0; q < 5000; ++q) {
        // Mix of wide, narrow and degenerate rectangles.
        const std::uint64_t span_x = q % 3 == 0 ? universe : universe >> (2 + rng() % 12);
        const std::uint64_t span_y = q % 5 == 0 ? universe : universe >> (rng() % 14);
        const std::uint64_t x0 = rng() % universe, y0 = rng() % universe;
        QueryRect r{x0, std::min(universe - 1, x0 + rng() % span_x), y0, std::min(universe - 1, y0 + rng() % span_y)};
        if (q % 97 == 0) {
            const Point& p = w.points[rng() % w.points.size()];
            r = {p.x, p.x, 0, universe - 1};
        }
        w.rects.push_back(r);
    }
    return w;
}

std::vector<std::size_t> brute_force(const std::vector<Point>& pts, const QueryRect& r) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].x >= r.x0 && pts[i].x <= r.x1 && pts[i].y >= r.y0 && pts[i].y <= r.y1) {
            out.push_back(i);
        }
    }
    return out;
}

// Ball list of every node by filtering the root order; independent of the library.
std::vector<std::vector<std::vector<std::uint32_t>>> ball_lists(const std::vector<std::uint32_t>& leaf_of,
                                                                unsigned depth) {
    std::vector<std::vector<std::vector<std::uint32_t>>> lists(depth + 1);
    for (unsigned d = 0; d <= depth; ++d) {
        lists[d].resize(std::size_t{1} << d);
        for (std::uint32_t leaf : leaf_of) {
            lists[d][leaf >> (depth - d)].push_back(leaf);
        }
    }
    return lists;
}

double log2d(double v) { return std::log2(v); }

double reference_oracle(std::size_t n, std::size_t space_bits) {
    const double lg = log2d(static_cast<double>(n));
    const double words = std::max<double>(static_cast<double>(n), std::ceil(static_cast<double>(space_bits) / lg));
    const double denom = std::max(1.0, log2d(words / static_cast<double>(n)) + log2d(log2d(lg)));
    return log2d(lg) / denom;
}

} // namespace

int main() {
    ReportingWorkload workload;
    std::size_t calls_total = 0, economy_violations = 0, worst_calls = 0, worst_k = 0;
    long worst_excess = -1000000;

    report(1, "range reporting matches brute force", [&] {
        const auto t0 = Clock::now();
        workload = reporting_workload();
        std::vector<std::vector<std::size_t>> expect;
        std::size_t total = 0;
        for (const auto& r : workload.rects) {
            expect.push_back(brute_force(workload.points, r));
            total += expect.back().size();
        }
        std::size_t configs = 0, mismatches = 0;
        for (const Strategy& s : testutil::strategies_for(12)) {
            for (RmqMode mode : {RmqMode::Succinct, RmqMode::Debug}) {
                ++configs;
                const RangeReporter rep(workload.points, s, mode);
                for (std::size_t q = 0; q < workload.rects.size(); ++q) {
                    ReportStats stats;
                    auto got = rep.report_indices(workload.rects[q], &stats);
                    std::sort(got.begin(), got.end());
                    if (!std::equal(got.begin(), got.end(), expect[q].begin(), expect[q].end())) {
                        ++mismatches;
                    }
                    for (const auto& c : stats.calls) {
                        ++calls_total;
                        if (c.argextreme_calls > 2 * c.emitted + 2) {
                            ++economy_violations;
                        }
                        const long excess = static_cast<long>(c.argextreme_calls) - 2 * static_cast<long>(c.emitted);
                        if (excess > worst_excess) {
                            worst_excess = excess;
                            worst_calls = c.argextreme_calls;
                            worst_k = c.emitted;
                        }
                    }
                }
            }
        }
        const double elapsed = seconds_since(t0);
        return Outcome{mismatches == 0 && elapsed < 60.0,
                       fmt("%zu configurations x %zu rectangles (%zu points reported per config), %zu mismatches, "
                           "%.1f s of 60 s budget",
                           configs, workload.rects.size(), total, mismatches, elapsed)};
    });

    report(2, "ball inheritance matches naive tracking", [] {
        const auto t0 = Clock::now();
        const unsigned depth = 8;
        std::size_t checked = 0, mismatches = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto leaf_of = testutil::random_permutation(256, seed);
            const auto lists = ball_lists(leaf_of, depth);
            for (const Strategy& s : testutil::strategies_for(depth)) {
                const BallTree tree(leaf_of, s);
                for (unsigned d = 0; d < depth; ++d) {
                    for (std::size_t o = 0; o < lists[d].size(); ++o) {
                        for (std::size_t i = 0; i < lists[d][o].size(); ++i) {
                            const NodeId v{d, o};
                            const std::size_t got = tree.query(v, i);
                            mismatches += got != lists[d][o][i] || got != naive_track(leaf_of, v, i);
                            ++checked;
                        }
                    }
                }
            }
        }
        const double elapsed = seconds_since(t0);
        return Outcome{mismatches == 0 && elapsed < 30.0,
                       fmt("%zu queries over 20 permutations and %zu strategies, %zu mismatches", checked,
                           testutil::strategies_for(depth).size(), mismatches)};
    });

    report(3, "probe ceilings", [] {
        const unsigned depth = 12;
        const auto leaf_of = testutil::random_permutation(4096, 99);
        const auto queries = random_workload(4096, 10000, 7);
        auto strategies = testutil::strategies_for(depth);
        for (unsigned s : {6u, 12u}) {
            strategies.push_back(Strategy::marked(s));
        }
        strategies.push_back(Strategy::chunked(12, 3));
        std::size_t violations = 0;
        std::string worst;
        for (const Strategy& s : strategies) {
            const BallTree tree(leaf_of, s);
            const std::size_t ceiling = testutil::trace_ceiling(s, depth);
            std::size_t max_probes = 0;
            for (const auto& q : queries) {
                const auto [leaf, trace] = tree.query_traced(q.node, q.index);
                max_probes = std::max(max_probes, trace.addresses.size());
                violations += trace.addresses.size() > ceiling || leaf != naive_track(leaf_of, q.node, q.index);
            }
            worst += fmt(" %s=%zu/%zu", s.to_string().c_str(), max_probes, ceiling);
        }
        return Outcome{violations == 0,
                       fmt("%zu violations; max/ceiling:", violations) + worst};
    });

    report(4, "level support identity", [] {
        const unsigned depth = 10;
        const std::size_t n = 1024;
        const auto leaf_of = testutil::random_permutation(n, 4);
        std::size_t checks = 0, bad = 0;
        for (const Strategy& s : testutil::strategies_for(depth)) {
            const BallTree tree(leaf_of, s);
            for (unsigned y : {1u, 2u, 5u, 10u}) {
                AuditConfig cfg;
                cfg.zoom = y;
                ++checks;
                bad += level_support(tree, cfg) != n * depth / y;
            }
        }
        return Outcome{bad == 0, fmt("%zu (strategy, Y) pairs, %zu differ from n lg n / Y", checks, bad)};
    });

    report(5, "scatter number matches brute force", [] {
        const auto leaf_of = testutil::random_permutation(64, 5);
        std::size_t checks = 0, bad = 0;
        for (const Strategy& s : {Strategy::bitwalk(), Strategy::eager()}) {
            const BallTree tree(leaf_of, s);
            std::vector<AuditConfig> presets;
            for (unsigned y : {1u, 2u, 3u}) {
                for (unsigned alpha : {1u, 2u}) {
                    if (6 % (y * alpha) != 0) {
                        continue;
                    }
                    AuditConfig lax;
                    lax.zoom = y;
                    lax.alpha = alpha;
                    AuditConfig moderate = lax;
                    moderate.popularity_threshold = 4;
                    moderate.cell_support_threshold = 3;
                    moderate.accept = [](const BallQuery& q) { return (q.index + q.node.depth) % 3 != 0; };
                    AuditConfig formula = lax;
                    const auto t = formula_thresholds(64, tree.cell_count(), cell_bits, alpha);
                    formula.popularity_threshold = t.popularity;
                    formula.cell_support_threshold = t.cell_support;
                    presets.insert(presets.end(), {lax, moderate, formula});
                }
            }
            for (const auto& cfg : presets) {
                ++checks;
                bad += scatter_number(tree, cfg).scatter_number != testutil::brute_force_scatter(tree, cfg).gamma;
            }
        }
        return Outcome{bad == 0, fmt("%zu (strategy, preset, Y, alpha) settings, %zu disagreements", checks, bad)};
    });

    report(6, "3-sided candidate economy", [&] {
        return Outcome{calls_total > 0 && economy_violations == 0,
                       fmt("%zu 3-sided calls, %zu with more than 2k+2 argextreme calls; largest calls-2k is %ld "
                           "(%zu calls at k=%zu)",
                           calls_total, economy_violations, worst_excess, worst_calls, worst_k)};
    });

    report(7, "tradeoff ordering", [] {
        const std::size_t n = 4096;
        const auto leaf_of = testutil::random_permutation(n, 12);
        const std::vector<Strategy> strategies{Strategy::eager(), Strategy::marked(2), Strategy::marked(4),
                                               Strategy::marked(8), Strategy::bitwalk()};
        const auto rows = tradeoff_sweep(std::span<const std::uint32_t>(leaf_of), strategies,
                                         random_workload(n, 10000, 3), AuditConfig::accept_all());
        bool ok = rows.size() == strategies.size();
        std::string table;
        double worst_rel = 0;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto& r = rows[k];
            if (k > 0) {
                ok = ok && r.space_bits < rows[k - 1].space_bits && r.probes_max >= rows[k - 1].probes_max;
            }
            const double expect = reference_oracle(n, r.space_bits);
            const double rel = std::abs(r.t_reference - expect) / expect;
            worst_rel = std::max(worst_rel, std::isnan(rel) ? 1.0 : rel);
            table += fmt(" %s(%zu bits, %zu probes)", r.strategy.c_str(), r.space_bits, r.probes_max);
        }
        ok = ok && worst_rel <= 1e-9;
        return Outcome{ok, fmt("reference max rel. error %.2e;", worst_rel) + table};
    });

    report(8, "space accounting", [] {
        const std::size_t n = 4096;
        const double nlg = n * 12.0;
        const auto pts = generate_points(n, 1ull << 32, 8, Distribution::Uniform);
        const RangeReporter bitwalk(pts, Strategy::bitwalk());
        const RangeReporter eager(pts, Strategy::eager());
        const std::size_t bw = bitwalk.tree().cell_count() * cell_bits;
        const std::size_t eg = eager.tree().cell_count() * cell_bits;
        const bool ok = bw == bitwalk.space().tree && eg == eager.space().tree && bw <= 2 * nlg && eg >= nlg * 12;
        return Outcome{ok, fmt("bitwalk %zu bits (%.3f n lg n, limit 2), eager %zu bits (%.3f n lg^2 n, floor 1)", bw,
                               bw / nlg, eg, eg / (nlg * 12))};
    });

    std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
