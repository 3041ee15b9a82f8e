// Serial reference kernels against their OpenMP counterparts.

#include "ballvault/audit.hpp"
#include "ballvault/levels.hpp"
#include "ballvault/rangereport.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace ballvault;

namespace {

std::vector<std::uint32_t> permutation(std::size_t n) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    std::shuffle(p.begin(), p.end(), std::mt19937_64(n));
    return p;
}

void BM_Partition(benchmark::State& state, bool parallel) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto level = permutation(n);
    std::vector<std::uint32_t> next(n);
    const auto depth = static_cast<unsigned>(ceil_log2(n));
    for (auto _ : state) {
        if (parallel) {
            levels::partition_parallel(level, next, depth, 0);
        } else {
            levels::partition_serial(level, next, depth, 0);
        }
        benchmark::DoNotOptimize(next.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

// All RMQs of one level: range(1) is the depth, so 2^depth nodes of n >> depth balls.
void BM_LevelRmq(benchmark::State& state, bool parallel) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto depth = static_cast<unsigned>(state.range(1));
    const auto leaf_of = permutation(n);
    std::vector<std::uint32_t> level = leaf_of;
    std::vector<std::uint32_t> next(n);
    const auto tree_depth = static_cast<unsigned>(ceil_log2(n));
    for (unsigned d = 0; d < depth; ++d) {
        levels::partition_serial(level, next, tree_depth, d);
        level.swap(next);
    }
    for (auto _ : state) {
        auto rmqs = parallel ? build_level_rmqs_parallel(level, depth, RmqMode::Succinct)
                             : build_level_rmqs_serial(level, depth, RmqMode::Succinct);
        benchmark::DoNotOptimize(rmqs.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void BM_Census(benchmark::State& state, bool parallel) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const BallTree tree(permutation(n), Strategy::marked(4));
    const auto cfg = AuditConfig::accept_all();
    for (auto _ : state) {
        auto census = parallel ? QueryCensus::collect(tree, cfg) : QueryCensus::collect_serial(tree, cfg);
        benchmark::DoNotOptimize(census.records().data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * tree.depth()));
}

void BM_ReporterBuild(benchmark::State& state, bool parallel) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(5);
    std::vector<Point> pts(n);
    for (auto& p : pts) {
        p = {rng(), rng()};
    }
    for (auto _ : state) {
        RangeReporter rep(pts, Strategy::bitwalk(), RmqMode::Succinct, parallel);
        benchmark::DoNotOptimize(&rep);
    }
}

// Probe counts are the primary cost; wall time is reported alongside.
void BM_Query(benchmark::State& state, Strategy strategy) {
    const std::size_t n = std::size_t{1} << 16;
    const BallTree tree(permutation(n), strategy);
    const auto work = random_workload(n, 1 << 14, 1);
    std::size_t k = 0, probes = 0, count = 0;
    for (auto _ : state) {
        const auto& q = work[k++ & (work.size() - 1)];
        benchmark::DoNotOptimize(tree.query(q.node, q.index));
    }
    for (std::size_t i = 0; i < 4096; ++i) {
        probes += tree.query_traced(work[i].node, work[i].index).second.addresses.size();
        ++count;
    }
    state.counters["probes_mean"] = static_cast<double>(probes) / static_cast<double>(count);
    state.counters["space_bits"] = static_cast<double>(tree.space_bits());
}

} // namespace

BENCHMARK_CAPTURE(BM_Partition, serial, false)->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK_CAPTURE(BM_Partition, parallel, true)->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK_CAPTURE(BM_LevelRmq, serial, false)->Args({1 << 18, 2})->Args({1 << 18, 12});
BENCHMARK_CAPTURE(BM_LevelRmq, parallel, true)->Args({1 << 18, 2})->Args({1 << 18, 12});
BENCHMARK_CAPTURE(BM_Census, serial, false)->Arg(1 << 14);
BENCHMARK_CAPTURE(BM_Census, parallel, true)->Arg(1 << 14);
BENCHMARK_CAPTURE(BM_ReporterBuild, serial, false)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ReporterBuild, parallel, true)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Query, eager, Strategy::eager());
BENCHMARK_CAPTURE(BM_Query, marked4, Strategy::marked(4));
BENCHMARK_CAPTURE(BM_Query, chunked4_64, Strategy::chunked(4, 64));
BENCHMARK_CAPTURE(BM_Query, bitwalk, Strategy::bitwalk());

BENCHMARK_MAIN();
