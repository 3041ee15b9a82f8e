#include "ballvault/levels.hpp"

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ballvault {

int worker_threads() {
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("BALLVAULT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) {
            threads = std::min(threads, cap);
        }
    }
    return std::max(threads, 1);
}

namespace levels {

void partition_serial(std::span<const std::uint32_t> level, std::span<std::uint32_t> next, unsigned tree_depth,
                      unsigned depth) {
    const std::size_t n = level.size();
    const std::size_t seg = n >> depth;
    const std::size_t half = seg / 2;
    for (std::size_t start = 0; start < n; start += seg) {
        std::size_t left = start;
        std::size_t right = start + half;
        for (std::size_t pos = start; pos < start + seg; ++pos) {
            const std::uint32_t leaf = level[pos];
            if (direction(leaf, tree_depth, depth)) {
                next[right++] = leaf;
            } else {
                next[left++] = leaf;
            }
        }
    }
}

void partition_parallel(std::span<const std::uint32_t> level, std::span<std::uint32_t> next, unsigned tree_depth,
                        unsigned depth) {
    const std::size_t n = level.size();
    const std::size_t seg = n >> depth;
    const std::size_t half = seg / 2;
    const int threads = worker_threads();
    if (threads == 1 || n < 4096) {
        partition_serial(level, next, tree_depth, depth);
        return;
    }

    // zeros_before[p] = number of left-going balls in [0, p)
    const std::size_t chunks = static_cast<std::size_t>(threads) * 4;
    const std::size_t chunk = (n + chunks - 1) / chunks;
    std::vector<std::uint32_t> chunk_zeros(chunks + 1, 0);
    std::vector<std::uint32_t> zeros_before(n + 1);

    const auto ichunks = static_cast<std::int64_t>(chunks);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::int64_t c = 0; c < ichunks; ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        std::uint32_t z = 0;
        for (std::size_t p = lo; p < hi; ++p) {
            z += direction(level[p], tree_depth, depth) ? 0u : 1u;
        }
        chunk_zeros[static_cast<std::size_t>(c) + 1] = z;
    }
    for (std::size_t c = 0; c < chunks; ++c) {
        chunk_zeros[c + 1] += chunk_zeros[c];
    }

#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::int64_t c = 0; c < ichunks; ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        std::uint32_t z = chunk_zeros[static_cast<std::size_t>(c)];
        for (std::size_t p = lo; p < hi; ++p) {
            zeros_before[p] = z;
            z += direction(level[p], tree_depth, depth) ? 0u : 1u;
        }
        if (hi == n && lo < hi) {
            zeros_before[n] = z;
        }
    }

    const auto in = static_cast<std::int64_t>(n);
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::int64_t ip = 0; ip < in; ++ip) {
        const auto p = static_cast<std::size_t>(ip);
        const std::size_t start = p / seg * seg;
        const std::size_t zeros = zeros_before[p] - zeros_before[start];
        const std::uint32_t leaf = level[p];
        if (direction(leaf, tree_depth, depth)) {
            next[start + half + (p - start - zeros)] = leaf;
        } else {
            next[start + zeros] = leaf;
        }
    }
}

} // namespace levels
} // namespace ballvault
