#include "ballvault/audit.hpp"

#include "ballvault/levels.hpp"
#include "ballvault/rangereport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace ballvault {

void AuditConfig::validate(unsigned depth, bool scatter) const {
    if (zoom < 1 || zoom > std::max(depth, 1u) || (depth > 0 && depth % zoom != 0)) {
        throw config_error("zoom Y=" + std::to_string(zoom) + " must divide lg n=" + std::to_string(depth));
    }
    if (scatter) {
        const unsigned coarse = zoom * alpha;
        if (alpha < 1 || coarse > std::max(depth, 1u) || (depth > 0 && depth % coarse != 0)) {
            throw config_error("Y*alpha=" + std::to_string(coarse) + " must divide lg n=" + std::to_string(depth));
        }
    }
    if (popularity_threshold < 1 || cell_support_threshold < 1) {
        throw config_error("audit thresholds must be at least 1");
    }
}

AuditConfig AuditConfig::accept_none() {
    AuditConfig c;
    c.accept = [](const BallQuery&) { return false; };
    return c;
}

FormulaThresholds formula_thresholds(std::size_t n, std::size_t cells, unsigned w, unsigned alpha) {
    FormulaThresholds t;
    const double lg = std::log2(static_cast<double>(std::max<std::size_t>(n, 4)));
    const double lglg = std::log2(lg);
    t.alpha = static_cast<double>(cells) * w * std::pow(lglg, 18) / (static_cast<double>(n) * lg);
    t.popularity = static_cast<std::size_t>(w) * w * w;
    const double cs = lglg > 0 ? alpha / std::pow(lglg, 6) : alpha;
    t.cell_support = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cs)));
    return t;
}

BallQuery QueryCensus::query_of(unsigned depth, std::size_t pos) const {
    const std::size_t seg = n_ >> depth;
    return {{depth, pos / seg}, pos % seg};
}

namespace {

QueryCensus::Record census_entry(const BallTree& tree, const AuditConfig& cfg, const BallQuery& q) {
    QueryCensus::Record r;
    if (!cfg.accepts(q)) {
        return r;
    }
    r.accepted = true;
    const auto [leaf, trace] = tree.query_traced(q.node, q.index);
    r.answer = static_cast<std::uint32_t>(leaf);
    for (std::size_t addr : trace.addresses) {
        if (cfg.published_cells.count(addr) != 0) {
            continue;
        }
        if (r.first_probe == QueryCensus::no_probe) {
            r.first_probe = addr;
        }
        ++r.probes;
    }
    return r;
}

} // namespace

QueryCensus QueryCensus::collect_serial(const BallTree& tree, const AuditConfig& cfg) {
    QueryCensus c;
    c.n_ = tree.size();
    c.depth_ = tree.depth();
    c.records_.resize(c.n_ * c.depth_);
    for (unsigned d = 0; d < c.depth_; ++d) {
        for (std::size_t pos = 0; pos < c.n_; ++pos) {
            c.records_[d * c.n_ + pos] = census_entry(tree, cfg, c.query_of(d, pos));
        }
    }
    return c;
}

QueryCensus QueryCensus::collect(const BallTree& tree, const AuditConfig& cfg) {
    QueryCensus c;
    c.n_ = tree.size();
    c.depth_ = tree.depth();
    c.records_.resize(c.n_ * c.depth_);
    const auto total = static_cast<std::int64_t>(c.records_.size());
    const int threads = worker_threads();
#pragma omp parallel for num_threads(threads) schedule(static, 256)
    for (std::int64_t k = 0; k < total; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        const auto d = static_cast<unsigned>(idx / c.n_);
        c.records_[idx] = census_entry(tree, cfg, c.query_of(d, idx % c.n_));
    }
    return c;
}

std::vector<BallQuery> query_support(const QueryCensus& census, const AuditConfig& cfg, std::size_t leaf,
                                     std::size_t layer) {
    const unsigned L = census.depth();
    cfg.validate(L, false);
    if (leaf >= census.size() || L == 0 || layer >= L / cfg.zoom) {
        throw range_error("leaf or layer outside the tree");
    }
    std::vector<BallQuery> out;
    for (unsigned d = static_cast<unsigned>(layer * cfg.zoom); d < (layer + 1) * cfg.zoom; ++d) {
        const std::size_t seg = census.size() >> d;
        const std::size_t start = (leaf >> (L - d)) * seg;
        for (std::size_t pos = start; pos < start + seg; ++pos) {
            const auto& r = census.at(d, pos);
            if (r.accepted && r.answer == leaf) {
                out.push_back(census.query_of(d, pos));
                break;
            }
        }
    }
    return out;
}

std::vector<BallQuery> query_support(const BallTree& tree, const AuditConfig& cfg, std::size_t leaf,
                                     std::size_t layer) {
    return query_support(QueryCensus::collect(tree, cfg), cfg, leaf, layer);
}

namespace {

std::size_t support_at_zoom(const QueryCensus& census, unsigned zoom) {
    const unsigned L = census.depth();
    if (L == 0) {
        return 0;
    }
    const std::size_t layers = L / zoom;
    std::vector<bool> seen(census.size() * layers, false);
    std::size_t count = 0;
    for (unsigned d = 0; d < L; ++d) {
        for (std::size_t pos = 0; pos < census.size(); ++pos) {
            const auto& r = census.at(d, pos);
            if (!r.accepted) {
                continue;
            }
            const std::size_t key = r.answer * layers + d / zoom;
            if (!seen[key]) {
                seen[key] = true;
                ++count;
            }
        }
    }
    return count;
}

std::map<std::size_t, std::size_t> first_probe_counts(const QueryCensus& census) {
    std::map<std::size_t, std::size_t> counts;
    for (const auto& r : census.records()) {
        if (r.accepted && r.first_probe != QueryCensus::no_probe) {
            ++counts[r.first_probe];
        }
    }
    return counts;
}

} // namespace

std::size_t level_support(const QueryCensus& census, const AuditConfig& cfg) {
    cfg.validate(census.depth(), false);
    return support_at_zoom(census, cfg.zoom);
}

std::size_t level_support(const BallTree& tree, const AuditConfig& cfg) {
    cfg.validate(tree.depth(), false);
    return level_support(QueryCensus::collect(tree, cfg), cfg);
}

std::set<std::size_t> popular_cells(const QueryCensus& census, std::size_t k) {
    if (k < 1) {
        throw config_error("popularity threshold must be at least 1");
    }
    std::set<std::size_t> out;
    for (const auto& [cell, count] : first_probe_counts(census)) {
        if (count >= k) {
            out.insert(cell);
        }
    }
    return out;
}

std::set<std::size_t> popular_cells(const BallTree& tree, std::size_t k, const AuditConfig& cfg) {
    return popular_cells(QueryCensus::collect(tree, cfg), k);
}

SupportStats scatter_number(const QueryCensus& census, const AuditConfig& cfg) {
    const unsigned L = census.depth();
    cfg.validate(L, true);
    SupportStats stats;
    stats.level_support = support_at_zoom(census, cfg.zoom);

    const auto counts = first_probe_counts(census);
    for (const auto& [cell, count] : counts) {
        ++stats.popularity_histogram[count];
    }
    if (L == 0) {
        return stats;
    }

    const unsigned coarse = cfg.zoom * cfg.alpha;
    const std::size_t layers = L / coarse;
    // (pair key, first probe) for every accepted query, grouped by pair
    struct Entry {
        std::size_t key;
        std::size_t cell;
    };
    std::vector<Entry> entries;
    entries.reserve(census.records().size());
    for (unsigned d = 0; d < L; ++d) {
        for (std::size_t pos = 0; pos < census.size(); ++pos) {
            const auto& r = census.at(d, pos);
            if (r.accepted) {
                entries.push_back({r.answer * layers + d / coarse, r.first_probe});
            }
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.key != b.key ? a.key < b.key : a.cell < b.cell; });

    for (std::size_t lo = 0; lo < entries.size();) {
        std::size_t hi = lo;
        bool zero_probe = false;
        bool has_popular = false;
        std::size_t distinct = 0;
        std::size_t prev = QueryCensus::no_probe;
        while (hi < entries.size() && entries[hi].key == entries[lo].key) {
            const std::size_t cell = entries[hi].cell;
            if (cell == QueryCensus::no_probe) {
                zero_probe = true;
            } else if (cell != prev) {
                ++distinct;
                prev = cell;
                if (counts.at(cell) >= cfg.popularity_threshold) {
                    has_popular = true;
                }
            }
            ++hi;
        }
        const bool scattered = zero_probe || has_popular || distinct >= cfg.cell_support_threshold;
        ++stats.scatter_level_support;
        if (scattered) {
            ++stats.scatter_number;
        }
        if (cfg.per_pair) {
            const std::size_t key = entries[lo].key;
            stats.per_pair.push_back({key / layers, key % layers, hi - lo, distinct, scattered});
        }
        lo = hi;
    }
    return stats;
}

SupportStats scatter_number(const BallTree& tree, const AuditConfig& cfg) {
    cfg.validate(tree.depth(), true);
    return scatter_number(QueryCensus::collect(tree, cfg), cfg);
}

double lower_bound_reference(std::size_t n, std::size_t cells, unsigned /*w*/) {
    if (n < 4) {
        throw domain_error("lower-bound reference needs n >= 4");
    }
    if (cells < n) {
        throw domain_error("lower-bound reference needs S >= n");
    }
    const double lg = std::log2(static_cast<double>(n));
    const double lglg = std::log2(lg);
    const double lglglg = std::log2(lglg);
    const double denom = std::log2(static_cast<double>(cells) / static_cast<double>(n)) + lglglg;
    return lglg / std::max(1.0, denom);
}

std::size_t reference_words(std::size_t n, std::size_t space_bits) {
    const std::size_t word = std::max<std::size_t>(1, ceil_log2(n));
    return std::max(n, (space_bits + word - 1) / word);
}

std::vector<BallQuery> random_workload(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (!is_pow2(n)) {
        throw validation_error("workload needs a power-of-two tree size");
    }
    const unsigned L = ceil_log2(n);
    std::mt19937_64 rng(seed);
    std::vector<BallQuery> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const unsigned d = L == 0 ? 0 : static_cast<unsigned>(rng() % L);
        const std::size_t o = rng() % (std::size_t{1} << d);
        const std::size_t i = rng() % (n >> d);
        out.push_back({{d, o}, i});
    }
    return out;
}

std::vector<SweepRow> tradeoff_sweep(std::span<const std::uint32_t> leaf_of, const std::vector<Strategy>& strategies,
                                     const std::vector<BallQuery>& workload, const AuditConfig& cfg) {
    const std::size_t n = leaf_of.size();
    const unsigned L = ceil_log2(n);
    cfg.validate(L, true);
    std::vector<SweepRow> rows(strategies.size());
    const auto count = static_cast<std::int64_t>(strategies.size());
    const int threads = worker_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::int64_t k = 0; k < count; ++k) {
        const Strategy& s = strategies[static_cast<std::size_t>(k)];
        const BallTree tree(leaf_of, s, false);
        SweepRow row;
        row.strategy = s.to_string();
        row.n = n;
        row.space_bits = tree.space_bits();
        row.cells = tree.cell_count();
        std::size_t total = 0;
        for (const auto& q : workload) {
            const std::size_t probes = tree.query_traced(q.node, q.index).second.size();
            row.probes_max = std::max(row.probes_max, probes);
            total += probes;
        }
        row.probes_mean = workload.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(workload.size());

        volatile std::size_t sink = 0;
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& q : workload) {
            sink = sink + tree.query(q.node, q.index);
        }
        const auto t1 = std::chrono::steady_clock::now();
        if (!workload.empty()) {
            row.ns_per_query = std::chrono::duration<double, std::nano>(t1 - t0).count() /
                               static_cast<double>(workload.size());
        }

        const QueryCensus census = QueryCensus::collect_serial(tree, cfg);
        const SupportStats stats = scatter_number(census, cfg);
        row.level_support = stats.level_support;
        row.gamma = stats.scatter_number;
        row.reference_words = reference_words(n, row.space_bits);
        row.t_reference = n >= 4 ? lower_bound_reference(n, row.reference_words, std::max(1u, L))
                                 : std::numeric_limits<double>::quiet_NaN();
        rows[static_cast<std::size_t>(k)] = std::move(row);
    }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.space_bits != b.space_bits ? a.space_bits > b.space_bits : a.strategy < b.strategy;
    });
    return rows;
}

std::vector<SweepRow> tradeoff_sweep(const std::vector<Point>& points, const std::vector<Strategy>& strategies,
                                     const std::vector<BallQuery>& workload, const AuditConfig& cfg) {
    const RankedPointSet rps(points);
    const auto leaf_of = RangeReporter::padded_leaf_of(rps);
    return tradeoff_sweep(std::span<const std::uint32_t>(leaf_of), strategies, workload, cfg);
}

} // namespace ballvault
