#pragma once

#include "ballvault/balltree.hpp"
#include "ballvault/rankspace.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace ballvault {

struct BallQuery {
    NodeId node;
    std::size_t index = 0;

    friend bool operator==(const BallQuery&, const BallQuery&) = default;
};

/// Measurement settings for the cell-probe audit.
///
/// `zoom` is the layer height Y and `alpha` the coarsening factor used by
/// the scatter number. The two thresholds stand in for the asymptotic
/// popularity and cell-support bounds; see formula_thresholds() for the
/// formula-derived values. `accept` filters queries (empty accepts all) and
/// reads of `published_cells` are free, so they never count as probes.
struct AuditConfig {
    unsigned zoom = 1;
    unsigned alpha = 1;
    std::size_t popularity_threshold = 1;
    std::size_t cell_support_threshold = 1;
    std::function<bool(const BallQuery&)> accept;
    std::unordered_set<std::size_t> published_cells;
    bool per_pair = false;

    bool accepts(const BallQuery& q) const { return !accept || accept(q); }

    /// Throws config_error unless zoom (and zoom * alpha when `scatter`)
    /// divides the tree depth and the thresholds are at least 1.
    void validate(unsigned depth, bool scatter) const;

    static AuditConfig accept_all() { return {}; }
    static AuditConfig accept_none();
};

/// Threshold values obtained by evaluating the asymptotic formulas
/// (w^3 popularity, alpha / lg^6 lg n cell support) at concrete sizes.
struct FormulaThresholds {
    double alpha = 0;  // S w lg^18 lg n / (n lg n)
    std::size_t popularity = 0;
    std::size_t cell_support = 0;
};
FormulaThresholds formula_thresholds(std::size_t n, std::size_t cells, unsigned w, unsigned alpha);

/// First probe and probe count of every accepted query on levels [0, lg n).
class QueryCensus {
public:
    static constexpr std::size_t no_probe = static_cast<std::size_t>(-1);

    struct Record {
        std::uint32_t answer = 0;
        std::uint32_t probes = 0;
        std::size_t first_probe = no_probe;
        bool accepted = false;
    };

    /// OpenMP over all (node, ball) pairs.
    static QueryCensus collect(const BallTree& tree, const AuditConfig& cfg);
    /// Reference single-threaded version; identical output.
    static QueryCensus collect_serial(const BallTree& tree, const AuditConfig& cfg);

    std::size_t size() const noexcept { return n_; }
    unsigned depth() const noexcept { return depth_; }
    /// Record of the query whose ball sits at position `pos` of level `depth`.
    const Record& at(unsigned depth, std::size_t pos) const { return records_[depth * n_ + pos]; }
    const std::vector<Record>& records() const noexcept { return records_; }
    BallQuery query_of(unsigned depth, std::size_t pos) const;

private:
    std::size_t n_ = 0;
    unsigned depth_ = 0;
    std::vector<Record> records_;
};

struct PairDetail {
    std::size_t leaf = 0;
    std::size_t layer = 0;
    std::size_t queries = 0;
    std::size_t cells = 0;
    bool scattered = false;
};

struct SupportStats {
    std::size_t level_support = 0;    // at zoom Y
    std::size_t scatter_number = 0;   // at zoom alpha * Y
    std::size_t scatter_level_support = 0;  // level support at zoom alpha * Y
    std::map<std::size_t, std::size_t> popularity_histogram;  // first-probe count -> cells
    std::vector<PairDetail> per_pair;
};

std::vector<BallQuery> query_support(const QueryCensus& census, const AuditConfig& cfg, std::size_t leaf,
                                     std::size_t layer);
std::vector<BallQuery> query_support(const BallTree& tree, const AuditConfig& cfg, std::size_t leaf,
                                     std::size_t layer);

std::size_t level_support(const QueryCensus& census, const AuditConfig& cfg);
std::size_t level_support(const BallTree& tree, const AuditConfig& cfg);

/// Cells that are the first probe of at least k accepted queries.
std::set<std::size_t> popular_cells(const QueryCensus& census, std::size_t k);
std::set<std::size_t> popular_cells(const BallTree& tree, std::size_t k,
                                    const AuditConfig& cfg = AuditConfig::accept_all());

SupportStats scatter_number(const QueryCensus& census, const AuditConfig& cfg);
SupportStats scatter_number(const BallTree& tree, const AuditConfig& cfg);

/// lg lg n / (lg(S/n) + lg lg lg n), base-2 logs, denominator clamped to at
/// least 1. `cells` is S in words; `w` is accepted for the record and does not
/// enter the formula. Throws domain_error when n < 4 or S < n.
double lower_bound_reference(std::size_t n, std::size_t cells, unsigned w);

struct SweepRow {
    std::string strategy;
    std::size_t n = 0;
    unsigned w = cell_bits;
    std::size_t space_bits = 0;
    std::size_t cells = 0;
    std::size_t probes_max = 0;
    double probes_mean = 0;
    std::size_t level_support = 0;
    std::size_t gamma = 0;
    double t_reference = 0;       // NaN when the reference is undefined (n < 4)
    std::size_t reference_words = 0;
    double ns_per_query = 0;      // wall clock, auxiliary
};

/// Words of lg n bits needed for `space_bits`, floored at n; this is the S
/// fed to lower_bound_reference in sweep rows.
std::size_t reference_words(std::size_t n, std::size_t space_bits);

/// One row per strategy, sorted by space_bits descending (ties by name).
/// Strategies run in parallel; the result does not depend on thread count
/// apart from the timing column.
std::vector<SweepRow> tradeoff_sweep(std::span<const std::uint32_t> leaf_of, const std::vector<Strategy>& strategies,
                                     const std::vector<BallQuery>& workload, const AuditConfig& cfg);

/// Same sweep over the ball tree a range reporter would build for `points`.
std::vector<SweepRow> tradeoff_sweep(const std::vector<Point>& points, const std::vector<Strategy>& strategies,
                                     const std::vector<BallQuery>& workload, const AuditConfig& cfg);

/// Uniformly random (node, ball) pairs over levels [0, lg n) of an n-leaf tree.
std::vector<BallQuery> random_workload(std::size_t n, std::size_t count, std::uint64_t seed);

} // namespace ballvault
