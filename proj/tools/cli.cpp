#include "cli.hpp"

#include "ballvault/audit.hpp"
#include "ballvault/pointio.hpp"
#include "ballvault/rangereport.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace ballvault::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* predecessor_note =
    "note: coordinate lookup uses O(lg n) binary search; an O(lg lg n) predecessor structure is not implemented";

struct GenOptions {
    std::size_t n = 0;
    std::uint64_t universe = 0;
    std::uint64_t seed = 0;
    std::string dist = "uniform";
    std::string format = "text";
    std::string output;
};

struct BuildOptions {
    std::string input;
    std::string strategy = "bitwalk";
    std::string rmq = "succinct";
    std::string output;
};

struct QueryOptions {
    std::string index;
    std::string input;
    std::string strategy = "bitwalk";
    std::vector<std::string> rects;
    std::string queries;
    std::string format = "text";
    bool count_only = false;
    std::string output;
};

struct BenchOptions {
    std::string input;
    std::string strategies = "eager,marked:2,marked:4,bitwalk";
    std::size_t queries = 10000;
    std::uint64_t seed = 1;
    unsigned zoom = 1;
    unsigned alpha = 1;
    std::string format = "csv";
    std::string output;
};

struct AuditOptions {
    std::string input;
    std::string strategy = "bitwalk";
    unsigned zoom = 1;
    unsigned alpha = 1;
    std::size_t popularity = 1;
    std::size_t cell_support = 1;
    std::string preset = "accept-all";
    bool per_pair = false;
    std::string output;
};

// Writes to the -o path when set, otherwise to the default stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw format_error("cannot write " + path);
            }
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

RmqMode parse_rmq(const std::string& s) {
    if (s == "succinct") {
        return RmqMode::Succinct;
    }
    if (s == "debug") {
        return RmqMode::Debug;
    }
    throw validation_error("unknown rmq mode '" + s + "'; expected succinct | debug");
}

Strategy parse_strategy(const std::string& s) {
    return Strategy::parse(s);
}

std::vector<Strategy> parse_strategy_list(const std::string& list) {
    std::vector<Strategy> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(parse_strategy(item));
        }
    }
    if (out.empty()) {
        throw validation_error("no strategies given; accepted grammar: " + std::string(strategy_grammar));
    }
    return out;
}

std::vector<std::uint64_t> parse_numbers(const std::string& text, std::size_t expected, const std::string& what) {
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<std::uint64_t> v;
    std::string tok;
    while (in >> tok) {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
            throw validation_error(what + ": '" + tok + "' is not an unsigned integer");
        }
        v.push_back(std::stoull(tok));
    }
    if (v.size() != expected) {
        throw validation_error(what + ": expected " + std::to_string(expected) + " numbers, got " +
                               std::to_string(v.size()));
    }
    return v;
}

QueryRect rect_from(const std::vector<std::uint64_t>& v) {
    QueryRect r{v[0], v[1], v[2], v[3]};
    r.validate();
    return r;
}

std::vector<std::uint32_t> tree_leaves(const std::vector<Point>& points) {
    return RangeReporter::padded_leaf_of(RankedPointSet(points));
}

std::string fmt_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

json double_json(double v) {
    return std::isnan(v) ? json(nullptr) : json(v);
}

int cmd_gen(const GenOptions& o, std::ostream& out) {
    const auto dist = parse_distribution(o.dist);
    PointFormat format;
    if (o.format == "text") {
        format = PointFormat::Text;
    } else if (o.format == "binary") {
        format = PointFormat::Binary;
    } else {
        throw validation_error("unknown point format '" + o.format + "'; expected text | binary");
    }
    const auto pts = generate_points(o.n, o.universe, o.seed, dist);
    Sink sink(o.output, out);
    write_points(*sink, pts, format);
    return exit_ok;
}

int cmd_build(const BuildOptions& o, std::ostream& out, std::ostream& err) {
    const Strategy strategy = parse_strategy(o.strategy);
    const RmqMode mode = parse_rmq(o.rmq);
    RangeReporter rep(load_points(o.input), strategy, mode);
    if (o.output.empty()) {
        throw validation_error("build needs an output path (-o)");
    }
    Sink sink(o.output, out);
    rep.save(*sink);
    const auto sp = rep.space();
    err << "built " << rep.points().size() << " points, strategy " << strategy.to_string() << ", " << sp.total()
        << " bits (tree " << sp.tree << ", rmq " << sp.rmq << ", navigation " << sp.navigation << ", points "
        << sp.points << ")\n";
    return exit_ok;
}

int cmd_query(const QueryOptions& o, std::ostream& out) {
    if (o.index.empty() == o.input.empty()) {
        throw validation_error("query needs exactly one of --index or --input");
    }
    std::vector<QueryRect> rects;
    for (const auto& r : o.rects) {
        rects.push_back(rect_from(parse_numbers(r, 4, "--rect")));
    }
    if (!o.queries.empty()) {
        std::ifstream in(o.queries);
        if (!in) {
            throw format_error("cannot read " + o.queries);
        }
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') {
                continue;
            }
            try {
                rects.push_back(rect_from(parse_numbers(line, 4, "rectangle")));
            } catch (const validation_error& e) {
                throw format_error(o.queries + " line " + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    if (o.format != "text" && o.format != "json") {
        throw validation_error("unknown output format '" + o.format + "'; expected text | json");
    }

    std::optional<RangeReporter> rep;
    if (!o.index.empty()) {
        std::ifstream in(o.index, std::ios::binary);
        if (!in) {
            throw format_error("cannot read " + o.index);
        }
        rep.emplace(RangeReporter::load(in));
    } else {
        rep.emplace(load_points(o.input), parse_strategy(o.strategy));
    }

    Sink sink(o.output, out);
    json results = json::array();
    for (const auto& r : rects) {
        auto pts = rep->report(r);
        std::sort(pts.begin(), pts.end());
        if (o.format == "json") {
            json item{{"rect", {r.x0, r.x1, r.y0, r.y1}}, {"count", pts.size()}};
            if (!o.count_only) {
                json arr = json::array();
                for (const auto& p : pts) {
                    arr.push_back({p.x, p.y});
                }
                item["points"] = std::move(arr);
            }
            results.push_back(std::move(item));
            continue;
        }
        *sink << "# " << r.x0 << ' ' << r.x1 << ' ' << r.y0 << ' ' << r.y1 << ": " << pts.size() << '\n';
        if (!o.count_only) {
            for (const auto& p : pts) {
                *sink << p.x << ' ' << p.y << '\n';
            }
        }
    }
    if (o.format == "json") {
        *sink << results.dump(2) << '\n';
    }
    return exit_ok;
}

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
    const auto strategies = parse_strategy_list(o.strategies);
    if (o.format != "csv" && o.format != "json") {
        throw validation_error("unknown output format '" + o.format + "'; expected csv | json");
    }
    const auto points = load_points(o.input);
    const auto leaves = tree_leaves(points);
    const unsigned depth = static_cast<unsigned>(ceil_log2(leaves.size()));
    for (const auto& s : strategies) {
        s.validate(depth);
    }
    AuditConfig cfg;
    cfg.zoom = o.zoom;
    cfg.alpha = o.alpha;
    cfg.validate(depth, true);

    std::vector<SweepRow> rows;
    if (o.queries > 0) {
        rows = tradeoff_sweep(std::span<const std::uint32_t>(leaves), strategies,
                              random_workload(leaves.size(), o.queries, o.seed), cfg);
    }
    err << predecessor_note << '\n';

    static const char* columns[] = {"strategy",    "n",     "w",           "space_bits", "cells",
                                    "probes_max",  "probes_mean", "L_Y",   "gamma",      "t_reference",
                                    "ns_per_query"};
    Sink sink(o.output, out);
    if (o.format == "csv") {
        for (std::size_t i = 0; i < std::size(columns); ++i) {
            *sink << (i ? "," : "") << columns[i];
        }
        *sink << '\n';
        for (const auto& r : rows) {
            *sink << r.strategy << ',' << r.n << ',' << r.w << ',' << r.space_bits << ',' << r.cells << ','
                  << r.probes_max << ',' << fmt_double(r.probes_mean) << ',' << r.level_support << ',' << r.gamma
                  << ',' << fmt_double(r.t_reference) << ',' << fmt_double(r.ns_per_query) << '\n';
        }
        return exit_ok;
    }
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"strategy", r.strategy},
                       {"n", r.n},
                       {"w", r.w},
                       {"space_bits", r.space_bits},
                       {"cells", r.cells},
                       {"probes_max", r.probes_max},
                       {"probes_mean", r.probes_mean},
                       {"L_Y", r.level_support},
                       {"gamma", r.gamma},
                       {"t_reference", double_json(r.t_reference)},
                       {"ns_per_query", r.ns_per_query}});
    }
    json doc{{"zoom", o.zoom}, {"alpha", o.alpha}, {"queries", o.queries}, {"seed", o.seed},
             {"note", predecessor_note}, {"rows", std::move(arr)}};
    *sink << doc.dump(2) << '\n';
    return exit_ok;
}

int cmd_audit(const AuditOptions& o, std::ostream& out) {
    const Strategy strategy = parse_strategy(o.strategy);
    const auto leaves = tree_leaves(load_points(o.input));
    BallTree tree(leaves, strategy);

    AuditConfig cfg;
    if (o.preset == "accept-none") {
        cfg = AuditConfig::accept_none();
    } else if (o.preset != "accept-all" && o.preset != "formula") {
        throw validation_error("unknown preset '" + o.preset + "'; expected accept-all | accept-none | formula");
    }
    cfg.zoom = o.zoom;
    cfg.alpha = o.alpha;
    cfg.popularity_threshold = o.popularity;
    cfg.cell_support_threshold = o.cell_support;
    cfg.per_pair = o.per_pair;
    if (o.preset == "formula") {
        const auto t = formula_thresholds(tree.size(), tree.cell_count(), cell_bits, o.alpha);
        cfg.popularity_threshold = t.popularity;
        cfg.cell_support_threshold = t.cell_support;
    }
    cfg.validate(tree.depth(), true);

    const auto stats = scatter_number(tree, cfg);
    json hist = json::object();
    for (const auto& [count, cells] : stats.popularity_histogram) {
        hist[std::to_string(count)] = cells;
    }
    json doc{{"n", tree.size()},
             {"depth", tree.depth()},
             {"strategy", strategy.to_string()},
             {"preset", o.preset},
             {"Y", cfg.zoom},
             {"alpha", cfg.alpha},
             {"popularity_threshold", cfg.popularity_threshold},
             {"cell_support_threshold", cfg.cell_support_threshold},
             {"L", stats.level_support},
             {"L_alphaY", stats.scatter_level_support},
             {"gamma", stats.scatter_number},
             {"histogram", std::move(hist)}};
    if (o.per_pair) {
        json pairs = json::array();
        for (const auto& p : stats.per_pair) {
            pairs.push_back({{"leaf", p.leaf},
                             {"layer", p.layer},
                             {"queries", p.queries},
                             {"cells", p.cells},
                             {"scattered", p.scattered}});
        }
        doc["per_pair"] = std::move(pairs);
    }
    Sink sink(o.output, out);
    *sink << doc.dump(2) << '\n';
    return exit_ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Succinct 2D orthogonal range reporting with cell-probe auditing"};
    app.name("ballvault");
    app.require_subcommand(1);
    const std::string grammar = "strategy: " + std::string(strategy_grammar);

    GenOptions gen;
    auto* g = app.add_subcommand("gen", "Generate a deterministic point file");
    g->add_option("-n,--n", gen.n, "Number of points")->required();
    g->add_option("-U,--universe", gen.universe, "Coordinates lie in [0, U)")->required();
    g->add_option("--seed", gen.seed, "RNG seed");
    g->add_option("--dist", gen.dist, "uniform | grid-diagonal | clustered");
    g->add_option("--format", gen.format, "text | binary");
    g->add_option("-o,--output", gen.output, "Output path (default stdout)");

    BuildOptions build;
    auto* b = app.add_subcommand("build", "Build a range reporter and serialize it");
    b->add_option("-i,--input", build.input, "Point file")->required();
    b->add_option("-s,--strategy", build.strategy, grammar);
    b->add_option("--rmq", build.rmq, "succinct | debug");
    b->add_option("-o,--output", build.output, "Index path")->required();

    QueryOptions query;
    auto* q = app.add_subcommand("query", "Report the points inside rectangles");
    q->add_option("--index", query.index, "Serialized index from `build`");
    q->add_option("-i,--input", query.input, "Point file (builds in memory)");
    q->add_option("-s,--strategy", query.strategy, grammar + " (with --input)");
    q->add_option("-r,--rect", query.rects, "x0,x1,y0,y1 (inclusive; repeatable)");
    q->add_option("--queries", query.queries, "File with one 'x0 x1 y0 y1' rectangle per line");
    q->add_option("--format", query.format, "text | json");
    q->add_flag("--count", query.count_only, "Print counts only");
    q->add_option("-o,--output", query.output, "Output path (default stdout)");

    BenchOptions bench;
    auto* be = app.add_subcommand("bench", "Space / probe tradeoff table over strategies");
    be->add_option("-i,--input", bench.input, "Point file")->required();
    be->add_option("--strategies", bench.strategies, "Comma-separated list; " + grammar);
    be->add_option("--queries", bench.queries, "Number of random (node, ball) queries");
    be->add_option("--seed", bench.seed, "Workload seed");
    be->add_option("-Y,--zoom", bench.zoom, "Layer height Y");
    be->add_option("--alpha", bench.alpha, "Scatter coarsening factor");
    be->add_option("--format", bench.format, "csv | json");
    be->add_option("-o,--output", bench.output, "Output path (default stdout)");

    AuditOptions audit;
    auto* a = app.add_subcommand("audit", "Level support and scatter number as JSON");
    a->add_option("-i,--input", audit.input, "Point file")->required();
    a->add_option("-s,--strategy", audit.strategy, grammar);
    a->add_option("-Y,--zoom", audit.zoom, "Layer height Y; Y * alpha must divide lg n");
    a->add_option("--alpha", audit.alpha, "Scatter coarsening factor");
    a->add_option("--popularity", audit.popularity, "k for k-popular cells");
    a->add_option("--cell-support", audit.cell_support, "Cell-support size that scatters a pair");
    a->add_option("--preset", audit.preset, "accept-all | accept-none | formula");
    a->add_flag("--per-pair", audit.per_pair, "Include the per (leaf, layer) dump");
    a->add_option("-o,--output", audit.output, "Output path (default stdout)");

    std::vector<std::string> argv_store{"ballvault"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) {
        argv.push_back(s.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (g->parsed()) {
            return cmd_gen(gen, out);
        }
        if (b->parsed()) {
            return cmd_build(build, out, err);
        }
        if (q->parsed()) {
            return cmd_query(query, out);
        }
        if (be->parsed()) {
            return cmd_bench(bench, out, err);
        }
        return cmd_audit(audit, out);
    } catch (const validation_error& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const config_error& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const range_error& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    }
}

} // namespace ballvault::cli
