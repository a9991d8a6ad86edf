#pragma once

#include <psdcone/coneapprox.hpp>
#include <psdcone/error.hpp>
#include <psdcone/frame_set.hpp>
#include <psdcone/generators.hpp>
#include <psdcone/io.hpp>
#include <psdcone/packing.hpp>
#include <psdcone/rng.hpp>
#include <psdcone/symmat.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace psdcone {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// One approximation family in an experiment.
struct MethodSpec {
    enum class Kind { dd, sdd, fwk, chordal, packed };
    Kind kind = Kind::sdd;
    Index k = 0;      // fwk
    Index N = 0;      // packed
    std::string path; // chordal edge list

    /// Round-trips through parse_method.
    std::string label() const {
        switch (kind) {
        case Kind::dd: return "dd";
        case Kind::sdd: return "sdd";
        case Kind::fwk: return "fw" + std::to_string(k);
        case Kind::chordal: return "chordal:" + path;
        case Kind::packed: return "packed:" + std::to_string(N);
        }
        return "?";
    }
    bool depends_on_s() const noexcept { return kind == Kind::packed; }
};

/// Accepts dd, sdd, fw<k> / fw:<k>, chordal:<edge-list path>, packed:<N> / packed(<N>).
inline MethodSpec parse_method(const std::string& text) {
    auto number = [&](const std::string& digits) -> Index {
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
            throw ParseError("bad method '" + text + "'");
        }
        return static_cast<Index>(std::stoll(digits));
    };
    if (text == "dd") return {MethodSpec::Kind::dd, 0, 0, {}};
    if (text == "sdd") return {MethodSpec::Kind::sdd, 2, 0, {}};
    if (text.rfind("fw", 0) == 0) {
        std::string rest = text.substr(2);
        if (!rest.empty() && (rest[0] == ':' || rest[0] == 'k')) rest = rest.substr(1);
        if (!rest.empty() && rest[0] == ':') rest = rest.substr(1);
        return {MethodSpec::Kind::fwk, number(rest), 0, {}};
    }
    if (text.rfind("chordal:", 0) == 0) return {MethodSpec::Kind::chordal, 0, 0, text.substr(8)};
    if (text.rfind("packed:", 0) == 0) return {MethodSpec::Kind::packed, 0, number(text.substr(7)), {}};
    if (text.rfind("packed(", 0) == 0 && text.back() == ')') {
        return {MethodSpec::Kind::packed, 0, number(text.substr(7, text.size() - 8)), {}};
    }
    throw ParseError("unknown method '" + text + "'");
}

struct ExperimentConfig {
    std::string experiment = "fig1";
    Index n = 20;
    std::vector<Index> n_range;
    std::vector<MethodSpec> methods;
    std::vector<Index> s_range;
    int trials = 100;
    std::uint64_t seed = 0;
    /// Projection solver.
    double tol = 1e-7;
    int max_iter = 10000;
    /// fig2: target mean error and probe cap.
    double threshold = 0.01;
    Index n_cap = 4096;
    /// Packing solver used for packed(N) methods.
    int pack_max_iter = 5000;
    double pack_tol = 1e-8;
    int pack_restarts = 10;
    /// fig1: build larger packed(N) sets by extending the next smaller one.
    bool nested = true;
    int extend_candidates = 32;
    std::string workdir = ".psdcone";
    bool no_compute = false;
    bool timings = false;
    std::string out;

    /// Reference grid: n = 20, SDD, FW3, packed N in {1, 30, 190, 350}, s = 1..20, 100 trials.
    static ExperimentConfig fig1_default() {
        ExperimentConfig c;
        c.experiment = "fig1";
        c.n = 20;
        c.methods = {parse_method("sdd"), parse_method("fw3"), parse_method("packed:1"), parse_method("packed:30"),
                     parse_method("packed:190"), parse_method("packed:350")};
        for (Index s = 1; s <= c.n; ++s) c.s_range.push_back(s);
        c.trials = 100;
        return c;
    }

    static ExperimentConfig fig2_default() {
        ExperimentConfig c;
        c.experiment = "fig2";
        c.n_range = {2, 3, 4, 5, 6};
        c.s_range = {2};
        c.methods = {};
        c.trials = 100;
        return c;
    }

    /// Desk-scale variant: n = 10 (fig2: n in 2..5) and 20 trials.
    void apply_small_preset() {
        trials = 20;
        if (experiment == "fig1") {
            n = 10;
            s_range.clear();
            for (Index s = 1; s <= n; ++s) s_range.push_back(s);
        } else {
            n_range = {2, 3, 4, 5};
        }
    }

    void validate() const {
        if (experiment != "fig1" && experiment != "fig2") throw DimensionError("experiment must be fig1 or fig2");
        if (trials < 1) throw DimensionError("trials must be >= 1");
        if (!(tol > 0.0) || max_iter < 1) throw DimensionError("solver tol/max_iter must be positive");
        if (s_range.empty()) throw DimensionError("s_range is empty");
        if (experiment == "fig1") {
            if (n < 1) throw DimensionError("n must be >= 1");
            if (methods.empty()) throw DimensionError("no methods configured");
            for (Index s : s_range)
                if (s < 1 || s > n) throw DimensionError("s_range entries must lie in [1, n]");
            for (const auto& m : methods) {
                if (m.kind == MethodSpec::Kind::fwk && (m.k < 1 || m.k > n)) throw DimensionError("fw k out of range");
                if (m.kind == MethodSpec::Kind::sdd && n < 2) throw DimensionError("sdd needs n >= 2");
                if (m.kind == MethodSpec::Kind::packed && m.N < 1) throw DimensionError("packed N must be >= 1");
            }
        } else {
            if (!(threshold > 0.0)) throw DimensionError("fig2 threshold must be positive");
            if (n_range.empty()) throw DimensionError("n_range is empty");
            if (n_cap < 1) throw DimensionError("N cap must be positive");
            for (Index v : n_range)
                if (v < 1) throw DimensionError("n_range entries must be >= 1");
            for (Index s : s_range)
                if (s < 1) throw DimensionError("s_range entries must be >= 1");
        }
    }
};

inline json to_json(const ExperimentConfig& c) {
    json methods = json::array();
    for (const auto& m : c.methods) methods.push_back(m.label());
    return json{{"experiment", c.experiment},
                {"n", c.n},
                {"n_range", c.n_range},
                {"methods", methods},
                {"s_range", c.s_range},
                {"trials", c.trials},
                {"seed", c.seed},
                {"tol", c.tol},
                {"max_iter", c.max_iter},
                {"threshold", c.threshold},
                {"n_cap", c.n_cap},
                {"pack_max_iter", c.pack_max_iter},
                {"pack_tol", c.pack_tol},
                {"pack_restarts", c.pack_restarts},
                {"nested", c.nested},
                {"extend_candidates", c.extend_candidates},
                {"workdir", c.workdir},
                {"no_compute", c.no_compute},
                {"timings", c.timings},
                {"out", c.out}};
}

/// Overlays the keys present in `j` onto `base`.
inline ExperimentConfig experiment_config_from_json(const json& j, ExperimentConfig base = {}) {
    try {
        auto take = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        take("experiment", base.experiment);
        take("n", base.n);
        take("n_range", base.n_range);
        take("s_range", base.s_range);
        take("trials", base.trials);
        take("seed", base.seed);
        take("tol", base.tol);
        take("max_iter", base.max_iter);
        take("threshold", base.threshold);
        take("n_cap", base.n_cap);
        take("pack_max_iter", base.pack_max_iter);
        take("pack_tol", base.pack_tol);
        take("pack_restarts", base.pack_restarts);
        take("nested", base.nested);
        take("extend_candidates", base.extend_candidates);
        take("workdir", base.workdir);
        take("no_compute", base.no_compute);
        take("timings", base.timings);
        take("out", base.out);
        if (j.contains("methods")) {
            base.methods.clear();
            for (const auto& m : j.at("methods")) base.methods.push_back(parse_method(m.get<std::string>()));
        }
        return base;
    } catch (const json::exception& e) {
        throw ParseError(std::string("experiment config: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Packing catalog
// ---------------------------------------------------------------------------

/// Identity of a cached frame set: sizes, seed and construction parameters.
struct CatalogKey {
    Index n = 0;
    Index s = 0;
    Index N = 0;
    std::uint64_t seed = 0;
    json params = json::object();

    json to_json() const { return json{{"n", n}, {"s", s}, {"N", N}, {"seed", seed}, {"params", params}}; }

    std::string digest() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_string(to_json().dump())));
        return buf;
    }
};

/// Content-addressed store of frame sets under <root>/catalog so expensive
/// packings are computed once. An empty root keeps everything in memory.
class PackingCatalog {
public:
    explicit PackingCatalog(std::filesystem::path root = {}, bool allow_compute = true)
        : root_(std::move(root)), allow_compute_(allow_compute) {}

    std::optional<FrameSet> lookup(const CatalogKey& key) const {
        const auto d = key.digest();
        if (auto it = memory_.find(d); it != memory_.end()) return it->second;
        if (root_.empty()) return std::nullopt;
        const auto file = dir() / (d + ".json");
        if (!std::filesystem::exists(file)) return std::nullopt;
        const json doc = read_json_file(file);
        if (doc.at("meta").value("catalog_key", json()) != key.to_json()) {
            throw ParseError("catalog entry " + file.string() + " does not match its key");
        }
        FrameSet set = frame_set_from_json(doc);
        set.validate();
        memory_.emplace(d, set);
        return set;
    }

    void store(const CatalogKey& key, const FrameSet& set) {
        const auto d = key.digest();
        memory_.insert_or_assign(d, set);
        if (root_.empty()) return;
        std::filesystem::create_directories(dir());
        write_json_file(dir() / (d + ".json"), psdcone::to_json(set, json{{"catalog_key", key.to_json()}}));
        json index = std::filesystem::exists(dir() / "index.json") ? read_json_file(dir() / "index.json") : json::object();
        index[d] = json{{"key", key.to_json()},
                        {"file", d + ".json"},
                        {"achieved_min_chordal", set.min_chordal() ? json(*set.min_chordal()) : json()}};
        write_json_file(dir() / "index.json", index);
    }

    /// Cached set for `key`, building and storing it on a miss.
    FrameSet get_or_build(const CatalogKey& key, const std::function<FrameSet()>& build) {
        if (auto hit = lookup(key)) return *hit;
        if (!allow_compute_) {
            throw CatalogMiss("no cached frame set for n=" + std::to_string(key.n) + " s=" + std::to_string(key.s) +
                              " N=" + std::to_string(key.N) + " (key " + key.digest() + ")");
        }
        FrameSet set = build();
        store(key, set);
        return set;
    }

    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path dir() const { return root_ / "catalog"; }

    std::filesystem::path root_;
    bool allow_compute_;
    mutable std::map<std::string, FrameSet> memory_;
};

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

/// Target matrix for one trial. Depends only on (base seed, n, trial), so
/// every method and every s sees the same matrices.
inline SymMatrix experiment_target(std::uint64_t seed, Index n, int trial) {
    return random_psd_normalized(n, derive_seed(seed, hash_string("target"), static_cast<std::uint64_t>(n),
                                                static_cast<std::uint64_t>(trial)));
}

inline std::uint64_t matrix_hash(const SymMatrix& m) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    const double* p = m.dense().data();
    for (Index i = 0; i < m.dense().size(); ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, p + i, sizeof bits);
        h = mix64(h ^ bits);
    }
    return h;
}

using ProgressFn = std::function<void(const std::string&)>;

/// Builds packed(N) frame sets for fixed (n, s) through the catalog.
class PackedFrameFactory {
public:
    PackedFrameFactory(const ExperimentConfig& cfg, PackingCatalog& catalog, ProgressFn progress = {})
        : cfg_(cfg), catalog_(catalog), progress_(std::move(progress)) {}

    /// Single seeded random frame (N = 1).
    FrameSet single(Index n, Index s) {
        CatalogKey key{n, s, 1, seed_for(n, s, 1), json{{"method", "random"}}};
        return catalog_.get_or_build(key, [&] {
            return FrameSet({random_frame(n, s, key.seed)}, Provenance{"random", {{"n", n}, {"s", s}}, key.seed});
        });
    }

    /// Alternating-projection packing of N >= 2 frames.
    FrameSet packed(Index n, Index s, Index N) {
        if (N == 1) return single(n, s);
        CatalogKey key{n, s, N, seed_for(n, s, N), pack_params()};
        return catalog_.get_or_build(key, [&] {
            note("packing n=" + std::to_string(n) + " s=" + std::to_string(s) + " N=" + std::to_string(N));
            PackingConfig pc;
            pc.n = n;
            pc.s = s;
            pc.N = N;
            pc.max_iter = cfg_.pack_max_iter;
            pc.tol = cfg_.pack_tol;
            pc.restarts = cfg_.pack_restarts;
            pc.seed = key.seed;
            return pack(pc).frames;
        });
    }

    /// Sets for every N in `counts` at (n, s). With nesting, the smallest
    /// N >= 2 is packed and each larger set extends the previous one.
    std::map<Index, FrameSet> family(Index n, Index s, std::vector<Index> counts, bool nested) {
        std::sort(counts.begin(), counts.end());
        counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
        std::map<Index, FrameSet> out;
        std::optional<FrameSet> prev;
        std::optional<CatalogKey> prev_key;
        for (Index N : counts) {
            if (N == 1) {
                out.emplace(N, single(n, s));
                continue;
            }
            if (!nested || !prev) {
                out.emplace(N, packed(n, s, N));
                prev = out.at(N);
                prev_key = CatalogKey{n, s, N, seed_for(n, s, N), pack_params()};
                continue;
            }
            json params{{"method", "extend"}, {"base", prev_key->digest()}, {"candidates", cfg_.extend_candidates}};
            CatalogKey key{n, s, N, seed_for(n, s, N), params};
            const FrameSet base = *prev;
            FrameSet grown = catalog_.get_or_build(key, [&] {
                note("extending n=" + std::to_string(n) + " s=" + std::to_string(s) + " to N=" + std::to_string(N));
                return extend_packing(base, N, key.seed, cfg_.extend_candidates);
            });
            out.emplace(N, grown);
            prev = grown;
            prev_key = key;
        }
        return out;
    }

private:
    json pack_params() const {
        return json{{"method", "pack"},
                    {"max_iter", cfg_.pack_max_iter},
                    {"tol", cfg_.pack_tol},
                    {"restarts", cfg_.pack_restarts}};
    }
    std::uint64_t seed_for(Index n, Index s, Index N) const {
        return derive_seed(cfg_.seed, hash_string("frames"), static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s),
                           static_cast<std::uint64_t>(N));
    }
    void note(const std::string& msg) const {
        if (progress_) progress_(msg);
    }

    const ExperimentConfig& cfg_;
    PackingCatalog& catalog_;
    ProgressFn progress_;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Fig. 1: approximation error by method and sub-cone size
// ---------------------------------------------------------------------------

struct ResultRow {
    std::string method;
    Index n = 0;
    Index s = 0;
    Index N = 0;
    int trial = 0;
    double error = 0.0;
    bool converged = false;
    double seconds = 0.0;
    /// Hash of the target matrix; not part of the CSV.
    std::uint64_t target_hash = 0;
};

struct SummaryRow {
    std::string method;
    Index n = 0;
    Index s = 0;
    Index N = 0;
    int trials = 0;
    double mean_error = 0.0;
    double max_error = 0.0;
    double converged_fraction = 0.0;
};

struct Fig1Output {
    std::vector<ResultRow> rows;
    std::vector<SummaryRow> summary;

    /// Mean error of (method label, s), if present.
    std::optional<double> mean(const std::string& method, Index s) const {
        for (const auto& r : summary)
            if (r.method == method && r.s == s) return r.mean_error;
        return std::nullopt;
    }
};

inline constexpr const char* kResultCsvHeader = "method,n,s,N,trial,error,converged,seconds";

/// Per-trial rows in fixed column order. Without timings the seconds column
/// is 0 so the body is byte-reproducible.
inline std::string result_rows_csv(const std::vector<ResultRow>& rows, bool timings) {
    std::ostringstream os;
    os << kResultCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.method << ',' << r.n << ',' << r.s << ',' << r.N << ',' << r.trial << ',' << format_double(r.error) << ','
           << (r.converged ? 1 : 0) << ',' << (timings ? format_double(r.seconds) : std::string("0")) << '\n';
    }
    return os.str();
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream os;
    os << "method,n,s,N,trials,mean_error,max_error,converged_fraction\n";
    for (const auto& r : rows) {
        os << r.method << ',' << r.n << ',' << r.s << ',' << r.N << ',' << r.trials << ',' << format_double(r.mean_error)
           << ',' << format_double(r.max_error) << ',' << format_double(r.converged_fraction) << '\n';
    }
    return os.str();
}

namespace detail {

inline FrameSet method_frames(const MethodSpec& m, Index n) {
    switch (m.kind) {
    case MethodSpec::Kind::dd: return dd_frames(n);
    case MethodSpec::Kind::sdd: return fw_frames(n, 2);
    case MethodSpec::Kind::fwk: return fw_frames(n, m.k);
    case MethodSpec::Kind::chordal: {
        std::ifstream in(m.path);
        if (!in) throw ParseError("cannot open edge list " + m.path);
        auto [vertices, edges] = read_edge_list(in);
        if (vertices != n) throw DimensionError("graph in " + m.path + " has " + std::to_string(vertices) + " vertices, expected " + std::to_string(n));
        return chordal_frames(verify_chordal(vertices, std::move(edges)));
    }
    case MethodSpec::Kind::packed: break;
    }
    throw DimensionError("packed frames are built per sub-cone size");
}

inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    std::vector<SummaryRow> out;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const SummaryRow& s) { return s.method == r.method && s.s == r.s && s.n == r.n; });
        if (it == out.end()) {
            out.push_back(SummaryRow{r.method, r.n, r.s, r.N, 0, 0.0, 0.0, 0.0});
            it = std::prev(out.end());
        }
        it->trials += 1;
        it->mean_error += r.error;
        it->max_error = std::max(it->max_error, r.error);
        it->converged_fraction += r.converged ? 1.0 : 0.0;
    }
    for (auto& s : out) {
        s.mean_error /= s.trials;
        s.converged_fraction /= s.trials;
    }
    return out;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

/// Projects the same random targets onto every configured approximation.
/// Rows come out ordered by (method as configured, s, trial).
inline Fig1Output run_fig1(const ExperimentConfig& cfg, PackingCatalog& catalog, const ProgressFn& progress = {}) {
    cfg.validate();
    if (cfg.experiment != "fig1") throw DimensionError("run_fig1 needs a fig1 configuration");
    const Index n = cfg.n;
    std::vector<SymMatrix> targets;
    std::vector<std::uint64_t> hashes;
    for (int t = 0; t < cfg.trials; ++t) {
        targets.push_back(experiment_target(cfg.seed, n, t));
        hashes.push_back(matrix_hash(targets.back()));
    }
    const ProjectionOptions opt{cfg.tol, cfg.max_iter};

    std::vector<Index> packed_counts;
    for (const auto& m : cfg.methods)
        if (m.kind == MethodSpec::Kind::packed) packed_counts.push_back(m.N);
    PackedFrameFactory factory(cfg, catalog, progress);
    std::map<Index, std::map<Index, FrameSet>> packed_by_s;
    if (!packed_counts.empty()) {
        for (Index s : cfg.s_range) packed_by_s.emplace(s, factory.family(n, s, packed_counts, cfg.nested));
    }

    auto evaluate = [&](const std::string& label, const ConeSum& cone, Index s, std::vector<ResultRow>& rows) {
        if (progress) progress(label + " s=" + std::to_string(s) + " N=" + std::to_string(cone.size()));
        for (int t = 0; t < cfg.trials; ++t) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = project_onto_cone_sum(targets[static_cast<std::size_t>(t)], cone, opt);
            rows.push_back(ResultRow{label, n, s, static_cast<Index>(cone.size()), t, res.error, res.converged,
                                     detail::seconds_since(t0), hashes[static_cast<std::size_t>(t)]});
        }
    };

    Fig1Output out;
    for (const auto& m : cfg.methods) {
        if (m.depends_on_s()) {
            for (Index s : cfg.s_range) evaluate(m.label(), ConeSum(packed_by_s.at(s).at(m.N)), s, out.rows);
        } else {
            FrameSet frames = detail::method_frames(m, n);
            const Index s = frames.max_sub_dim();
            evaluate(m.label(), ConeSum(std::move(frames)), s, out.rows);
        }
    }
    out.summary = detail::summarize(out.rows);
    return out;
}

/// Paired-target check: rows sharing a trial index saw the same matrix.
inline bool targets_paired(const std::vector<ResultRow>& rows) {
    std::map<int, std::uint64_t> seen;
    for (const auto& r : rows) {
        auto [it, fresh] = seen.emplace(r.trial, r.target_hash);
        if (!fresh && it->second != r.target_hash) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Fig. 2: frames needed to reach a target mean error
// ---------------------------------------------------------------------------

struct Fig2Row {
    Index n = 0;
    Index s = 0;
    Index N_required = 0;
    double mean_error = 0.0;
    int probes = 0;
    bool cap_reached = false;
};

inline std::string fig2_csv(const std::vector<Fig2Row>& rows) {
    std::ostringstream os;
    os << "n,s,N_required,mean_error,probes,cap_reached\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.s << ',' << r.N_required << ',' << format_double(r.mean_error) << ',' << r.probes << ','
           << (r.cap_reached ? 1 : 0) << '\n';
    }
    return os.str();
}

/// Smallest N whose packed(N) mean error over the trials falls below the
/// threshold, by doubling N and then bisecting the last bracket.
inline std::vector<Fig2Row> run_fig2(const ExperimentConfig& cfg, PackingCatalog& catalog, const ProgressFn& progress = {}) {
    cfg.validate();
    if (cfg.experiment != "fig2") throw DimensionError("run_fig2 needs a fig2 configuration");
    const ProjectionOptions opt{cfg.tol, cfg.max_iter};
    PackedFrameFactory factory(cfg, catalog, progress);
    std::vector<Fig2Row> rows;

    for (Index n : cfg.n_range) {
        std::vector<SymMatrix> targets;
        for (int t = 0; t < cfg.trials; ++t) targets.push_back(experiment_target(cfg.seed, n, t));
        for (Index s : cfg.s_range) {
            if (s > n) continue;
            std::map<Index, double> probed;
            auto mean_error = [&](Index N) {
                if (auto it = probed.find(N); it != probed.end()) return it->second;
                const ConeSum cone(factory.packed(n, s, N));
                double total = 0.0;
                for (const auto& a : targets) total += project_onto_cone_sum(a, cone, opt).error;
                const double mean = total / static_cast<double>(targets.size());
                if (progress) progress("fig2 n=" + std::to_string(n) + " s=" + std::to_string(s) + " N=" + std::to_string(N) + " mean=" + format_double(mean));
                probed.emplace(N, mean);
                return mean;
            };
            auto passes = [&](Index N) { return mean_error(N) < cfg.threshold; };

            Fig2Row row{n, s, 0, 0.0, 0, false};
            Index lo = 0; // largest probed failure
            Index hi = 0; // smallest probed success
            for (Index N = 1;; N *= 2) {
                const Index probe = std::min(N, cfg.n_cap);
                if (passes(probe)) {
                    hi = probe;
                    break;
                }
                lo = probe;
                if (probe == cfg.n_cap) break;
            }
            if (hi == 0) {
                row.N_required = cfg.n_cap;
                row.cap_reached = true;
            } else {
                while (hi - lo > 1) {
                    const Index mid = lo + (hi - lo) / 2;
                    if (passes(mid)) hi = mid;
                    else lo = mid;
                }
                row.N_required = hi;
            }
            row.mean_error = probed.at(row.N_required);
            row.probes = static_cast<int>(probed.size());
            rows.push_back(row);
        }
    }
    return rows;
}

/// Least-squares fit of log(N_required) against n; returns (slope, R^2).
inline std::pair<double, double> log_linear_fit(const std::vector<Fig2Row>& rows) {
    const auto m = static_cast<double>(rows.size());
    if (rows.size() < 2) return {0.0, 0.0};
    double sx = 0, sy = 0;
    for (const auto& r : rows) {
        sx += static_cast<double>(r.n);
        sy += std::log(static_cast<double>(r.N_required));
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& r : rows) {
        const double dx = static_cast<double>(r.n) - mx;
        const double dy = std::log(static_cast<double>(r.N_required)) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return {0.0, 0.0};
    const double slope = sxy / sxx;
    return {slope, (sxy * sxy) / (sxx * syy)};
}

} // namespace psdcone
