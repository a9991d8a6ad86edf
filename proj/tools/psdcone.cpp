// psdcone command-line tool: packing, frame generation, projection, SDP
// export and the two figure experiments.

#include <psdcone/psdcone.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace psdcone;

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kNumerical = 3,
    kNotConverged = 4,
    kCatalogMiss = 5,
};

struct Invocation {
    std::vector<std::string> argv;
    bool timestamps = false;
    bool quiet = false;
};

Invocation g_invocation;

json provenance(std::uint64_t seed) {
    json p{{"tool", "psdcone"}, {"version", kVersion}, {"argv", g_invocation.argv}, {"seed", seed}};
    if (g_invocation.timestamps) p["timestamp"] = static_cast<std::int64_t>(std::time(nullptr));
    return p;
}

std::string csv_header(std::uint64_t seed, const json& config) {
    std::ostringstream os;
    os << "# psdcone " << kVersion << '\n';
    os << "# argv:";
    for (const auto& a : g_invocation.argv) os << ' ' << a;
    os << '\n';
    os << "# seed: " << seed << '\n';
    os << "# sampler: " << kRandomPsdSampler << '\n';
    os << "# config: " << config.dump() << '\n';
    if (g_invocation.timestamps) os << "# timestamp: " << std::time(nullptr) << '\n';
    return os.str();
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        write_text_file(path, text);
    }
}

void emit_json(const std::string& path, const json& doc) { emit(path, doc.dump(2) + "\n"); }

void progress(const std::string& msg) {
    if (!g_invocation.quiet) std::cerr << "[psdcone] " << msg << '\n';
}

std::vector<Index> parse_index_list(const std::string& text) {
    // "1..20", "1,2,5" or a mix such as "1..4,8".
    std::vector<Index> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            const auto dots = item.find("..");
            if (dots == std::string::npos) {
                out.push_back(static_cast<Index>(std::stoll(item)));
            } else {
                const auto lo = std::stoll(item.substr(0, dots));
                const auto hi = std::stoll(item.substr(dots + 2));
                for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<Index>(v));
            }
        } catch (const std::logic_error&) {
            throw ParseError("bad integer list '" + text + "'");
        }
    }
    if (out.empty()) throw ParseError("empty integer list '" + text + "'");
    return out;
}

FrameSet load_frames(const std::string& path) {
    FrameSet set = frame_set_from_json(read_json_file(path));
    set.validate();
    return set;
}

// ---------------------------------------------------------------------------
// pack
// ---------------------------------------------------------------------------

struct PackArgs {
    long long n = 0, s = 0, N = 0;
    std::uint64_t seed = 0;
    int restarts = 10;
    int max_iter = 5000;
    double tol = 1e-8;
    double target = 0.0;
    double shrink = 0.0;
    std::string out;
};

int run_pack(const PackArgs& a) {
    PackingConfig cfg;
    cfg.n = a.n;
    cfg.s = a.s;
    cfg.N = a.N;
    cfg.seed = a.seed;
    cfg.restarts = a.restarts;
    cfg.max_iter = a.max_iter;
    cfg.tol = a.tol;
    if (a.target > 0.0) cfg.target_distance = a.target;
    if (a.shrink > 0.0) cfg.shrink = a.shrink;
    const auto res = pack(cfg);
    for (const auto& w : res.warnings) progress("warning: " + w);
    json scores = json::array();
    for (double v : res.restart_scores) scores.push_back(std::isnan(v) ? json() : json(v));
    json meta{{"provenance", provenance(a.seed)},
              {"achieved_min_chordal", res.achieved_min_chordal},
              {"rankin_target", rankin_target(cfg.n, cfg.s, cfg.N)},
              {"iterations_used", res.iterations_used},
              {"restart_index", res.restart_index},
              {"restart_scores", scores},
              {"converged", res.converged},
              {"warnings", res.warnings}};
    emit_json(a.out, to_json(res.frames, meta));
    progress("min chordal distance " + format_double(res.achieved_min_chordal));
    return kOk;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
    std::string family;
    long long n = 0;
    long long k = 2;
    std::string graph;
    std::string out;
};

int run_gen(const GenArgs& a) {
    std::optional<FrameSet> set;
    json extra{{"provenance", provenance(0)}};
    if (a.family == "dd") {
        set = dd_frames(a.n);
    } else if (a.family == "sdd") {
        set = fw_frames(a.n, 2);
    } else if (a.family == "fw") {
        set = fw_frames(a.n, a.k);
    } else if (a.family == "chordal") {
        if (a.graph.empty()) throw ParseError("gen --family chordal needs --graph");
        std::ifstream in(a.graph);
        if (!in) throw ParseError("cannot open " + a.graph);
        auto [n, edges] = read_edge_list(in);
        const auto g = verify_chordal(n, std::move(edges));
        extra["graph"] = to_json(g);
        set = chordal_frames(g);
    } else {
        throw ParseError("unknown family '" + a.family + "' (dd, sdd, fw, chordal)");
    }
    emit_json(a.out, to_json(*set, extra));
    progress(std::to_string(set->size()) + " frames");
    return kOk;
}

// ---------------------------------------------------------------------------
// project
// ---------------------------------------------------------------------------

struct ProjectArgs {
    std::string target;
    std::string frames;
    double tol = 1e-7;
    int max_iter = 10000;
    bool witnesses = false;
    std::string out;
};

int run_project(const ProjectArgs& a) {
    const SymMatrix target = sym_from_json(read_json_file(a.target));
    const ConeSum cone(load_frames(a.frames));
    const auto res = project_onto_cone_sum(target, cone, {a.tol, a.max_iter});
    json doc = to_json(res, a.witnesses);
    doc["provenance"] = provenance(0);
    doc["frames"] = a.frames;
    doc["tol"] = a.tol;
    emit_json(a.out, doc);
    progress("error " + format_double(res.error) + " after " + std::to_string(res.iterations) + " sweeps");
    if (!res.converged) {
        std::cerr << "psdcone: projection did not converge within " << a.max_iter << " sweeps\n";
        return kNotConverged;
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// export-sdp
// ---------------------------------------------------------------------------

struct ExportArgs {
    std::string problem;
    std::string frames;
    std::string out;
};

int run_export(const ExportArgs& a) {
    const auto p = sdp_problem_from_json(read_json_file(a.problem));
    const ConeSum cone(load_frames(a.frames));
    json doc = to_json(export_restricted_sdp(p.objective, p.constraints, cone));
    doc["provenance"] = provenance(0);
    emit_json(a.out, doc);
    return kOk;
}

// ---------------------------------------------------------------------------
// fig1 / fig2
// ---------------------------------------------------------------------------

struct FigArgs {
    std::string config;
    std::string preset;
    long long n = 0;
    std::string n_range;
    std::string methods;
    std::string s_range;
    int trials = 0;
    std::uint64_t seed = 0;
    double tol = 0, threshold = 0;
    int max_iter = 0;
    long long n_cap = 0;
    int pack_max_iter = 0, pack_restarts = 0;
    double pack_tol = 0;
    bool no_nested = false;
    std::string workdir;
    bool no_compute = false;
    bool timings = false;
    std::string out;
    std::string summary;
};

ExperimentConfig build_config(const std::string& which, const FigArgs& a, CLI::App& cmd) {
    ExperimentConfig cfg = which == "fig1" ? ExperimentConfig::fig1_default() : ExperimentConfig::fig2_default();
    if (!a.config.empty()) cfg = experiment_config_from_json(read_json_file(a.config), cfg);
    cfg.experiment = which;
    if (!a.preset.empty()) {
        if (a.preset != "small") throw ParseError("unknown preset '" + a.preset + "'");
        cfg.apply_small_preset();
    }
    auto given = [&](const char* name) {
        const auto* opt = cmd.get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    if (given("--n")) {
        cfg.n = a.n;
        if (!given("--s-range") && which == "fig1") {
            cfg.s_range.clear();
            for (Index s = 1; s <= cfg.n; ++s) cfg.s_range.push_back(s);
        }
    }
    if (given("--n-range")) cfg.n_range = parse_index_list(a.n_range);
    if (given("--s-range")) cfg.s_range = parse_index_list(a.s_range);
    if (given("--methods")) {
        cfg.methods.clear();
        std::stringstream ss(a.methods);
        std::string m;
        while (std::getline(ss, m, ',')) cfg.methods.push_back(parse_method(m));
    }
    if (given("--trials")) cfg.trials = a.trials;
    if (given("--seed")) cfg.seed = a.seed;
    if (given("--tol")) cfg.tol = a.tol;
    if (given("--max-iter")) cfg.max_iter = a.max_iter;
    if (given("--threshold")) cfg.threshold = a.threshold;
    if (given("--n-cap")) cfg.n_cap = a.n_cap;
    if (given("--pack-max-iter")) cfg.pack_max_iter = a.pack_max_iter;
    if (given("--pack-restarts")) cfg.pack_restarts = a.pack_restarts;
    if (given("--pack-tol")) cfg.pack_tol = a.pack_tol;
    if (a.no_nested) cfg.nested = false;
    if (given("--workdir")) cfg.workdir = a.workdir;
    if (a.no_compute) cfg.no_compute = true;
    if (a.timings) cfg.timings = true;
    if (given("--out")) cfg.out = a.out;
    cfg.validate();
    return cfg;
}

int run_fig(const std::string& which, const FigArgs& a, CLI::App& cmd) {
    const auto cfg = build_config(which, a, cmd);
    PackingCatalog catalog(cfg.workdir, !cfg.no_compute);
    const json cfg_json = to_json(cfg);
    if (which == "fig1") {
        const auto out = run_fig1(cfg, catalog, progress);
        if (!targets_paired(out.rows)) throw NumericalError("targets differ across methods for the same trial");
        emit(cfg.out, csv_header(cfg.seed, cfg_json) + result_rows_csv(out.rows, cfg.timings));
        if (!a.summary.empty()) emit(a.summary, csv_header(cfg.seed, cfg_json) + summary_csv(out.summary));
        for (const auto& r : out.summary) {
            if (r.converged_fraction < 1.0) progress("warning: " + r.method + " s=" + std::to_string(r.s) + " had unconverged trials");
        }
    } else {
        const auto rows = run_fig2(cfg, catalog, progress);
        emit(cfg.out, csv_header(cfg.seed, cfg_json) + fig2_csv(rows));
        const auto [slope, r2] = log_linear_fit(rows);
        progress("log N_required vs n: slope " + format_double(slope) + ", R^2 " + format_double(r2));
    }
    return kOk;
}

void add_fig_options(CLI::App* cmd, FigArgs& a, bool fig1) {
    cmd->add_option("--config", a.config, "JSON experiment config; flags override it")->check(CLI::ExistingFile);
    cmd->add_option("--preset", a.preset, "desk-scale preset: small");
    if (fig1) {
        cmd->add_option("--n", a.n, "ambient dimension");
        cmd->add_option("--methods", a.methods, "comma list: dd, sdd, fw<k>, chordal:<file>, packed:<N>");
        cmd->add_flag("--no-nested", a.no_nested, "pack every packed:<N> independently");
    } else {
        cmd->add_option("--n-range", a.n_range, "ambient dimensions, e.g. 2..6");
        cmd->add_option("--threshold", a.threshold, "target mean error");
        cmd->add_option("--n-cap", a.n_cap, "largest N probed");
    }
    cmd->add_option("--s-range", a.s_range, "sub-cone sizes, e.g. 1..20 or 1,5,10");
    cmd->add_option("--trials", a.trials, "random targets per cell");
    cmd->add_option("--seed", a.seed, "base seed");
    cmd->add_option("--tol", a.tol, "projection tolerance");
    cmd->add_option("--max-iter", a.max_iter, "projection sweep cap");
    cmd->add_option("--pack-max-iter", a.pack_max_iter, "packing iteration cap");
    cmd->add_option("--pack-restarts", a.pack_restarts, "packing restarts");
    cmd->add_option("--pack-tol", a.pack_tol, "packing tolerance");
    cmd->add_option("--workdir", a.workdir, "directory for the packing catalog");
    cmd->add_flag("--no-compute", a.no_compute, "fail instead of computing missing packings");
    cmd->add_flag("--timings", a.timings, "fill the seconds column");
    cmd->add_option("--out", a.out, "output CSV (default stdout)");
    if (fig1) cmd->add_option("--summary", a.summary, "per-(method, s) summary CSV");
}

} // namespace

int main(int argc, char** argv) {
    g_invocation.argv.assign(argv, argv + argc);

    CLI::App app{"Inner approximations of the PSD cone by sums of packed sub-cones"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.add_flag("--timestamps", g_invocation.timestamps, "add timestamps to output headers");
    app.add_flag("-q,--quiet", g_invocation.quiet, "no progress messages on stderr");

    PackArgs pack_args;
    auto* pack_cmd = app.add_subcommand("pack", "Grassmannian packing by alternating projection");
    pack_cmd->add_option("--n", pack_args.n, "ambient dimension")->required();
    pack_cmd->add_option("--s", pack_args.s, "subspace dimension")->required();
    pack_cmd->add_option("--N", pack_args.N, "number of subspaces")->required();
    pack_cmd->add_option("--seed", pack_args.seed, "seed");
    pack_cmd->add_option("--restarts", pack_args.restarts, "random restarts");
    pack_cmd->add_option("--max-iter", pack_args.max_iter, "iterations per restart");
    pack_cmd->add_option("--tol", pack_args.tol, "stop when the Gram iterate moves less than this");
    pack_cmd->add_option("--target", pack_args.target, "target chordal distance (default: Rankin bound)");
    pack_cmd->add_option("--shrink", pack_args.shrink, "shrink a stalled target by this factor");
    pack_cmd->add_option("--out", pack_args.out, "output JSON (default stdout)");

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen", "structured frame families");
    gen_cmd->add_option("--family", gen_args.family, "dd, sdd, fw or chordal")->required();
    gen_cmd->add_option("--n", gen_args.n, "ambient dimension");
    gen_cmd->add_option("--k", gen_args.k, "factor width (fw)");
    gen_cmd->add_option("--graph", gen_args.graph, "edge list (chordal)");
    gen_cmd->add_option("--out", gen_args.out, "output JSON (default stdout)");

    ProjectArgs project_args;
    auto* project_cmd = app.add_subcommand("project", "project a matrix onto a cone sum");
    project_cmd->add_option("--target", project_args.target, "matrix JSON")->required()->check(CLI::ExistingFile);
    project_cmd->add_option("--frames", project_args.frames, "frame-set JSON")->required()->check(CLI::ExistingFile);
    project_cmd->add_option("--tol", project_args.tol, "sweep-change tolerance");
    project_cmd->add_option("--max-iter", project_args.max_iter, "sweep cap");
    project_cmd->add_flag("--witnesses", project_args.witnesses, "include the Y_k blocks");
    project_cmd->add_option("--out", project_args.out, "output JSON (default stdout)");

    ExportArgs export_args;
    auto* export_cmd = app.add_subcommand("export-sdp", "restrict an SDP to a cone sum");
    export_cmd->add_option("--problem", export_args.problem, "SDP JSON")->required()->check(CLI::ExistingFile);
    export_cmd->add_option("--frames", export_args.frames, "frame-set JSON")->required()->check(CLI::ExistingFile);
    export_cmd->add_option("--out", export_args.out, "output JSON (default stdout)");

    FigArgs fig1_args, fig2_args;
    auto* fig1_cmd = app.add_subcommand("fig1", "approximation error by method and sub-cone size");
    add_fig_options(fig1_cmd, fig1_args, true);
    auto* fig2_cmd = app.add_subcommand("fig2", "frames needed to reach a target error");
    add_fig_options(fig2_cmd, fig2_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*pack_cmd) return run_pack(pack_args);
        if (*gen_cmd) return run_gen(gen_args);
        if (*project_cmd) return run_project(project_args);
        if (*export_cmd) return run_export(export_args);
        if (*fig1_cmd) return run_fig("fig1", fig1_args, *fig1_cmd);
        if (*fig2_cmd) return run_fig("fig2", fig2_args, *fig2_cmd);
    } catch (const CatalogMiss& e) {
        std::cerr << "psdcone: " << e.what() << '\n';
        return kCatalogMiss;
    } catch (const ParseError& e) {
        std::cerr << "psdcone: " << e.what() << '\n';
        return kUsage;
    } catch (const DimensionError& e) {
        std::cerr << "psdcone: " << e.what() << '\n';
        return kUsage;
    } catch (const UndefinedObjectiveError& e) {
        std::cerr << "psdcone: " << e.what() << '\n';
        return kUsage;
    } catch (const ChordalityError& e) {
        std::cerr << "psdcone: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "psdcone: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "psdcone: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
