#pragma once

#include <psdcone/coneapprox.hpp>
#include <psdcone/error.hpp>
#include <psdcone/frame_set.hpp>
#include <psdcone/frames.hpp>
#include <psdcone/generators.hpp>
#include <psdcone/symmat.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace psdcone {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kFrameSetFormat = "psdcone.frameset/1";

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

inline json rows_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd rows_from_json(const json& rows) {
    if (!rows.is_array()) throw ParseError("matrix rows must be an array of arrays");
    const auto r = static_cast<Index>(rows.size());
    const Index c = r == 0 ? 0 : static_cast<Index>(rows.front().size());
    Eigen::MatrixXd m(r, c);
    for (Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != c) throw DimensionError("ragged matrix rows");
        for (Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return m;
}

/// {"dim": n, "rows": [[...], ...]}, row-major, full storage.
inline json to_json(const SymMatrix& m) { return json{{"dim", m.dim()}, {"rows", rows_to_json(m.dense())}}; }

inline SymMatrix sym_from_json(const json& j) {
    try {
        const Eigen::MatrixXd raw = rows_from_json(j.at("rows"));
        if (j.contains("dim") && j.at("dim").get<Index>() != raw.rows()) {
            throw DimensionError("matrix 'dim' disagrees with its rows");
        }
        return SymMatrix(raw);
    } catch (const json::exception& e) {
        throw ParseError(std::string("matrix JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

/// {"n", "s", "columns": [[column 0], [column 1], ...]} (column-major).
inline json to_json(const Frame& f) {
    json cols = json::array();
    for (Index c = 0; c < f.sub_dim(); ++c) {
        json col = json::array();
        for (Index r = 0; r < f.ambient_dim(); ++r) col.push_back(f.columns()(r, c));
        cols.push_back(std::move(col));
    }
    return json{{"n", f.ambient_dim()}, {"s", f.sub_dim()}, {"columns", std::move(cols)}};
}

/// Accepts nested columns or one flat column-major list of n*s numbers.
inline Frame frame_from_json(const json& j, double tol = kStiefelTol) {
    try {
        const auto n = j.at("n").get<Index>();
        const auto s = j.at("s").get<Index>();
        if (n < 1 || s < 1) throw DimensionError("frame JSON: n and s must be positive");
        const auto& cols = j.at("columns");
        Eigen::MatrixXd m(n, s);
        if (!cols.empty() && cols.front().is_array()) {
            if (static_cast<Index>(cols.size()) != s) throw DimensionError("frame JSON: expected s columns");
            for (Index c = 0; c < s; ++c) {
                const auto& col = cols[static_cast<std::size_t>(c)];
                if (static_cast<Index>(col.size()) != n) throw DimensionError("frame JSON: column length differs from n");
                for (Index r = 0; r < n; ++r) m(r, c) = col[static_cast<std::size_t>(r)].get<double>();
            }
        } else {
            if (static_cast<Index>(cols.size()) != n * s) throw DimensionError("frame JSON: expected n*s entries");
            for (Index c = 0; c < s; ++c)
                for (Index r = 0; r < n; ++r) m(r, c) = cols[static_cast<std::size_t>(c * n + r)].get<double>();
        }
        return Frame::from_columns(m, tol);
    } catch (const json::exception& e) {
        throw ParseError(std::string("frame JSON: ") + e.what());
    }
}

inline json columns_to_json(const Frame& f) { return to_json(f).at("columns"); }

/// Frame-set document: a metadata header followed by the frames.
inline json to_json(const FrameSet& set, const json& extra_meta = json::object()) {
    json meta = {{"generator", set.provenance().generator},
                 {"params", set.provenance().params},
                 {"seed", set.provenance().seed},
                 {"count", set.size()},
                 {"n", set.ambient_dim()}};
    if (const auto s = set.uniform_sub_dim()) meta["s"] = *s;
    meta["min_chordal"] = set.min_chordal() ? json(*set.min_chordal()) : json();
    if (set.min_chordal()) meta["min_cone_distance"] = std::sqrt(2.0) * *set.min_chordal();
    for (const auto& [key, value] : extra_meta.items()) meta[key] = value;
    json frames = json::array();
    for (const auto& f : set) frames.push_back(to_json(f));
    return json{{"format", kFrameSetFormat}, {"meta", std::move(meta)}, {"frames", std::move(frames)}};
}

inline FrameSet frame_set_from_json(const json& j) {
    try {
        const auto& fr = j.at("frames");
        std::vector<Frame> frames;
        frames.reserve(fr.size());
        for (const auto& f : fr) frames.push_back(frame_from_json(f));
        Provenance prov;
        if (j.contains("meta")) {
            const auto& meta = j.at("meta");
            prov.generator = meta.value("generator", std::string{});
            prov.params = meta.value("params", json::object());
            prov.seed = meta.value("seed", std::uint64_t{0});
        }
        FrameSet set(std::move(frames), std::move(prov));
        if (j.contains("meta") && j.at("meta").contains("min_chordal") && !j.at("meta").at("min_chordal").is_null()) {
            set.set_min_chordal(j.at("meta").at("min_chordal").get<double>());
        }
        return set;
    } catch (const json::exception& e) {
        throw ParseError(std::string("frame set JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Graphs, projections, restricted SDPs
// ---------------------------------------------------------------------------

/// Cliques and elimination order with 1-based vertex labels.
inline json to_json(const ChordalGraph& g) {
    json cliques = json::array();
    for (const auto& c : g.maximal_cliques) {
        json row = json::array();
        for (Index v : c) row.push_back(v + 1);
        cliques.push_back(std::move(row));
    }
    json order = json::array();
    for (Index v : g.elimination_order) order.push_back(v + 1);
    return json{{"n", g.vertex_count}, {"edges", g.edges.size()}, {"elimination_order", order}, {"maximal_cliques", cliques}};
}

inline json to_json(const ProjectionResult& r, bool with_witnesses) {
    json out = {{"n", r.X.dim()},
                {"error", r.error},
                {"kkt_residual", r.kkt_residual},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"X", to_json(r.X)}};
    if (with_witnesses) {
        json w = json::array();
        for (const auto& y : r.witnesses) w.push_back(to_json(y));
        out["witnesses"] = std::move(w);
    }
    return out;
}

/// {"n", "blocks": [{"s", "frame", "objective", "constraints"}], "rhs", "sense": "min"}.
inline json to_json(const RestrictedSdp& p) {
    json blocks = json::array();
    for (const auto& b : p.blocks) {
        json cons = json::array();
        for (const auto& c : b.constraints) cons.push_back(rows_to_json(c.dense()));
        blocks.push_back(json{{"s", b.frame.sub_dim()},
                              {"frame", columns_to_json(b.frame)},
                              {"objective", rows_to_json(b.objective.dense())},
                              {"constraints", std::move(cons)}});
    }
    return json{{"n", p.n}, {"blocks", std::move(blocks)}, {"rhs", p.rhs}, {"sense", "min"}};
}

/// Problem file for export: {"objective": matrix, "constraints": [{"matrix": matrix, "rhs": b}]}.
struct SdpProblem {
    SymMatrix objective;
    std::vector<LinearConstraint> constraints;
};

inline SdpProblem sdp_problem_from_json(const json& j) {
    try {
        SdpProblem p{sym_from_json(j.at("objective")), {}};
        if (j.contains("constraints")) {
            for (const auto& c : j.at("constraints")) {
                p.constraints.push_back(LinearConstraint{sym_from_json(c.at("matrix")), c.at("rhs").get<double>()});
            }
        }
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("SDP problem JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    out << text;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

} // namespace psdcone
