#pragma once

#include <psdcone/error.hpp>
#include <psdcone/frame_set.hpp>
#include <psdcone/frames.hpp>
#include <psdcone/rng.hpp>
#include <psdcone/symmat.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace psdcone {

/// sN x sN block Gram matrix of a configuration [F_1 ... F_N]; block (i, j)
/// is F_i^T F_j.
struct GramMatrix {
    Index block_dim = 0;
    Index block_count = 0;
    Eigen::MatrixXd entries;

    Index size() const noexcept { return block_dim * block_count; }

    auto block(Index i, Index j) { return entries.block(i * block_dim, j * block_dim, block_dim, block_dim); }
    auto block(Index i, Index j) const { return entries.block(i * block_dim, j * block_dim, block_dim, block_dim); }

    static GramMatrix from_frames(const std::vector<Frame>& frames) {
        if (frames.empty()) throw DimensionError("Gram matrix needs at least one frame");
        const Index s = frames.front().sub_dim();
        const Index n = frames.front().ambient_dim();
        const auto count = static_cast<Index>(frames.size());
        Eigen::MatrixXd config(n, s * count);
        for (Index k = 0; k < count; ++k) {
            const auto& f = frames[static_cast<std::size_t>(k)];
            if (f.sub_dim() != s || f.ambient_dim() != n) throw DimensionError("Gram matrix needs uniform frames");
            config.middleCols(k * s, s) = f.columns();
        }
        Eigen::MatrixXd g = config.transpose() * config;
        return GramMatrix{s, count, detail::symmetrized(g)};
    }
};

/// Sizes, target and budget for one packing run.
struct PackingConfig {
    Index n = 0;
    Index s = 0;
    Index N = 0;
    /// Target chordal distance d; nullopt selects rankin_target(n, s, N).
    std::optional<double> target_distance;
    int max_iter = 5000;
    double tol = 1e-8;
    int restarts = 10;
    std::uint64_t seed = 0;
    /// When set, a stalled run (iterates settled without reaching d) shrinks
    /// the target by this factor and keeps iterating.
    std::optional<double> shrink;

    void validate() const {
        if (N < 2) throw UndefinedObjectiveError("packing needs N >= 2 frames");
        if (s < 1 || s > n) throw DimensionError("packing needs 1 <= s <= n");
        if (max_iter < 1) throw DimensionError("max_iter must be positive");
        if (restarts < 1) throw DimensionError("restarts must be positive");
        if (!(tol > 0.0)) throw DimensionError("tol must be positive");
        if (target_distance && !(*target_distance > 0.0 && *target_distance <= std::sqrt(static_cast<double>(s)))) {
            throw DimensionError("target distance must lie in (0, sqrt(s)]");
        }
        if (shrink && !(*shrink > 0.0 && *shrink < 1.0)) throw DimensionError("shrink factor must lie in (0, 1)");
    }
};

struct PackingResult {
    FrameSet frames;
    double achieved_min_chordal = 0.0;
    int iterations_used = 0;
    int restart_index = 0;
    bool converged = false;
    /// Target in force when the winning restart stopped.
    double target_distance = 0.0;
    /// Achieved distance of every restart (NaN for a degenerate restart).
    std::vector<double> restart_scores;
    std::vector<std::string> warnings;
};

/// Simplex-type upper bound on the packing radius:
/// d^2 = min(s, s(n-s)/n * N/(N-1)).
inline double rankin_target(Index n, Index s, Index N) {
    if (s < 1 || s > n) throw DimensionError("rankin_target: need 1 <= s <= n");
    if (N < 2) throw UndefinedObjectiveError("rankin_target: need N >= 2");
    const double sd = static_cast<double>(s);
    const double nd = static_cast<double>(n);
    const double Nd = static_cast<double>(N);
    const double d2 = std::min(sd, sd * (nd - sd) / nd * (Nd / (Nd - 1.0)));
    return std::sqrt(d2);
}

/// Structural projection: diagonal blocks become I_s, off-diagonal blocks
/// with ||G_ij||_F > mu are scaled down to norm mu. Blocks are mirrored so
/// the result is exactly symmetric.
inline GramMatrix structural_project(const GramMatrix& g, double mu) {
    if (mu < 0.0) throw DimensionError("structural_project: mu must be >= 0");
    GramMatrix out = g;
    for (Index i = 0; i < g.block_count; ++i) {
        out.block(i, i).setIdentity();
        for (Index j = i + 1; j < g.block_count; ++j) {
            Eigen::MatrixXd b = 0.5 * (g.block(i, j) + g.block(j, i).transpose());
            const double norm = b.norm();
            if (norm > mu) b *= mu / norm;
            out.block(i, j) = b;
            out.block(j, i) = b.transpose();
        }
    }
    return out;
}

/// Spectral projection: keep the rank_cap largest eigenpairs, clip negatives,
/// rescale the kept eigenvalues so the trace is sN, reconstruct.
inline GramMatrix spectral_project(const GramMatrix& g, Index rank_cap) {
    if (rank_cap < 1) throw DimensionError("spectral_project: rank cap must be >= 1");
    const Index m = g.size();
    const Index k = std::min(rank_cap, m);
    auto eig = eig_sym_top(g.entries, k);
    Eigen::VectorXd w = eig.eigenvalues.cwiseMax(0.0);
    const double total = w.sum();
    if (!(total > 0.0)) throw DegenerateSpectrumError("spectral_project: no positive eigenvalue among the retained");
    w *= static_cast<double>(m) / total;
    Eigen::MatrixXd scaled = eig.eigenvectors * w.asDiagonal();
    Eigen::MatrixXd rebuilt = scaled * eig.eigenvectors.transpose();
    return GramMatrix{g.block_dim, g.block_count, detail::symmetrized(rebuilt)};
}

/// Factors G ~ F^T F from its top-n eigenpairs and splits F into N frames,
/// each re-orthonormalized by its polar factor.
inline FrameSet extract_frames(const GramMatrix& g, Index n) {
    if (n < g.block_dim) throw DimensionError("extract_frames: ambient dimension below block size");
    const Index m = g.size();
    const Index k = std::min(n, m);
    const auto eig = eig_sym_top(g.entries, k);
    const double top = eig.eigenvalues(0);
    const double lowest = eig.eigenvalues(k - 1);
    if (lowest < -1e-8 * std::max(1.0, top)) {
        throw NotPsdError("extract_frames: Gram matrix has retained eigenvalue " + std::to_string(lowest));
    }
    Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(n, m);
    factor.topRows(k) = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal() * eig.eigenvectors.transpose();
    std::vector<Frame> frames;
    frames.reserve(static_cast<std::size_t>(g.block_count));
    for (Index i = 0; i < g.block_count; ++i) {
        frames.push_back(Frame::from_columns(factor.middleCols(i * g.block_dim, g.block_dim)));
    }
    return FrameSet(std::move(frames), Provenance{"gram-extract", {{"n", n}, {"s", g.block_dim}, {"N", g.block_count}}, 0});
}

namespace detail {

struct RestartOutcome {
    std::optional<FrameSet> frames;
    double score = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    bool converged = false;
    double target = 0.0;
};

inline RestartOutcome run_packing_restart(const PackingConfig& cfg, double target, std::uint64_t seed) {
    RestartOutcome out;
    out.target = target;
    SplitMix64 rng(seed);
    std::vector<Frame> init;
    init.reserve(static_cast<std::size_t>(cfg.N));
    for (Index k = 0; k < cfg.N; ++k) init.push_back(random_frame(cfg.n, cfg.s, rng));
    GramMatrix g = GramMatrix::from_frames(init);
    const double sd = static_cast<double>(cfg.s);
    double mu = std::sqrt(std::max(sd - target * target, 0.0));

    try {
        for (int it = 1; it <= cfg.max_iter; ++it) {
            GramMatrix next = spectral_project(structural_project(g, mu), cfg.n);
            const double change = (next.entries - g.entries).norm();
            g = std::move(next);
            out.iterations = it;
            if (change > cfg.tol) continue;
            if (cfg.shrink) {
                const double reached = min_pairwise_distance(extract_frames(g, cfg.n));
                if (reached < target * (1.0 - 1e-6)) {
                    target *= *cfg.shrink;
                    mu = std::sqrt(std::max(sd - target * target, 0.0));
                    continue;
                }
            }
            out.converged = true;
            break;
        }
        FrameSet frames = extract_frames(g, cfg.n);
        out.score = min_pairwise_distance(frames);
        out.frames = std::move(frames);
    } catch (const DegenerateSpectrumError&) {
        out.frames.reset();
    } catch (const DegeneracyError&) {
        out.frames.reset();
    }
    out.target = target;
    return out;
}

} // namespace detail

/// Grassmannian packing by alternating projection on the block Gram matrix:
/// each restart starts from random frames and alternates structural and
/// spectral projections until the Gram iterate moves by at most tol (or the
/// iteration cap), then extracts frames. The restart with the largest
/// minimum chordal distance wins; the lowest index wins ties.
inline PackingResult pack(const PackingConfig& cfg) {
    cfg.validate();
    const double bound = rankin_target(cfg.n, cfg.s, cfg.N);
    const double target = cfg.target_distance.value_or(bound);

    std::vector<std::string> warnings;
    if (cfg.N > 20) {
        warnings.push_back("alternating projection is known to degrade beyond about 20 subspaces (N=" +
                           std::to_string(cfg.N) + "); relying on restarts");
    }

    std::optional<PackingResult> best;
    std::vector<double> scores;
    for (int r = 0; r < cfg.restarts; ++r) {
        auto outcome = detail::run_packing_restart(cfg, target, derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
        scores.push_back(outcome.score);
        if (!outcome.frames) continue;
        // Rankin's bound always holds; a violation signals broken arithmetic.
        if (outcome.score * outcome.score > bound * bound + 1e-9) {
            throw NumericalError("packing exceeded the Rankin bound: " + std::to_string(outcome.score) + " > " +
                                 std::to_string(bound));
        }
        if (!best || outcome.score > best->achieved_min_chordal) {
            best.emplace(PackingResult{std::move(*outcome.frames), outcome.score, outcome.iterations, r,
                                       outcome.converged, outcome.target, {}, {}});
        }
    }
    if (!best) {
        throw PackingFailure("all " + std::to_string(cfg.restarts) + " restarts were degenerate (n=" +
                             std::to_string(cfg.n) + ", s=" + std::to_string(cfg.s) + ", N=" + std::to_string(cfg.N) +
                             ")");
    }
    if (!best->converged) {
        warnings.push_back("winning restart stopped at the iteration cap without settling");
    }
    best->restart_scores = std::move(scores);
    best->warnings = std::move(warnings);
    best->frames.set_provenance(Provenance{"pack",
                                           {{"n", cfg.n},
                                            {"s", cfg.s},
                                            {"N", cfg.N},
                                            {"target", target},
                                            {"final_target", best->target_distance},
                                            {"max_iter", cfg.max_iter},
                                            {"tol", cfg.tol},
                                            {"restarts", cfg.restarts},
                                            {"shrink", cfg.shrink ? nlohmann::json(*cfg.shrink) : nlohmann::json()},
                                            {"restart_index", best->restart_index},
                                            {"iterations", best->iterations_used},
                                            {"converged", best->converged}},
                                           cfg.seed});
    best->frames.set_min_chordal(best->achieved_min_chordal);
    return std::move(*best);
}

/// Grows `base` to `total` frames by greedy farthest-point insertion: each new
/// frame is the best of `candidates` random frames under the minimum chordal
/// distance to the frames chosen so far (lowest candidate index on ties).
/// The first base.size() frames are kept verbatim, so the cone sum of the
/// result contains that of `base`.
inline FrameSet extend_packing(const FrameSet& base, Index total, std::uint64_t seed, int candidates = 32) {
    const auto s = base.uniform_sub_dim();
    if (!s) throw DimensionError("extend_packing needs a uniform sub_dim");
    if (total < static_cast<Index>(base.size())) throw DimensionError("extend_packing cannot shrink a frame set");
    if (candidates < 1) throw DimensionError("extend_packing needs at least one candidate");
    const Index n = base.ambient_dim();
    std::vector<Frame> frames = base.frames();
    frames.reserve(static_cast<std::size_t>(total));
    SplitMix64 rng(seed);
    while (static_cast<Index>(frames.size()) < total) {
        std::optional<Frame> pick;
        double pick_score = -1.0;
        for (int c = 0; c < candidates; ++c) {
            Frame cand = random_frame(n, *s, rng);
            double score = std::numeric_limits<double>::infinity();
            for (const auto& f : frames) {
                score = std::min(score, chordal_distance(f, cand));
                if (score <= pick_score) break;
            }
            if (score > pick_score) {
                pick_score = score;
                pick.emplace(std::move(cand));
            }
        }
        frames.push_back(std::move(*pick));
    }
    nlohmann::json params = base.provenance().params;
    params["extended_from"] = base.size();
    params["N"] = total;
    params["candidates"] = candidates;
    params["extend_seed"] = seed;
    FrameSet out(std::move(frames), Provenance{base.provenance().generator + "+greedy-extend", params, base.provenance().seed});
    if (out.size() >= 2) out.annotate_min_chordal();
    return out;
}

} // namespace psdcone
