#pragma once

#include <psdcone/error.hpp>
#include <psdcone/frame_set.hpp>
#include <psdcone/frames.hpp>
#include <psdcone/symmat.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace psdcone {

/// The inner approximation sum_k F_k S^{s_k}_+ F_k^T of the PSD cone.
class ConeSum {
public:
    explicit ConeSum(FrameSet frames) : frames_(std::move(frames)) {}

    Index ambient_dim() const noexcept { return frames_.ambient_dim(); }
    std::size_t size() const noexcept { return frames_.size(); }
    const FrameSet& frames() const noexcept { return frames_; }

    /// sum_k F_k Y_k F_k^T.
    SymMatrix combine(const std::vector<SymMatrix>& weights) const {
        if (weights.size() != frames_.size()) throw DimensionError("one weight per frame required");
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(ambient_dim(), ambient_dim());
        for (std::size_t k = 0; k < weights.size(); ++k) {
            if (weights[k].dim() != frames_[k].sub_dim()) throw DimensionError("weight size differs from frame sub_dim");
            frames_[k].add_expanded(acc, weights[k].dense());
        }
        return SymMatrix(acc);
    }

private:
    FrameSet frames_;
};

struct ProjectionOptions {
    /// Stop once a full sweep moves X by at most tol in Frobenius norm.
    double tol = 1e-7;
    int max_iter = 10000;
    /// Also stop once ||A - X||_F <= stop_below. X is feasible throughout, so
    /// this certifies that the distance to the cone is at most stop_below.
    double stop_below = 0.0;
};

struct ProjectionResult {
    SymMatrix X;
    /// Y_k with X = sum_k F_k Y_k F_k^T, each PSD.
    std::vector<SymMatrix> witnesses;
    double error = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline void require_compatible(const SymMatrix& a, const ConeSum& c) {
    if (a.dim() != c.ambient_dim()) {
        throw DimensionError("matrix dim " + std::to_string(a.dim()) + " differs from cone ambient dim " +
                             std::to_string(c.ambient_dim()));
    }
}

inline void require_solver_inputs(const SymMatrix& a, const ProjectionOptions& opt) {
    if (!a.all_finite()) throw NumericalError("projection target has non-finite entries");
    if (!(opt.tol > 0.0)) throw DimensionError("solver tolerance must be positive");
    if (opt.max_iter < 1) throw DimensionError("solver max_iter must be positive");
}

} // namespace detail

/// F psd(F^T Z F) F^T, the Euclidean projection onto one sub-cone.
inline SymMatrix project_onto_subcone(const SymMatrix& z, const Frame& f) {
    if (z.dim() != f.ambient_dim()) throw DimensionError("subcone projection: dimension mismatch");
    return SymMatrix(f.expand(psd_project(f.compress(z.dense()))));
}

/// First-order optimality residual of a candidate (X, {Y_k}):
/// max_k max(-lambda_min(G_k)^+, |<Y_k, G_k>| / max(1, ||Y_k||)) with
/// G_k = F_k^T (X - A) F_k, the gradient of the objective in block k.
inline double kkt_residual(const SymMatrix& a, const ConeSum& c, const SymMatrix& x,
                           const std::vector<SymMatrix>& witnesses) {
    const Eigen::MatrixXd diff = x.dense() - a.dense();
    double worst = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const Eigen::MatrixXd g = c.frames()[k].compress(diff);
        const double lo = g.rows() == 1 ? g(0, 0) : eig_sym(g).eigenvalues.minCoeff();
        const double dual = std::max(0.0, -lo);
        const auto& y = witnesses[k].dense();
        const double comp = std::abs(frob_inner(y, g)) / std::max(1.0, y.norm());
        worst = std::max({worst, dual, comp});
    }
    return worst;
}

/// Projection of A onto the cone sum by cyclic exact block minimization.
///
/// Block k minimizes ||F_k Y F_k^T - R||_F over Y >= 0 with R the residual
/// target; for orthonormal F_k this equals ||Y - F_k^T R F_k||_F^2 up to a
/// constant, so the update is one small eigen-clip. Only R = A - X is
/// carried between updates; X and the witnesses are rebuilt at the end.
inline ProjectionResult project_onto_cone_sum(const SymMatrix& a, const ConeSum& c, const ProjectionOptions& opt = {}) {
    detail::require_compatible(a, c);
    detail::require_solver_inputs(a, opt);
    const auto& frames = c.frames().frames();
    const std::size_t count = frames.size();

    Eigen::MatrixXd residual = a.dense();
    std::vector<Eigen::MatrixXd> y(count);
    for (std::size_t k = 0; k < count; ++k) y[k] = Eigen::MatrixXd::Zero(frames[k].sub_dim(), frames[k].sub_dim());

    const double slack = 1e-10 * std::max(1.0, a.frobenius_norm());
    double objective = residual.norm();
    int sweeps = 0;
    bool converged = false;
    Eigen::MatrixXd before;
    for (int sweep = 1; sweep <= opt.max_iter; ++sweep) {
        before = residual;
        for (std::size_t k = 0; k < count; ++k) {
            const Frame& f = frames[k];
            Eigen::MatrixXd updated = psd_project(f.compress(residual) + y[k]);
            const Eigen::MatrixXd delta = updated - y[k];
            if (delta.isZero(0.0)) continue;
            f.add_expanded(residual, delta, -1.0);
            y[k] = std::move(updated);
        }
        sweeps = sweep;
        const double next = residual.norm();
        if (next > objective + slack) {
            throw NumericalError("block coordinate descent increased the objective from " + std::to_string(objective) +
                                 " to " + std::to_string(next));
        }
        objective = next;
        if (next <= opt.stop_below || (residual - before).norm() <= opt.tol) {
            converged = true;
            break;
        }
    }

    std::vector<SymMatrix> witnesses;
    witnesses.reserve(count);
    for (auto& yk : y) witnesses.push_back(psd_project(SymMatrix(yk)));
    SymMatrix x = c.combine(witnesses);
    const double err = frob_dist(x, a);
    const double kkt = kkt_residual(a, c, x, witnesses);
    return ProjectionResult{std::move(x), std::move(witnesses), err, kkt, sweeps, converged};
}

/// Independent route to the same projection, for cross-checking: by Moreau,
/// Pi_C(A) = A - Pi_{C°}(A), and the polar of a Minkowski sum is the
/// intersection of the polars {Z : F_k^T Z F_k <= 0}. Dykstra's cyclic
/// projections with full n x n correction terms find Pi_{C°}(A).
inline SymMatrix project_oracle(const SymMatrix& a, const ConeSum& c, const ProjectionOptions& opt = {}) {
    detail::require_compatible(a, c);
    detail::require_solver_inputs(a, opt);
    const Index n = a.dim();
    Eigen::MatrixXd z = a.dense();
    std::vector<Eigen::MatrixXd> corrections(c.size(), Eigen::MatrixXd::Zero(n, n));
    for (int sweep = 1; sweep <= opt.max_iter; ++sweep) {
        const Eigen::MatrixXd before = z;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const Eigen::MatrixXd& f = c.frames()[k].columns();
            const Eigen::MatrixXd w = z + corrections[k];
            const Eigen::MatrixXd compressed = detail::symmetrized(f.transpose() * w * f);
            const Eigen::MatrixXd onto_cone = detail::symmetrized(f * psd_project(compressed) * f.transpose());
            z = w - onto_cone;
            corrections[k] = onto_cone;
        }
        if ((z - before).norm() <= opt.tol) break;
    }
    return SymMatrix(a.dense() - z);
}

struct Membership {
    bool member = false;
    double distance = 0.0;
};

/// Distance from A to the cone sum and whether it is within tol. The solver
/// stops as soon as its feasible iterate certifies distance <= tol; otherwise
/// it runs to a sweep change of 1e-6 * tol, since on ill-conditioned
/// instances the distance can exceed the sweep change by orders of magnitude.
inline Membership membership(const SymMatrix& a, const ConeSum& c, double tol, int max_iter = 1000000) {
    if (!(tol > 0.0)) throw DimensionError("membership tolerance must be positive");
    const ProjectionOptions opt{std::max(1e-14, 1e-6 * tol), max_iter, tol};
    const auto res = project_onto_cone_sum(a, c, opt);
    return Membership{res.error <= tol, res.error};
}

/// Linear constraint <A_i, X> = b_i of an SDP in standard primal form.
struct LinearConstraint {
    SymMatrix matrix;
    double rhs;
};

/// The SDP min <C, X> s.t. <A_i, X> = b_i with X restricted to the cone sum,
/// rewritten over blocks Y_k >= 0 with coefficients F_k^T C F_k and
/// F_k^T A_i F_k.
struct RestrictedSdp {
    struct Block {
        Frame frame;
        SymMatrix objective;
        std::vector<SymMatrix> constraints;
    };
    Index n = 0;
    std::vector<Block> blocks;
    std::vector<double> rhs;
};

inline RestrictedSdp export_restricted_sdp(const SymMatrix& objective, const std::vector<LinearConstraint>& constraints,
                                           const ConeSum& c) {
    detail::require_compatible(objective, c);
    for (const auto& con : constraints) detail::require_compatible(con.matrix, c);
    RestrictedSdp out;
    out.n = c.ambient_dim();
    for (const auto& con : constraints) out.rhs.push_back(con.rhs);
    for (const auto& f : c.frames()) {
        RestrictedSdp::Block block{f, SymMatrix(f.compress(objective.dense())), {}};
        for (const auto& con : constraints) block.constraints.emplace_back(f.compress(con.matrix.dense()));
        out.blocks.push_back(std::move(block));
    }
    return out;
}

} // namespace psdcone
