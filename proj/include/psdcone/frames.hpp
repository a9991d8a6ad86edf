#pragma once

#include <psdcone/error.hpp>
#include <psdcone/rng.hpp>
#include <psdcone/symmat.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace psdcone {

/// Tolerance of the Stiefel invariant ||F^T F - I||_F carried by every Frame.
inline constexpr double kStiefelTol = 1e-10;

/// An n x s matrix with orthonormal columns: one point of the Stiefel
/// manifold, standing for the s-dimensional subspace (and sub-cone
/// F S^s_+ F^T) that it spans.
///
/// Frames whose columns are distinct standard basis vectors are flagged as
/// coordinate frames; compress/expand then reduce to index gathers, which is
/// what keeps the factor-width and chordal families cheap to project onto.
class Frame {
public:
    /// Accepts `raw` as-is when ||raw^T raw - I|| <= tol (tol is capped at
    /// kStiefelTol), otherwise replaces it by its polar factor U V^T, which
    /// spans the same subspace. Throws DegeneracyError below full column rank.
    static Frame from_columns(const Eigen::Ref<const Eigen::MatrixXd>& raw, double tol = kStiefelTol) {
        const Index n = raw.rows();
        const Index s = raw.cols();
        if (s < 1 || n < 1) throw DimensionError("frame needs at least one row and one column");
        if (s > n) {
            throw DimensionError("frame sub_dim " + std::to_string(s) + " exceeds ambient_dim " + std::to_string(n));
        }
        if (!raw.allFinite()) throw NumericalError("frame columns contain non-finite values");

        const double accept = std::min(tol, kStiefelTol);
        const double err = (raw.transpose() * raw - Eigen::MatrixXd::Identity(s, s)).norm();
        if (err <= accept) return Frame(raw, detect_support(raw));

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(raw, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double rank_tol = static_cast<double>(std::max(n, s)) * std::numeric_limits<double>::epsilon() * sv(0);
        Index rank = 0;
        for (Index i = 0; i < sv.size(); ++i)
            if (sv(i) > rank_tol) ++rank;
        if (sv(0) == 0.0 || rank < s) {
            throw DegeneracyError("frame columns have numerical rank " + std::to_string(rank) + " < " +
                                  std::to_string(s));
        }
        Eigen::MatrixXd polar = svd.matrixU() * svd.matrixV().transpose();
        return Frame(polar, detect_support(polar));
    }

    /// The frame [e_{i_1} ... e_{i_s}] for the given 0-based indices.
    static Frame coordinate(Index n, const std::vector<Index>& indices) {
        const auto s = static_cast<Index>(indices.size());
        if (s < 1 || s > n) throw DimensionError("coordinate frame needs 1 <= |indices| <= n");
        Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(n, s);
        for (Index c = 0; c < s; ++c) {
            const Index i = indices[static_cast<std::size_t>(c)];
            if (i < 0 || i >= n) throw DimensionError("coordinate frame index out of range");
            cols(i, c) = 1.0;
        }
        auto support = detect_support(cols);
        if (support.empty()) throw DimensionError("coordinate frame indices must be distinct");
        return Frame(std::move(cols), std::move(support));
    }

    Index ambient_dim() const noexcept { return cols_.rows(); }
    Index sub_dim() const noexcept { return cols_.cols(); }
    const Eigen::MatrixXd& columns() const noexcept { return cols_; }

    bool is_coordinate() const noexcept { return !support_.empty(); }
    /// Row index of the unit entry of each column; empty for general frames.
    const std::vector<Index>& support() const noexcept { return support_; }

    /// F F^T, the central ray of the sub-cone.
    Eigen::MatrixXd projector() const { return cols_ * cols_.transpose(); }

    /// F^T Z F.
    Eigen::MatrixXd compress(const Eigen::Ref<const Eigen::MatrixXd>& z) const {
        const Index s = sub_dim();
        Eigen::MatrixXd out(s, s);
        if (is_coordinate()) {
            for (Index b = 0; b < s; ++b)
                for (Index a = 0; a < s; ++a) out(a, b) = z(support_[a], support_[b]);
        } else {
            out.noalias() = cols_.transpose() * (z * cols_);
        }
        return 0.5 * (out + out.transpose());
    }

    /// target += alpha * F Y F^T (Y symmetric).
    void add_expanded(Eigen::Ref<Eigen::MatrixXd> target, const Eigen::Ref<const Eigen::MatrixXd>& y,
                      double alpha = 1.0) const {
        const Index s = sub_dim();
        if (is_coordinate()) {
            for (Index b = 0; b < s; ++b)
                for (Index a = 0; a < s; ++a) target(support_[a], support_[b]) += alpha * y(a, b);
            return;
        }
        const Eigen::MatrixXd fy = cols_ * y;
        Eigen::MatrixXd u = fy * cols_.transpose();
        target += (0.5 * alpha) * (u + u.transpose());
    }

    /// F Y F^T.
    Eigen::MatrixXd expand(const Eigen::Ref<const Eigen::MatrixXd>& y) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ambient_dim(), ambient_dim());
        add_expanded(out, y);
        return out;
    }

private:
    Frame(Eigen::MatrixXd cols, std::vector<Index> support) : cols_(std::move(cols)), support_(std::move(support)) {}

    static std::vector<Index> detect_support(const Eigen::Ref<const Eigen::MatrixXd>& m) {
        std::vector<Index> support;
        std::vector<bool> used(static_cast<std::size_t>(m.rows()), false);
        for (Index c = 0; c < m.cols(); ++c) {
            Index hit = -1;
            for (Index r = 0; r < m.rows(); ++r) {
                const double v = m(r, c);
                if (v == 0.0) continue;
                if (v != 1.0 || hit >= 0) return {};
                hit = r;
            }
            if (hit < 0 || used[static_cast<std::size_t>(hit)]) return {};
            used[static_cast<std::size_t>(hit)] = true;
            support.push_back(hit);
        }
        return support;
    }

    Eigen::MatrixXd cols_;
    std::vector<Index> support_;
};

/// Orthonormalized Gaussian n x s block drawn from `rng`.
inline Frame random_frame(Index n, Index s, SplitMix64& rng) {
    Eigen::MatrixXd g(n, s);
    for (Index j = 0; j < s; ++j)
        for (Index i = 0; i < n; ++i) g(i, j) = rng.gaussian();
    return Frame::from_columns(g);
}

inline Frame random_frame(Index n, Index s, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return random_frame(n, s, rng);
}

/// Principal angles between two subspaces. Cosines are the singular values
/// of Fi^T Fj (non-increasing); sines are the singular values of the residual
/// (I - Fi Fi^T) Fj (non-decreasing), which stay accurate for tiny angles
/// where 1 - cos^2 cancels.
struct PrincipalAngles {
    Eigen::VectorXd cosines;
    Eigen::VectorXd sines;

    Eigen::VectorXd angles() const {
        Eigen::VectorXd out(cosines.size());
        for (Index i = 0; i < cosines.size(); ++i) out(i) = std::atan2(sines(i), cosines(i));
        return out;
    }
};

namespace detail {
inline void require_same_shape(const Frame& a, const Frame& b) {
    if (a.ambient_dim() != b.ambient_dim() || a.sub_dim() != b.sub_dim()) {
        throw DimensionError("frame shape mismatch: " + std::to_string(a.ambient_dim()) + "x" +
                             std::to_string(a.sub_dim()) + " vs " + std::to_string(b.ambient_dim()) + "x" +
                             std::to_string(b.sub_dim()));
    }
}
} // namespace detail

namespace detail {
// Fj - Fi (Fi^T Fj): the part of span(Fj) orthogonal to span(Fi).
inline Eigen::MatrixXd residual(const Frame& fi, const Frame& fj) {
    return fj.columns() - fi.columns() * (fi.columns().transpose() * fj.columns());
}
} // namespace detail

inline PrincipalAngles principal_angles(const Frame& fi, const Frame& fj) {
    detail::require_same_shape(fi, fj);
    const Eigen::MatrixXd cross = fi.columns().transpose() * fj.columns();
    Eigen::JacobiSVD<Eigen::MatrixXd> cos_svd(cross);
    Eigen::JacobiSVD<Eigen::MatrixXd> sin_svd(detail::residual(fi, fj));
    return PrincipalAngles{cos_svd.singularValues().cwiseMax(0.0).cwiseMin(1.0),
                           sin_svd.singularValues().reverse().cwiseMax(0.0).cwiseMin(1.0)};
}

/// sqrt(s - ||Fi^T Fj||_F^2) = sqrt(sum_i sin^2 theta_i), evaluated as the
/// Frobenius norm of the residual (I - Fi Fi^T) Fj to avoid cancellation.
/// A radicand below -1e-10 means the inputs were not orthonormal.
inline double chordal_distance(const Frame& fi, const Frame& fj) {
    detail::require_same_shape(fi, fj);
    const Eigen::MatrixXd cross = fi.columns().transpose() * fj.columns();
    const double radicand = static_cast<double>(fi.sub_dim()) - cross.squaredNorm();
    if (radicand < -1e-10) {
        throw NumericalError("chordal_distance: radicand " + std::to_string(radicand) +
                             " is negative; inputs are not orthonormal");
    }
    return (fj.columns() - fi.columns() * cross).norm();
}

/// Same quantity from the principal angles.
inline double chordal_distance_from_angles(const PrincipalAngles& pa) { return pa.sines.norm(); }

/// ||Fi Fi^T - Fj Fj^T||_F, computed from the two n x n projectors.
inline double cone_distance(const Frame& fi, const Frame& fj) {
    detail::require_same_shape(fi, fj);
    return (fi.projector() - fj.projector()).norm();
}

/// Minimum chordal distance over unordered pairs.
inline double min_pairwise_distance(std::span<const Frame> frames) {
    if (frames.size() < 2) throw UndefinedObjectiveError("min pairwise distance needs at least two frames");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < frames.size(); ++i)
        for (std::size_t j = i + 1; j < frames.size(); ++j) best = std::min(best, chordal_distance(frames[i], frames[j]));
    return best;
}

/// Subspace-level equality.
inline bool same_subspace(const Frame& a, const Frame& b, double tol = 1e-8) {
    return a.ambient_dim() == b.ambient_dim() && a.sub_dim() == b.sub_dim() && chordal_distance(a, b) <= tol;
}

} // namespace psdcone
