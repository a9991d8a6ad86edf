#pragma once

#include <psdcone/error.hpp>
#include <psdcone/rng.hpp>

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace psdcone {

using Index = Eigen::Index;

/// Dense real symmetric matrix. Symmetry is enforced on construction by
/// averaging with the transpose, so entries(i, j) == entries(j, i) exactly.
class SymMatrix {
public:
    explicit SymMatrix(const Eigen::Ref<const Eigen::MatrixXd>& raw) {
        if (raw.rows() != raw.cols()) {
            throw DimensionError("symmetric matrix needs square input, got " + std::to_string(raw.rows()) + "x" +
                                 std::to_string(raw.cols()));
        }
        if (raw.rows() < 1) throw DimensionError("symmetric matrix needs dim >= 1");
        m_ = 0.5 * (raw + raw.transpose());
    }

    static SymMatrix zero(Index n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }
    static SymMatrix identity(Index n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n)); }
    static SymMatrix diagonal(const Eigen::Ref<const Eigen::VectorXd>& d) { return SymMatrix(Eigen::MatrixXd(d.asDiagonal())); }

    Index dim() const noexcept { return m_.rows(); }
    const Eigen::MatrixXd& dense() const noexcept { return m_; }
    double operator()(Index i, Index j) const { return m_(i, j); }

    double frobenius_norm() const { return m_.norm(); }
    double trace() const { return m_.trace(); }
    bool all_finite() const { return m_.allFinite(); }

    friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
        require_same_dim(a, b);
        return SymMatrix(a.m_ + b.m_);
    }
    friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
        require_same_dim(a, b);
        return SymMatrix(a.m_ - b.m_);
    }
    friend SymMatrix operator-(const SymMatrix& a) { return SymMatrix(-a.m_); }
    friend SymMatrix operator*(double alpha, const SymMatrix& a) { return SymMatrix(alpha * a.m_); }

    friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
        return a.dim() == b.dim() && a.m_ == b.m_;
    }

    static void require_same_dim(const SymMatrix& a, const SymMatrix& b) {
        if (a.dim() != b.dim()) {
            throw DimensionError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
        }
    }

private:
    Eigen::MatrixXd m_;
};

inline SymMatrix sym_from_dense(const Eigen::Ref<const Eigen::MatrixXd>& raw) { return SymMatrix(raw); }

/// Builds a symmetric matrix from nested rows; ragged or non-square input is a
/// DimensionError.
inline SymMatrix sym_from_rows(const std::vector<std::vector<double>>& rows) {
    const auto n = static_cast<Index>(rows.size());
    Index cols = n == 0 ? 0 : static_cast<Index>(rows.front().size());
    for (const auto& r : rows) {
        if (static_cast<Index>(r.size()) != cols) throw DimensionError("ragged matrix rows");
    }
    Eigen::MatrixXd raw(n, cols);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < cols; ++j) raw(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return SymMatrix(raw);
}

/// Eigenvalues in non-increasing order with matching orthonormal eigenvectors.
/// May hold only the leading k pairs (see eig_sym_top).
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;

    Eigen::MatrixXd reconstruct() const {
        return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
    }
};

namespace detail {

inline std::string condition_summary(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    std::ostringstream os;
    os << "dim=" << m.rows() << " finite=" << (m.allFinite() ? "yes" : "no");
    if (m.allFinite()) os << " frob=" << m.norm() << " max_abs=" << m.cwiseAbs().maxCoeff();
    return os.str();
}

// Flip each column so that its largest-magnitude entry (first on ties) is
// positive. Eigenvectors are only defined up to sign; this pins them.
inline void canonicalize_signs(Eigen::MatrixXd& vecs) {
    for (Index c = 0; c < vecs.cols(); ++c) {
        Index arg = 0;
        double best = -1.0;
        for (Index r = 0; r < vecs.rows(); ++r) {
            const double a = std::abs(vecs(r, c));
            if (a > best) {
                best = a;
                arg = r;
            }
        }
        if (vecs(arg, c) < 0.0) vecs.col(c) *= -1.0;
    }
}

inline Eigen::MatrixXd symmetrized(const Eigen::Ref<const Eigen::MatrixXd>& m) { return 0.5 * (m + m.transpose()); }

} // namespace detail

/// Full spectral decomposition. Backed by Eigen's SelfAdjointEigenSolver
/// (tridiagonal QR); deterministic for a fixed input.
inline SpectralDecomposition eig_sym(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    if (!m.allFinite()) throw NumericalError("eig_sym: non-finite input (" + detail::condition_summary(m) + ")");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eig_sym: eigensolver did not converge (" + detail::condition_summary(m) + ")");
    }
    SpectralDecomposition out;
    out.eigenvalues = es.eigenvalues().reverse();
    out.eigenvectors = es.eigenvectors().rowwise().reverse();
    detail::canonicalize_signs(out.eigenvectors);
    return out;
}

inline SpectralDecomposition eig_sym(const SymMatrix& m) { return eig_sym(m.dense()); }

/// Leading k eigenpairs of a symmetric matrix (lower triangle is read), via
/// LAPACK dsyevr over an index range. Used where only a few of many
/// eigenpairs are needed, e.g. the rank-capped Gram projection.
inline SpectralDecomposition eig_sym_top(const Eigen::Ref<const Eigen::MatrixXd>& m, Index k) {
    const Index n = m.rows();
    if (m.cols() != n) throw DimensionError("eig_sym_top: square matrix required");
    if (k < 1 || k > n) throw DimensionError("eig_sym_top: k must be in [1, n]");
    if (!m.allFinite()) throw NumericalError("eig_sym_top: non-finite input (" + detail::condition_summary(m) + ")");

    Eigen::MatrixXd a = m;
    Eigen::VectorXd w(n);
    Eigen::MatrixXd z(n, k);
    std::vector<lapack_int> support(static_cast<std::size_t>(2 * k));
    lapack_int found = 0;
    const auto ln = static_cast<lapack_int>(n);
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', ln, a.data(), ln, 0.0, 0.0,
                                           static_cast<lapack_int>(n - k + 1), ln, 0.0, &found, w.data(), z.data(),
                                           ln, support.data());
    if (info != 0 || found != static_cast<lapack_int>(k)) {
        throw NumericalError("eig_sym_top: dsyevr failed with info=" + std::to_string(info) + " (" +
                             detail::condition_summary(m) + ")");
    }
    SpectralDecomposition out;
    out.eigenvalues = w.head(k).reverse();
    out.eigenvectors = z.rowwise().reverse();
    detail::canonicalize_signs(out.eigenvectors);
    return out;
}

/// Euclidean projection onto the PSD cone: U max(L, 0) U^T. Matrices that are
/// already PSD come back bit-for-bit unchanged.
inline Eigen::MatrixXd psd_project(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    if (m.rows() == 1) {
        if (!std::isfinite(m(0, 0))) throw NumericalError("psd_project: non-finite input");
        return Eigen::MatrixXd::Constant(1, 1, std::max(m(0, 0), 0.0));
    }
    const auto eig = eig_sym(m);
    if (eig.eigenvalues.minCoeff() >= 0.0) return detail::symmetrized(m);
    const Eigen::VectorXd clipped = eig.eigenvalues.cwiseMax(0.0);
    Eigen::MatrixXd out = eig.eigenvectors * clipped.asDiagonal() * eig.eigenvectors.transpose();
    return detail::symmetrized(out);
}

inline SymMatrix psd_project(const SymMatrix& m) { return SymMatrix(psd_project(m.dense())); }

inline double min_eigenvalue(const SymMatrix& m) { return eig_sym(m).eigenvalues.minCoeff(); }

/// Identifies the sampling distribution behind random_psd_normalized in
/// experiment output.
inline constexpr const char* kRandomPsdSampler = "haar-orthogonal x uniform(0,1) spectrum, frobenius-normalized, splitmix64";

/// Random PSD matrix with unit Frobenius norm: Q diag(l) Q^T / ||.||_F with Q
/// Haar-distributed (sign-corrected QR of a Gaussian matrix) and l_i ~ U(0,1).
inline SymMatrix random_psd_normalized(Index n, std::uint64_t seed) {
    if (n < 1) throw DimensionError("random_psd_normalized: n must be >= 1");
    SplitMix64 rng(seed);
    Eigen::MatrixXd g(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) g(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    Eigen::VectorXd lambda(n);
    for (Index i = 0; i < n; ++i) lambda(i) = rng.uniform_open();
    Eigen::MatrixXd a = detail::symmetrized(q * lambda.asDiagonal() * q.transpose());
    a /= a.norm();
    return SymMatrix(a);
}

inline double frob_dist(const SymMatrix& a, const SymMatrix& b) {
    SymMatrix::require_same_dim(a, b);
    return (a.dense() - b.dense()).norm();
}

/// Frobenius inner product <A, B> = trace(A^T B).
inline double frob_inner(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b) {
    return a.cwiseProduct(b).sum();
}

} // namespace psdcone
