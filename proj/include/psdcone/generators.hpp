#pragma once

#include <psdcone/error.hpp>
#include <psdcone/frame_set.hpp>
#include <psdcone/frames.hpp>
#include <psdcone/symmat.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace psdcone {

// ---------------------------------------------------------------------------
// Structured frame families
// ---------------------------------------------------------------------------

/// Extreme rays of the diagonally dominant cone, one rank-1 frame per ray up
/// to sign: e_i for every i, then (e_i + e_j)/sqrt2 and (e_i - e_j)/sqrt2 for
/// i < j. n^2 frames in total.
inline FrameSet dd_frames(Index n) {
    if (n < 1) throw DimensionError("dd_frames: n must be >= 1");
    std::vector<Frame> out;
    out.reserve(static_cast<std::size_t>(n * n));
    for (Index i = 0; i < n; ++i) out.push_back(Frame::coordinate(n, {i}));
    const double h = 1.0 / std::sqrt(2.0);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            for (double sign : {1.0, -1.0}) {
                Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, 1);
                v(i, 0) = h;
                v(j, 0) = sign * h;
                out.push_back(Frame::from_columns(v, 1e-15));
            }
        }
    }
    return FrameSet(std::move(out), Provenance{"dd", {{"n", n}}, 0});
}

inline std::uint64_t binomial(Index n, Index k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (Index i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

/// One coordinate frame per k-subset of [n], subsets in lexicographic order.
/// k = 2 is the scaled diagonally dominant family, k = n the identity frame.
inline FrameSet fw_frames(Index n, Index k) {
    if (n < 1 || k < 1 || k > n) throw DimensionError("fw_frames: need 1 <= k <= n");
    std::vector<Frame> out;
    out.reserve(static_cast<std::size_t>(binomial(n, k)));
    std::vector<Index> subset(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
    while (true) {
        out.push_back(Frame::coordinate(n, subset));
        Index pos = k - 1;
        while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
        if (pos < 0) break;
        ++subset[static_cast<std::size_t>(pos)];
        for (Index i = pos + 1; i < k; ++i) subset[static_cast<std::size_t>(i)] = subset[static_cast<std::size_t>(i - 1)] + 1;
    }
    return FrameSet(std::move(out), Provenance{k == 2 ? "sdd" : "fw", {{"n", n}, {"k", k}}, 0});
}

// ---------------------------------------------------------------------------
// Chordal graphs
// ---------------------------------------------------------------------------

using Edge = std::pair<Index, Index>;

/// A graph certified chordal. Vertices are 0-based; edges are stored with
/// first < second, sorted and unique.
struct ChordalGraph {
    Index vertex_count = 0;
    std::vector<Edge> edges;
    /// Perfect elimination ordering (first entry eliminated first).
    std::vector<Index> elimination_order;
    /// Maximal cliques, each sorted ascending; list sorted lexicographically.
    std::vector<std::vector<Index>> maximal_cliques;
};

namespace detail {

inline std::vector<std::vector<bool>> adjacency_matrix(Index n, const std::vector<Edge>& edges) {
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
    for (auto [a, b] : edges) {
        adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
        adj[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;
    }
    return adj;
}

// Lexicographic BFS; ties go to the smallest vertex index. Returns the visit
// order, whose reverse is a perfect elimination ordering iff the graph is
// chordal.
inline std::vector<Index> lex_bfs(Index n, const std::vector<std::vector<Index>>& nbrs) {
    std::vector<std::vector<Index>> label(static_cast<std::size_t>(n));
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    std::vector<Index> visit;
    visit.reserve(static_cast<std::size_t>(n));
    for (Index step = n; step >= 1; --step) {
        Index pick = -1;
        for (Index v = 0; v < n; ++v) {
            if (done[static_cast<std::size_t>(v)]) continue;
            if (pick < 0 || label[static_cast<std::size_t>(v)] > label[static_cast<std::size_t>(pick)]) pick = v;
        }
        done[static_cast<std::size_t>(pick)] = true;
        visit.push_back(pick);
        for (Index w : nbrs[static_cast<std::size_t>(pick)])
            if (!done[static_cast<std::size_t>(w)]) label[static_cast<std::size_t>(w)].push_back(step);
    }
    return visit;
}

// Shortest path from `from` to `to` avoiding `blocked`, or empty.
inline std::vector<Index> bfs_path(Index from, Index to, const std::vector<std::vector<Index>>& nbrs,
                                   const std::vector<bool>& blocked) {
    std::vector<Index> parent(nbrs.size(), -1);
    std::vector<bool> seen(nbrs.size(), false);
    std::deque<Index> queue{from};
    seen[static_cast<std::size_t>(from)] = true;
    while (!queue.empty()) {
        const Index v = queue.front();
        queue.pop_front();
        if (v == to) break;
        for (Index w : nbrs[static_cast<std::size_t>(v)]) {
            if (seen[static_cast<std::size_t>(w)] || blocked[static_cast<std::size_t>(w)]) continue;
            seen[static_cast<std::size_t>(w)] = true;
            parent[static_cast<std::size_t>(w)] = v;
            queue.push_back(w);
        }
    }
    if (!seen[static_cast<std::size_t>(to)]) return {};
    std::vector<Index> path;
    for (Index v = to; v != -1; v = parent[static_cast<std::size_t>(v)]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
}

// For a hub b with non-adjacent neighbours a, c: a shortest a-c path that
// avoids every other neighbour of b closes an induced cycle through b of
// length >= 4. Such a triple exists iff the graph is not chordal.
inline std::vector<Index> find_chordless_cycle(Index n, const std::vector<std::vector<Index>>& nbrs,
                                               const std::vector<std::vector<bool>>& adj) {
    for (Index b = 0; b < n; ++b) {
        const auto& nb = nbrs[static_cast<std::size_t>(b)];
        for (std::size_t x = 0; x < nb.size(); ++x) {
            for (std::size_t y = x + 1; y < nb.size(); ++y) {
                const Index a = nb[x];
                const Index c = nb[y];
                if (adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)]) continue;
                std::vector<bool> blocked(static_cast<std::size_t>(n), false);
                blocked[static_cast<std::size_t>(b)] = true;
                for (Index w : nb)
                    if (w != a && w != c) blocked[static_cast<std::size_t>(w)] = true;
                auto path = bfs_path(a, c, nbrs, blocked);
                if (path.empty()) continue;
                path.insert(path.begin(), b);
                return path;
            }
        }
    }
    return {};
}

} // namespace detail

/// Certifies chordality: Lex-BFS ordering, perfect-elimination check, and
/// maximal cliques read off the ordering. On failure throws ChordalityError
/// naming an induced cycle of length >= 4 (1-based vertex labels).
inline ChordalGraph verify_chordal(Index n, std::vector<Edge> edges) {
    if (n < 1) throw DimensionError("graph needs at least one vertex");
    for (auto& e : edges) {
        if (e.first < 0 || e.second < 0 || e.first >= n || e.second >= n) {
            throw DimensionError("edge endpoint out of range");
        }
        if (e.first == e.second) throw DimensionError("self-loop at vertex " + std::to_string(e.first + 1));
        if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const auto adj = detail::adjacency_matrix(n, edges);
    std::vector<std::vector<Index>> nbrs(static_cast<std::size_t>(n));
    for (auto [a, b] : edges) {
        nbrs[static_cast<std::size_t>(a)].push_back(b);
        nbrs[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& l : nbrs) std::sort(l.begin(), l.end());

    auto order = detail::lex_bfs(n, nbrs);
    std::reverse(order.begin(), order.end());
    std::vector<Index> pos(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;

    std::vector<std::vector<Index>> candidates;
    candidates.reserve(static_cast<std::size_t>(n));
    for (Index v : order) {
        std::vector<Index> later;
        for (Index w : nbrs[static_cast<std::size_t>(v)])
            if (pos[static_cast<std::size_t>(w)] > pos[static_cast<std::size_t>(v)]) later.push_back(w);
        for (std::size_t x = 0; x < later.size(); ++x) {
            for (std::size_t y = x + 1; y < later.size(); ++y) {
                if (!adj[static_cast<std::size_t>(later[x])][static_cast<std::size_t>(later[y])]) {
                    const auto cycle = detail::find_chordless_cycle(n, nbrs, adj);
                    std::ostringstream os;
                    os << "graph is not chordal; chordless cycle:";
                    for (Index c : cycle) os << ' ' << c + 1;
                    throw ChordalityError(os.str());
                }
            }
        }
        later.push_back(v);
        std::sort(later.begin(), later.end());
        candidates.push_back(std::move(later));
    }

    std::vector<std::vector<Index>> cliques;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bool contained = false;
        for (std::size_t j = 0; j < candidates.size() && !contained; ++j) {
            if (i == j || candidates[j].size() <= candidates[i].size()) continue;
            contained = std::includes(candidates[j].begin(), candidates[j].end(), candidates[i].begin(),
                                      candidates[i].end());
        }
        if (!contained) cliques.push_back(candidates[i]);
    }
    std::sort(cliques.begin(), cliques.end());
    return ChordalGraph{n, std::move(edges), std::move(order), std::move(cliques)};
}

/// One coordinate frame per maximal clique.
inline FrameSet chordal_frames(const ChordalGraph& g) {
    std::vector<Frame> out;
    out.reserve(g.maximal_cliques.size());
    for (const auto& c : g.maximal_cliques) out.push_back(Frame::coordinate(g.vertex_count, c));
    return FrameSet(std::move(out),
                    Provenance{"chordal", {{"n", g.vertex_count}, {"cliques", g.maximal_cliques.size()}}, 0});
}

/// Reads "n m" followed by m lines "i j" with 1-based endpoints.
inline std::pair<Index, std::vector<Edge>> read_edge_list(std::istream& in) {
    long long n = 0, m = 0;
    if (!(in >> n >> m) || n < 1 || m < 0) throw ParseError("edge list: expected header 'n m'");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long e = 0; e < m; ++e) {
        long long i = 0, j = 0;
        if (!(in >> i >> j)) throw ParseError("edge list: expected " + std::to_string(m) + " edges, read " + std::to_string(e));
        if (i < 1 || j < 1 || i > n || j > n) throw ParseError("edge list: vertex out of range on edge " + std::to_string(e + 1));
        edges.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1));
    }
    return {static_cast<Index>(n), std::move(edges)};
}

inline void write_edge_list(std::ostream& out, Index n, const std::vector<Edge>& edges) {
    out << n << ' ' << edges.size() << '\n';
    for (auto [a, b] : edges) out << a + 1 << ' ' << b + 1 << '\n';
}

// ---------------------------------------------------------------------------
// Constructive decompositions
// ---------------------------------------------------------------------------

/// One summand F Y F^T of a cone-sum decomposition.
struct SubconeTerm {
    Frame frame;
    SymMatrix weight;
};

struct RankOneTerm {
    Frame frame;
    double weight;
};

inline constexpr double kPsdBoundaryTol = 1e-10;

namespace detail {

inline SpectralDecomposition checked_psd_spectrum(const SymMatrix& x) {
    auto eig = eig_sym(x);
    const double lo = eig.eigenvalues.minCoeff();
    if (lo < -kPsdBoundaryTol) {
        throw NotPsdError("matrix has eigenvalue " + std::to_string(lo) + " below -1e-10");
    }
    eig.eigenvalues = eig.eigenvalues.cwiseMax(0.0);
    return eig;
}

// Completes unit vector u to an n x s orthonormal frame with u first, using
// the standard basis vectors other than the pivot (largest |u_i|) in
// ascending order. {u} plus any of those vectors is linearly independent.
inline Frame complete_frame(const Eigen::VectorXd& u, Index s) {
    const Index n = u.size();
    Index pivot = 0;
    u.cwiseAbs().maxCoeff(&pivot);
    Eigen::MatrixXd cols(n, s);
    cols.col(0) = u.normalized();
    Index next = 0;
    for (Index c = 1; c < s; ++c) {
        if (next == pivot) ++next;
        Eigen::VectorXd v = Eigen::VectorXd::Unit(n, next++);
        for (int pass = 0; pass < 2; ++pass)
            for (Index p = 0; p < c; ++p) v -= cols.col(p).dot(v) * cols.col(p);
        cols.col(c) = v.normalized();
    }
    return Frame::from_columns(cols);
}

} // namespace detail

/// Witness that X lies in a sum of s-dimensional sub-cones: n pairs
/// (F_i, X_i), F_i's first column the i-th eigenvector, X_i = diag(l_i, 0..).
/// Eigenvalues within 1e-10 below zero are clipped.
inline std::vector<SubconeTerm> decompose_psd(const SymMatrix& x, Index s) {
    const Index n = x.dim();
    if (s < 1 || s > n) throw DimensionError("decompose_psd: need 1 <= s <= n");
    const auto eig = detail::checked_psd_spectrum(x);
    std::vector<SubconeTerm> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const Eigen::VectorXd u = eig.eigenvectors.col(i);
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(s, s);
        w(0, 0) = eig.eigenvalues(i) * u.squaredNorm();
        out.push_back(SubconeTerm{detail::complete_frame(u, s), SymMatrix(w)});
    }
    return out;
}

/// X = sum_i l_i u_i u_i^T over the strictly positive (clipped) eigenvalues.
inline std::vector<RankOneTerm> decompose_psd_general(const SymMatrix& x) {
    const auto eig = detail::checked_psd_spectrum(x);
    std::vector<RankOneTerm> out;
    for (Index i = 0; i < x.dim(); ++i) {
        if (eig.eigenvalues(i) <= 0.0) continue;
        out.push_back(RankOneTerm{Frame::from_columns(eig.eigenvectors.col(i)), eig.eigenvalues(i)});
    }
    return out;
}

inline SymMatrix reconstruct(const std::vector<SubconeTerm>& terms, Index n) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : terms) t.frame.add_expanded(acc, t.weight.dense());
    return SymMatrix(acc);
}

inline SymMatrix reconstruct(const std::vector<RankOneTerm>& terms, Index n) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : terms) t.frame.add_expanded(acc, Eigen::MatrixXd::Constant(1, 1, t.weight));
    return SymMatrix(acc);
}

} // namespace psdcone
