#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace psdcone;

namespace {

Frame basis(Index n, std::vector<Index> idx) { return Frame::coordinate(n, idx); }

ConeSum cone_of(std::vector<Frame> frames) { return ConeSum(FrameSet(std::move(frames), Provenance{"test", {}, 0})); }

/// Random cone with mixed sub-dimensions and a mix of coordinate and dense frames.
ConeSum random_cone(Index n, Index count, SplitMix64& rng) {
    std::vector<Frame> frames;
    for (Index k = 0; k < count; ++k) {
        const Index s = testutil::uniform_int(rng, 1, n);
        if (rng.uniform_open() < 0.3) {
            std::vector<Index> idx(n);
            for (Index i = 0; i < n; ++i) idx[i] = i;
            for (Index i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(static_cast<std::uint64_t>(i + 1))]);
            idx.resize(s);
            frames.push_back(basis(n, idx));
        } else {
            frames.push_back(random_frame(n, s, rng));
        }
    }
    return cone_of(std::move(frames));
}

} // namespace

TEST(SubconeProjection, HandCases) {
    SplitMix64 rng(1);
    const auto f = random_frame(4, 2, rng);
    const auto y = testutil::random_psd(2, 2, rng);
    const SymMatrix z(f.expand(y.dense()));
    EXPECT_LE(frob_dist(project_onto_subcone(z, f), z), 1e-12);

    EXPECT_EQ(project_onto_subcone(SymMatrix::diagonal(Eigen::Vector2d(-1, 5)), basis(2, {0})), SymMatrix::zero(2));
    Eigen::Matrix2d m;
    m << 2, 1, 1, 0;
    EXPECT_EQ(project_onto_subcone(SymMatrix(m), basis(2, {0})), SymMatrix::diagonal(Eigen::Vector2d(2, 0)));
}

TEST(ConeSumProjection, FullConeRecoversPsdProjection) {
    SplitMix64 rng(2);
    const auto cone = cone_of({basis(5, {0, 1, 2, 3, 4})});
    for (int t = 0; t < 20; ++t) {
        const auto a = testutil::random_symmetric(5, rng);
        const auto res = project_onto_cone_sum(a, cone);
        EXPECT_LE(frob_dist(res.X, psd_project(a)), 1e-8);
        EXPECT_NEAR(res.error, frob_dist(a, psd_project(a)), 1e-8);
    }
}

TEST(ConeSumProjection, NonnegativeDiagonalCone) {
    const auto cone = cone_of({basis(2, {0}), basis(2, {1})});
    Eigen::Matrix2d a;
    a << 0.5, 0.5, 0.5, 0.5;
    const auto res = project_onto_cone_sum(SymMatrix(a), cone);
    EXPECT_LE(frob_dist(res.X, SymMatrix::diagonal(Eigen::Vector2d(0.5, 0.5))), 1e-12);
    EXPECT_NEAR(res.error, 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_TRUE(res.converged);

    const auto oracle = project_oracle(SymMatrix(a), cone);
    EXPECT_LE(frob_dist(oracle, SymMatrix::diagonal(Eigen::Vector2d(0.5, 0.5))), 1e-8);
}

TEST(ConeSumProjection, AgreesWithOracleOnSdd) {
    SplitMix64 rng(3);
    const ConeSum cone(fw_frames(6, 2));
    for (int t = 0; t < 5; ++t) {
        const auto a = testutil::random_symmetric(6, rng);
        const auto x = project_onto_cone_sum(a, cone, {1e-10, 100000}).X;
        EXPECT_LE(frob_dist(x, project_oracle(a, cone, {1e-11, 200000})), 1e-5);
    }
}

TEST(ConeSumProjection, AgreesWithOracleOnRandomMixedCones) {
    SplitMix64 rng(4);
    for (int t = 0; t < 40; ++t) {
        const Index n = testutil::uniform_int(rng, 1, 8);
        const auto cone = random_cone(n, testutil::uniform_int(rng, 1, 6), rng);
        const auto a = testutil::random_symmetric(n, rng);
        const auto res = project_onto_cone_sum(a, cone, {1e-10, 200000});
        const auto oracle = project_oracle(a, cone, {1e-11, 200000});
        ASSERT_LE(frob_dist(res.X, oracle), 1e-5) << "trial " << t;
    }
}

TEST(Oracle, SingleConeIsSubconeProjection) {
    SplitMix64 rng(5);
    const auto f = random_frame(5, 3, rng);
    const auto a = testutil::random_symmetric(5, rng);
    EXPECT_LE(frob_dist(project_oracle(a, cone_of({f})), project_onto_subcone(a, f)), 1e-8);
}

TEST(Oracle, MemberIsFixedPoint) {
    SplitMix64 rng(6);
    const auto cone = random_cone(5, 4, rng);
    std::vector<SymMatrix> y;
    for (const auto& f : cone.frames()) y.push_back(testutil::random_psd(f.sub_dim(), f.sub_dim(), rng));
    const auto a = cone.combine(y);
    EXPECT_LE(frob_dist(project_oracle(a, cone, {1e-12, 200000}), a), 1e-6);
}

TEST(ConeSumProjection, CertificatesOnConvergedResults) {
    SplitMix64 rng(7);
    for (int t = 0; t < 30; ++t) {
        const Index n = testutil::uniform_int(rng, 2, 8);
        const auto cone = random_cone(n, testutil::uniform_int(rng, 1, 6), rng);
        const auto a = testutil::random_symmetric(n, rng);
        const ProjectionOptions opt{1e-7, 20000};
        const auto res = project_onto_cone_sum(a, cone, opt);
        if (!res.converged) continue;
        EXPECT_LE(res.kkt_residual, 10 * opt.tol);
        EXPECT_LE(frob_dist(cone.combine(res.witnesses), res.X), 1e-8);
        for (const auto& w : res.witnesses) EXPECT_GE(min_eigenvalue(w), -1e-12);
    }
}

TEST(ConeSumProjection, KktResidualFlagsSuboptimalPoint) {
    const auto cone = cone_of({basis(2, {0}), basis(2, {1})});
    const auto a = SymMatrix::identity(2);
    const std::vector<SymMatrix> w{SymMatrix::zero(1), SymMatrix::zero(1)};
    EXPECT_NEAR(kkt_residual(a, cone, cone.combine(w), w), 1.0, 1e-15);
}

TEST(ConeSumProjection, NestedSetsNeverWorse) {
    SplitMix64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const Index n = testutil::uniform_int(rng, 2, 6);
        const auto big = random_cone(n, 5, rng);
        std::vector<Frame> prefix(big.frames().begin(), big.frames().begin() + 3);
        const auto small = cone_of(prefix);
        const auto a = testutil::random_symmetric(n, rng);
        const ProjectionOptions tight{1e-12, 500000};
        EXPECT_LE(project_onto_cone_sum(a, big, tight).error, project_onto_cone_sum(a, small, tight).error + 1e-9);
    }
}

TEST(ConeSumProjection, ScaleEquivariant) {
    SplitMix64 rng(9);
    for (int t = 0; t < 10; ++t) {
        const auto cone = random_cone(5, 4, rng);
        const auto a = testutil::random_symmetric(5, rng);
        const double alpha = 0.1 + 5.0 * rng.uniform_open();
        const ProjectionOptions tight{1e-12, 500000};
        const auto x = project_onto_cone_sum(a, cone, tight).X;
        const auto ax = project_onto_cone_sum(alpha * a, cone, tight).X;
        EXPECT_LE(frob_dist(ax, alpha * x), 1e-8 * std::max(1.0, alpha));
    }
}

TEST(ConeSumProjection, RejectsBadInput) {
    const auto cone = cone_of({basis(3, {0})});
    EXPECT_THROW(project_onto_cone_sum(SymMatrix::identity(2), cone), DimensionError);
    EXPECT_THROW(project_onto_cone_sum(SymMatrix::identity(3), cone, {0.0, 10}), DimensionError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
    bad(1, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(project_onto_cone_sum(SymMatrix(bad), cone), NumericalError);
    EXPECT_THROW(cone.combine({}), DimensionError);
}

TEST(ConeSumProjection, ReportsNonConvergence) {
    SplitMix64 rng(10);
    const auto cone = random_cone(6, 6, rng);
    const auto res = project_onto_cone_sum(testutil::random_symmetric(6, rng), cone, {1e-14, 1});
    EXPECT_EQ(res.iterations, 1);
    EXPECT_FALSE(res.converged);
}

TEST(Membership, HandCases) {
    SplitMix64 rng(11);
    const auto f = random_frame(4, 2, rng);
    const auto cone = cone_of({f, random_frame(4, 1, rng)});
    const SymMatrix inside(f.expand(testutil::random_psd(2, 2, rng).dense()));
    const auto in = membership(inside, cone, 1e-6);
    EXPECT_TRUE(in.member);
    EXPECT_LE(in.distance, 1e-8);

    const auto out = membership(-SymMatrix::identity(4), cone, 1e-6);
    EXPECT_FALSE(out.member);
    EXPECT_NEAR(out.distance, 2.0, 1e-8);

    const auto full = cone_of({basis(3, {0, 1, 2})});
    EXPECT_TRUE(membership(testutil::random_psd(3, 2, rng), full, 1e-8).member);
}

TEST(ExportSdp, IdentityFrameKeepsData) {
    SplitMix64 rng(12);
    const auto c = testutil::random_symmetric(3, rng);
    const auto a1 = testutil::random_symmetric(3, rng);
    const auto sdp = export_restricted_sdp(c, {{a1, 2.5}}, cone_of({basis(3, {0, 1, 2})}));
    ASSERT_EQ(sdp.blocks.size(), 1U);
    EXPECT_EQ(sdp.blocks[0].objective, c);
    EXPECT_EQ(sdp.blocks[0].constraints[0], a1);
    EXPECT_EQ(sdp.rhs, std::vector<double>{2.5});
}

TEST(ExportSdp, ScalarBlockAndEmptyConstraints) {
    const auto sdp = export_restricted_sdp(SymMatrix::identity(2), {}, cone_of({basis(2, {0})}));
    ASSERT_EQ(sdp.blocks.size(), 1U);
    EXPECT_EQ(sdp.blocks[0].objective.dim(), 1);
    EXPECT_EQ(sdp.blocks[0].objective(0, 0), 1.0);
    EXPECT_TRUE(sdp.blocks[0].constraints.empty());
    EXPECT_TRUE(sdp.rhs.empty());
    EXPECT_THROW(export_restricted_sdp(SymMatrix::identity(3), {}, cone_of({basis(2, {0})})), DimensionError);
}

TEST(ExportSdp, BlockObjectiveMatchesSubstitution) {
    // <C, sum F Y F^T> = sum <F^T C F, Y>.
    SplitMix64 rng(13);
    const auto cone = random_cone(5, 3, rng);
    const auto c = testutil::random_symmetric(5, rng);
    const auto sdp = export_restricted_sdp(c, {}, cone);
    std::vector<SymMatrix> y;
    double blockwise = 0.0;
    for (std::size_t k = 0; k < cone.size(); ++k) {
        y.push_back(testutil::random_psd(cone.frames()[k].sub_dim(), 2, rng));
        blockwise += frob_inner(sdp.blocks[k].objective.dense(), y.back().dense());
    }
    EXPECT_NEAR(frob_inner(c.dense(), cone.combine(y).dense()), blockwise, 1e-10);
}
