#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace psdcone;

namespace {

GramMatrix gram(Index s, Index count, const Eigen::MatrixXd& m) { return GramMatrix{s, count, m}; }

PackingConfig config(Index n, Index s, Index N, std::uint64_t seed = 1) {
    PackingConfig c;
    c.n = n;
    c.s = s;
    c.N = N;
    c.seed = seed;
    return c;
}

} // namespace

TEST(RankinTarget, HandValues) {
    EXPECT_DOUBLE_EQ(rankin_target(2, 1, 2), 1.0);
    EXPECT_DOUBLE_EQ(rankin_target(4, 2, 2), std::sqrt(2.0));
    EXPECT_NEAR(rankin_target(2, 1, 3), std::sqrt(0.75), 1e-15);
    EXPECT_NEAR(rankin_target(7, 3, 1000000) * rankin_target(7, 3, 1000000), 3.0 * 4.0 / 7.0, 1e-5);
    EXPECT_THROW(rankin_target(3, 1, 1), UndefinedObjectiveError);
    EXPECT_THROW(rankin_target(3, 4, 2), DimensionError);
}

TEST(StructuralProject, IdentityIsFixed) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
    EXPECT_EQ(structural_project(gram(2, 3, id), 0.3).entries, id);
}

TEST(StructuralProject, ScalarBlockRescale) {
    Eigen::MatrixXd g(2, 2);
    g << 1, 0.9, 0.9, 1;
    Eigen::MatrixXd expect(2, 2);
    expect << 1, 0.5, 0.5, 1;
    EXPECT_LE((structural_project(gram(1, 2, g), 0.5).entries - expect).norm(), 1e-15);
}

TEST(StructuralProject, BlockBelowThresholdUnchanged) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4);
    g.block(0, 2, 2, 2) << 0.6, 0.0, 0.0, 0.8;
    g.block(2, 0, 2, 2) = g.block(0, 2, 2, 2).transpose();
    EXPECT_EQ(structural_project(gram(2, 2, g), 2.0).entries, g);
}

TEST(StructuralProject, InvariantsOnRandomInput) {
    SplitMix64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const Index s = testutil::uniform_int(rng, 1, 3);
        const Index count = testutil::uniform_int(rng, 2, 6);
        const double mu = rng.uniform_open() * std::sqrt(static_cast<double>(s));
        const auto out = structural_project(gram(s, count, testutil::random_symmetric(s * count, rng).dense()), mu);
        for (Index i = 0; i < count; ++i) {
            ASSERT_EQ(Eigen::MatrixXd(out.block(i, i)), Eigen::MatrixXd::Identity(s, s));
            for (Index j = 0; j < count; ++j) {
                if (i == j) continue;
                ASSERT_LE(out.block(i, j).norm(), mu + 1e-12);
            }
        }
        ASSERT_EQ(out.entries, out.entries.transpose());
    }
}

TEST(SpectralProject, IdentityFixedWhenRankSuffices) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
    EXPECT_LE((spectral_project(gram(2, 2, id), 4).entries - id).norm(), 1e-13);
}

TEST(SpectralProject, DegenerateTopPairOfIdentity) {
    const auto out = spectral_project(gram(1, 2, Eigen::MatrixXd::Identity(2, 2)), 1);
    EXPECT_NEAR(out.entries.trace(), 2.0, 1e-12);
    const auto eig = eig_sym(out.entries);
    EXPECT_NEAR(eig.eigenvalues(0), 2.0, 1e-12);
    EXPECT_NEAR(eig.eigenvalues(1), 0.0, 1e-12);
}

TEST(SpectralProject, InvariantsOnRandomInput) {
    SplitMix64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const Index s = testutil::uniform_int(rng, 1, 3);
        const Index count = testutil::uniform_int(rng, 2, 8);
        const Index n = testutil::uniform_int(rng, s, s * count);
        auto g = structural_project(gram(s, count, testutil::random_symmetric(s * count, rng).dense()), 0.5);
        const auto out = spectral_project(g, n);
        const auto eig = eig_sym(out.entries);
        Index positive = 0;
        for (Index i = 0; i < eig.eigenvalues.size(); ++i)
            if (eig.eigenvalues(i) > 1e-9) ++positive;
        EXPECT_LE(positive, n);
        EXPECT_NEAR(out.entries.trace(), static_cast<double>(s * count), 1e-9);
        EXPECT_GE(eig.eigenvalues.minCoeff(), -1e-9);
    }
}

TEST(SpectralProject, AllNegativeSpectrumIsDegenerate) {
    EXPECT_THROW(spectral_project(gram(1, 2, -Eigen::MatrixXd::Identity(2, 2)), 1), DegenerateSpectrumError);
}

TEST(ExtractFrames, IdentityGivesOrthogonalVectors) {
    const auto set = extract_frames(gram(1, 2, Eigen::MatrixXd::Identity(2, 2)), 2);
    ASSERT_EQ(set.size(), 2U);
    EXPECT_NEAR(set[0].columns().col(0).dot(set[1].columns().col(0)), 0.0, 1e-14);
}

TEST(ExtractFrames, RoundTripsKnownFrames) {
    SplitMix64 rng(5);
    for (int t = 0; t < 30; ++t) {
        const Index n = testutil::uniform_int(rng, 2, 8);
        const Index s = testutil::uniform_int(rng, 1, n);
        const Index count = testutil::uniform_int(rng, 2, 6);
        std::vector<Frame> frames;
        for (Index k = 0; k < count; ++k) frames.push_back(random_frame(n, s, rng));
        const auto back = extract_frames(GramMatrix::from_frames(frames), n);
        for (Index i = 0; i < count; ++i)
            for (Index j = i + 1; j < count; ++j)
                EXPECT_NEAR(chordal_distance(back[i], back[j]), chordal_distance(frames[i], frames[j]), 1e-8);
    }
}

TEST(ExtractFrames, RankDeficientBlockSignalsRestart) {
    // Block 1 of this Gram matrix has rank 1 although s = 2.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
    g.block(0, 0, 2, 2).setIdentity();
    g(2, 2) = 1.0;
    EXPECT_THROW(extract_frames(gram(2, 2, g), 3), DegeneracyError);
}

TEST(Pack, OrthogonalLines) {
    const auto res = pack(config(2, 1, 2));
    EXPECT_GE(res.achieved_min_chordal, 1.0 - 1e-3);
    EXPECT_EQ(res.frames.size(), 2U);
    EXPECT_EQ(res.frames.provenance().generator, "pack");
    ASSERT_TRUE(res.frames.min_chordal());
}

TEST(Pack, EquiangularLines) { EXPECT_GE(pack(config(2, 1, 3)).achieved_min_chordal, std::sqrt(3.0) / 2.0 - 1e-2); }

TEST(Pack, OrthogonalPlanes) { EXPECT_GE(pack(config(4, 2, 2)).achieved_min_chordal, std::sqrt(2.0) - 1e-2); }

TEST(Pack, RejectsUndefinedObjective) {
    EXPECT_THROW(pack(config(3, 1, 1)), UndefinedObjectiveError);
    EXPECT_THROW(pack(config(3, 4, 2)), DimensionError);
}

TEST(Pack, InvariantsOverSmallGrid) {
    for (Index n = 2; n <= 5; ++n) {
        for (Index s = 1; s <= n; ++s) {
            for (Index N : {Index{2}, Index{3}, Index{5}}) {
                auto cfg = config(n, s, N, 7);
                cfg.restarts = 3;
                cfg.max_iter = 500;
                const auto res = pack(cfg);
                EXPECT_NO_THROW(res.frames.validate());
                EXPECT_LE(res.achieved_min_chordal, rankin_target(n, s, N) + 1e-9);
                for (double score : res.restart_scores) {
                    if (!std::isnan(score)) {
                        EXPECT_GE(res.achieved_min_chordal, score);
                    }
                }
                EXPECT_NEAR(res.achieved_min_chordal, min_pairwise_distance(res.frames), 1e-12);
            }
        }
    }
}

TEST(Pack, DeterministicForSeed) {
    auto cfg = config(4, 2, 4, 99);
    cfg.restarts = 2;
    const auto a = pack(cfg);
    const auto b = pack(cfg);
    ASSERT_EQ(a.frames.size(), b.frames.size());
    for (std::size_t i = 0; i < a.frames.size(); ++i) EXPECT_EQ(a.frames[i].columns(), b.frames[i].columns());
}

TEST(Pack, WarnsBeyondTwentyFrames) {
    auto cfg = config(3, 1, 21);
    cfg.restarts = 1;
    cfg.max_iter = 50;
    EXPECT_FALSE(pack(cfg).warnings.empty());
}

TEST(Pack, ShrinkingTargetStillValid) {
    auto cfg = config(3, 1, 7, 5);
    cfg.shrink = 0.95;
    cfg.restarts = 2;
    const auto res = pack(cfg);
    EXPECT_LE(res.target_distance, rankin_target(3, 1, 7));
    EXPECT_LE(res.achieved_min_chordal, rankin_target(3, 1, 7) + 1e-9);
}

TEST(ExtendPacking, KeepsBasePrefixAndAnnotates) {
    auto cfg = config(4, 2, 3, 8);
    cfg.restarts = 2;
    const auto base = pack(cfg).frames;
    const auto grown = extend_packing(base, 9, 21);
    ASSERT_EQ(grown.size(), 9U);
    for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(grown[i].columns(), base[i].columns());
    ASSERT_TRUE(grown.min_chordal());
    EXPECT_NO_THROW(grown.validate());
    EXPECT_LE(*grown.min_chordal(), *base.min_chordal() + 1e-12);
    EXPECT_THROW(extend_packing(base, 2, 1), DimensionError);
}
