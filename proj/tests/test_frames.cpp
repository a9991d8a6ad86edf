#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace psdcone;

namespace {

Frame basis(Index n, std::vector<Index> idx) { return Frame::coordinate(n, idx); }

Frame line(double degrees) {
    const double t = degrees * std::numbers::pi / 180.0;
    Eigen::MatrixXd v(2, 1);
    v << std::cos(t), std::sin(t);
    return Frame::from_columns(v);
}

Eigen::MatrixXd random_orthogonal(Index s, SplitMix64& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(testutil::gaussian_matrix(s, s, rng));
    return qr.householderQ() * Eigen::MatrixXd::Identity(s, s);
}

} // namespace

TEST(Frame, AcceptsOrthonormalColumnsUnchanged) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 2);
    m(0, 0) = 1;
    m(1, 1) = 1;
    const auto f = Frame::from_columns(m);
    EXPECT_EQ(f.columns(), m);
    EXPECT_TRUE(f.is_coordinate());
}

TEST(Frame, NormalizesScaledColumn) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 1);
    m(0, 0) = 2;
    const auto f = Frame::from_columns(m);
    EXPECT_NEAR(f.columns()(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(f.columns().col(0).norm(), 1.0, 1e-15);
}

TEST(Frame, RejectsRankDeficientColumns) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 2);
    m(0, 0) = 1;
    m(0, 1) = 1;
    EXPECT_THROW(Frame::from_columns(m), DegeneracyError);
    EXPECT_THROW(Frame::from_columns(Eigen::MatrixXd::Zero(3, 1)), DegeneracyError);
}

TEST(Frame, RejectsBadShapes) {
    EXPECT_THROW(Frame::from_columns(Eigen::MatrixXd::Identity(2, 3)), DimensionError);
    EXPECT_THROW(Frame::coordinate(3, {0, 0}), DimensionError);
    EXPECT_THROW(Frame::coordinate(3, {3}), DimensionError);
}

TEST(Frame, PolarFactorKeepsSpan) {
    SplitMix64 rng(1);
    const Eigen::MatrixXd raw = testutil::gaussian_matrix(7, 3, rng);
    const auto f = Frame::from_columns(raw);
    EXPECT_LE((f.columns().transpose() * f.columns() - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-12);
    // raw lies in span(F).
    EXPECT_LE((raw - f.projector() * raw).norm(), 1e-12 * raw.norm());
}

TEST(Frame, CoordinateFastPathMatchesDense) {
    SplitMix64 rng(2);
    const auto z = testutil::random_symmetric(6, rng);
    const auto f = basis(6, {4, 1, 2});
    const Eigen::MatrixXd& c = f.columns();
    EXPECT_LE((f.compress(z.dense()) - c.transpose() * z.dense() * c).norm(), 1e-14);
    const Eigen::MatrixXd y = testutil::random_symmetric(3, rng).dense();
    EXPECT_LE((f.expand(y) - c * y * c.transpose()).norm(), 1e-14);
}

TEST(PrincipalAngles, HandCases) {
    const auto f = random_frame(5, 2, 3);
    const auto same = principal_angles(f, f);
    EXPECT_NEAR(same.cosines(0), 1.0, 1e-12);
    EXPECT_NEAR(same.cosines(1), 1.0, 1e-12);

    EXPECT_NEAR(principal_angles(basis(2, {0}), basis(2, {1})).cosines(0), 0.0, 1e-15);

    const auto pa = principal_angles(basis(3, {0, 1}), basis(3, {0, 2}));
    EXPECT_NEAR(pa.cosines(0), 1.0, 1e-15);
    EXPECT_NEAR(pa.cosines(1), 0.0, 1e-15);
}

TEST(ChordalDistance, HandCases) {
    const auto f = random_frame(5, 2, 3);
    EXPECT_NEAR(chordal_distance(f, f), 0.0, 1e-12);
    EXPECT_NEAR(chordal_distance(basis(2, {0}), basis(2, {1})), 1.0, 1e-15);
    EXPECT_NEAR(chordal_distance(basis(3, {0, 1}), basis(3, {0, 2})), 1.0, 1e-15);
    EXPECT_THROW(chordal_distance(basis(3, {0}), basis(3, {0, 1})), DimensionError);
}

TEST(ConeDistance, HandCases) {
    const auto f = random_frame(5, 2, 3);
    EXPECT_NEAR(cone_distance(f, f), 0.0, 1e-12);
    EXPECT_NEAR(cone_distance(basis(2, {0}), basis(2, {1})), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(cone_distance(basis(3, {0, 1}), basis(3, {0, 2})), std::sqrt(2.0), 1e-15);
}

TEST(MinPairwiseDistance, HandCases) {
    const std::vector<Frame> ortho{basis(2, {0}), basis(2, {1})};
    EXPECT_NEAR(min_pairwise_distance(ortho), 1.0, 1e-15);
    const std::vector<Frame> dup{basis(2, {0}), basis(2, {0})};
    EXPECT_EQ(min_pairwise_distance(dup), 0.0);
    const std::vector<Frame> three{line(0), line(60), line(120)};
    EXPECT_NEAR(min_pairwise_distance(three), std::sqrt(3.0) / 2.0, 1e-12);
    const std::vector<Frame> one{basis(2, {0})};
    EXPECT_THROW(min_pairwise_distance(one), UndefinedObjectiveError);
}

TEST(ChordalDistance, ConeIdentityOnRandomPairs) {
    SplitMix64 rng(11);
    for (int t = 0; t < 1000; ++t) {
        const Index n = testutil::uniform_int(rng, 1, 12);
        const Index s = testutil::uniform_int(rng, 1, n);
        const auto a = random_frame(n, s, rng);
        const auto b = random_frame(n, s, rng);
        ASSERT_LE(std::abs(cone_distance(a, b) - std::sqrt(2.0) * chordal_distance(a, b)), 1e-9)
            << "n=" << n << " s=" << s;
    }
}

TEST(ChordalDistance, BasisInvariance) {
    SplitMix64 rng(12);
    for (int t = 0; t < 200; ++t) {
        const Index n = testutil::uniform_int(rng, 1, 10);
        const Index s = testutil::uniform_int(rng, 1, n);
        const auto a = random_frame(n, s, rng);
        const auto b = random_frame(n, s, rng);
        const auto aq = Frame::from_columns(a.columns() * random_orthogonal(s, rng), 1e-10);
        const auto br = Frame::from_columns(b.columns() * random_orthogonal(s, rng), 1e-10);
        EXPECT_NEAR(chordal_distance(aq, br), chordal_distance(a, b), 1e-10);
    }
}

TEST(ChordalDistance, TriangleInequality) {
    SplitMix64 rng(13);
    for (int t = 0; t < 300; ++t) {
        const Index n = testutil::uniform_int(rng, 1, 10);
        const Index s = testutil::uniform_int(rng, 1, n);
        const auto a = random_frame(n, s, rng);
        const auto b = random_frame(n, s, rng);
        const auto c = random_frame(n, s, rng);
        EXPECT_GE(chordal_distance(a, b) + chordal_distance(b, c) - chordal_distance(a, c), -1e-9);
    }
}

TEST(ChordalDistance, RangeAndOrthogonalExtreme) {
    SplitMix64 rng(14);
    for (int t = 0; t < 300; ++t) {
        const Index n = testutil::uniform_int(rng, 1, 10);
        const Index s = testutil::uniform_int(rng, 1, n);
        const double d = chordal_distance(random_frame(n, s, rng), random_frame(n, s, rng));
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, std::sqrt(static_cast<double>(s)) + 1e-12);
    }
    EXPECT_NEAR(chordal_distance(basis(6, {0, 1, 2}), basis(6, {3, 4, 5})), std::sqrt(3.0), 1e-15);
}

TEST(ChordalDistance, AngleAndFrobeniusFormsAgree) {
    SplitMix64 rng(15);
    for (int t = 0; t < 500; ++t) {
        const Index n = testutil::uniform_int(rng, 1, 12);
        const Index s = testutil::uniform_int(rng, 1, n);
        const auto a = random_frame(n, s, rng);
        const auto b = random_frame(n, s, rng);
        const auto pa = principal_angles(a, b);
        const double frob = std::sqrt(std::max(0.0, static_cast<double>(s) - (a.columns().transpose() * b.columns()).squaredNorm()));
        EXPECT_NEAR(chordal_distance_from_angles(pa), chordal_distance(a, b), 1e-9);
        EXPECT_NEAR(chordal_distance(a, b), frob, 1e-7);
        double via_angles = 0.0;
        for (Index i = 0; i < s; ++i) via_angles += std::pow(std::sin(pa.angles()(i)), 2);
        EXPECT_NEAR(std::sqrt(via_angles), chordal_distance(a, b), 1e-9);
    }
}

TEST(FrameSet, RequiresSharedAmbientDim) {
    EXPECT_THROW(FrameSet({}, Provenance{}), DimensionError);
    EXPECT_THROW(FrameSet({basis(2, {0}), basis(3, {0})}, Provenance{}), DimensionError);
    FrameSet set({basis(3, {0}), basis(3, {1, 2})}, Provenance{});
    EXPECT_FALSE(set.uniform_sub_dim());
    EXPECT_EQ(set.max_sub_dim(), 2);
    EXPECT_THROW(set.annotate_min_chordal(), DimensionError);
}

TEST(FrameSet, ValidateCatchesStaleDistance) {
    FrameSet set({basis(2, {0}), basis(2, {1})}, Provenance{});
    EXPECT_DOUBLE_EQ(set.annotate_min_chordal(), 1.0);
    EXPECT_NO_THROW(set.validate());
    set.set_min_chordal(0.5);
    EXPECT_THROW(set.validate(), NumericalError);
}
