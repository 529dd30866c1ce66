#include <gtest/gtest.h>

#include "properties.hpp"
#include "specdpc/corpus.hpp"
#include "support.hpp"

using namespace specdpc;
using testing_support::max_abs_diff;

TEST(Grid, NodesAndSpacing) {
    const FrequencyGrid g(8);
    EXPECT_EQ(g.size(), 8u);
    EXPECT_DOUBLE_EQ(g.node(0), -kPi);
    EXPECT_DOUBLE_EQ(g.node(4), 0.0);
    EXPECT_DOUBLE_EQ(g.spacing(), kPi / 4.0);
    EXPECT_EQ(g.refined().size(), 16u);
    EXPECT_THROW(FrequencyGrid(1000), BadParams);
    EXPECT_THROW(FrequencyGrid(1), BadParams);
}

TEST(Measure, RejectsInvalidDensities) {
    const FrequencyGrid g(4);
    std::vector<ComplexMatrix> bad(4, ComplexMatrix{{1.0, 1.0}, {0.0, 1.0}});
    EXPECT_THROW(SpectralMeasure(2, g, bad), NotHermitian);
    std::vector<ComplexMatrix> neg(4, ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}});
    EXPECT_THROW(SpectralMeasure(2, g, neg), NotPositiveSemidefinite);
    EXPECT_THROW(SpectralMeasure(2, g, std::vector<ComplexMatrix>(3, ComplexMatrix(2, 2))), DimensionMismatch);
    EXPECT_THROW(SpectralMeasure(2, g, std::vector<ComplexMatrix>(4, ComplexMatrix(3, 3))), DimensionMismatch);
    std::vector<Atom> atoms{{-kPi, ComplexMatrix::identity(2)}};
    EXPECT_THROW(SpectralMeasure(2, g, std::vector<ComplexMatrix>(4, ComplexMatrix(2, 2)), atoms), BadParams);
}

TEST(Covariance, RegularModelIsWhite) {
    const auto ex = corpus::example("regular");
    const CovarianceSequence c = covariance_from_measure(ex.measure, 16);
    const ComplexMatrix c0{{kPi, 0.0, kPi}, {0.0, kTwoPi, 0.0}, {kPi, 0.0, kPi}};
    EXPECT_LE(max_abs_diff(c.at(0), c0), 1e-12);
    for (long h = 1; h <= 16; ++h) EXPECT_LE(frobenius_norm(c.at(h)), 1e-12) << h;
}

TEST(Covariance, TypeOneSecondChannelIsSinc) {
    const std::size_t n = 4096;
    const auto ex = corpus::example("type1", {}, n);
    const CovarianceSequence c = covariance_from_measure(ex.measure, 32);
    // rectangle rule on an indicator: error at most one node weight per edge
    const double tol = 2.0 * kTwoPi / static_cast<double>(n) * 0.5 + 1e-12;
    for (long h = 0; h <= 32; ++h) {
        const ComplexMatrix exact = ex.covariance(h);
        EXPECT_LE(max_abs_diff(c.at(h), exact), 2.0 * tol) << "h=" << h;
    }
}

TEST(Covariance, AtomAtZeroGivesConstantSequence) {
    const ComplexMatrix mass{{2.0, 1.0}, {1.0, 1.0}};
    const SpectralMeasure s(2, FrequencyGrid(16), std::vector<ComplexMatrix>(16, ComplexMatrix(2, 2)), {{0.0, mass}});
    const CovarianceSequence c = covariance_from_measure(s, 10);
    for (long h = -10; h <= 10; ++h) EXPECT_LE(max_abs_diff(c.at(h), mass), 1e-15);
}

TEST(Covariance, TypeZeroMatchesAtomFormula) {
    const auto ex = corpus::example("type0", {{"omega", {0.5, -1.2}}, {"v1", {1.0, 2.0}}, {"v2", {1.0, 0.5}}}, 64);
    const CovarianceSequence c = covariance_from_measure(ex.measure, 12);
    for (long h = -12; h <= 12; ++h) EXPECT_LE(max_abs_diff(c.at(h), ex.covariance(h)), 1e-13) << h;
}

TEST(Covariance, NegativeLagIsAdjointBitExactly) {
    const auto ex = corpus::example("type3_candidate", {}, 256);
    const CovarianceSequence c = covariance_from_measure(ex.measure, 20);
    for (long h = 0; h <= 20; ++h) EXPECT_TRUE(c.at(-h) == c.at(h).adjoint());
    EXPECT_THROW(c.at(21), BadParams);
}

TEST(Covariance, RejectsNonPsdLagZero) {
    EXPECT_THROW(CovarianceSequence(1, {ComplexMatrix{{-1.0}}}), NotPositiveSemidefinite);
    EXPECT_THROW(CovarianceSequence(2, {ComplexMatrix{{1.0, 1.0}, {0.0, 1.0}}}), NotHermitian);
    EXPECT_THROW(CovarianceSequence(2, {ComplexMatrix::identity(3)}), DimensionMismatch);
}

TEST(Inverse, WhiteNoiseGivesFlatDensity) {
    const CovarianceSequence c(2, {ComplexMatrix::identity(2), ComplexMatrix(2, 2), ComplexMatrix(2, 2)});
    const SpectralMeasure s = measure_from_covariance(c, FrequencyGrid(32));
    const ComplexMatrix flat = ComplexMatrix::identity(2) * cplx{1.0 / kTwoPi};
    for (std::size_t m = 0; m < 32; ++m) EXPECT_LE(max_abs_diff(s.density(m), flat), 1e-15);
}

TEST(Inverse, LagZeroOnlyGivesConstant) {
    const ComplexMatrix c0{{2.0, 0.5}, {0.5, 1.0}};
    const SpectralMeasure s = measure_from_covariance(CovarianceSequence(2, {c0}), FrequencyGrid(8));
    for (std::size_t m = 0; m < 8; ++m) EXPECT_LE(max_abs_diff(s.density(m), c0 * cplx{1.0 / kTwoPi}), 1e-15);
}

TEST(Inverse, RegularRoundTrip) {
    const auto ex = corpus::example("regular", {}, 64);
    const CovarianceSequence c = covariance_from_measure(ex.measure, 1);
    const SpectralMeasure back = measure_from_covariance(c, ex.measure.grid(), Taper::rectangular);
    for (std::size_t m = 0; m < 64; ++m) EXPECT_LE(max_abs_diff(back.density(m), ex.measure.density(m)), 1e-8);
}

TEST(Inverse, BartlettRecoversIndicatorAwayFromEdges) {
    const auto ex = corpus::example("type1", {}, 1024);
    std::vector<ComplexMatrix> lags;
    for (long h = 0; h <= 256; ++h) lags.push_back(ex.covariance(h));
    const SpectralMeasure est = measure_from_covariance(CovarianceSequence(3, lags), ex.measure.grid());
    for (std::size_t m = 0; m < 1024; ++m) {
        const double w = est.grid().node(m);
        if (std::abs(std::abs(w) - 1.0) < 0.25) continue;
        EXPECT_NEAR(est.density(m)(1, 1).real(), corpus::detail::type1_f22(w), 0.02) << w;
    }
}

TEST(Quadrature, ExactCases) {
    std::vector<double> ones(64, 1.0), cos3(64);
    const FrequencyGrid g(64);
    for (std::size_t m = 0; m < 64; ++m) cos3[m] = std::cos(3.0 * g.node(m));
    EXPECT_NEAR(trapezoid_integral(ones), kTwoPi, 1e-14);
    EXPECT_NEAR(trapezoid_integral(cos3), 0.0, 1e-13);
}

TEST(Quadrature, TypeOneSecondEigenvalue) {
    const std::size_t n = 4096;
    const auto ex = corpus::example("type1", {}, n);
    const FrequencyGrid& g = ex.measure.grid();
    std::vector<double> l2(n);
    std::size_t inside = 0;
    for (std::size_t m = 0; m < n; ++m) {
        l2[m] = eig_hermitian(ex.measure.density(m)).values[1];
        if (std::abs(g.node(m)) <= 1.0) ++inside;
    }
    const double f11 = 1.0 / kTwoPi, f22 = 0.5;
    const double l2_in = f11 + f22 - std::sqrt(f11 * f11 + f22 * f22 - f11 * f22);
    EXPECT_NEAR(trapezoid_integral(l2), l2_in * static_cast<double>(inside) * g.spacing(), 1e-12);
    EXPECT_NEAR(trapezoid_integral(l2), 2.0 * l2_in, 2.0 * g.spacing() * l2_in);
}

TEST(Subprocess, PicksChannels) {
    const auto ex = corpus::example("regular", {}, 16);
    const std::size_t idx[] = {0, 1};
    const SpectralMeasure sub = ex.measure.subprocess(idx);
    EXPECT_EQ(sub.dim(), 2u);
    EXPECT_LE(max_abs_diff(sub.density(3), ComplexMatrix{{0.5, 0.0}, {0.0, 1.0}}), 0.0);
}

TEST(Property, DensityRoundTripTraceIdentityAndAdjointLags) {
    const auto c = properties::density_roundtrip(201, 60);
    EXPECT_TRUE(c.ok) << c.detail;
}
