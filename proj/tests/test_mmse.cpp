#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sccdma/mmse.hpp"

using namespace sccdma;

namespace {

// Q(sqrt(10)) to 40 digits by arbitrary-precision quadrature (mpmath).
constexpr double q_sqrt10 = 7.827011290012748387e-4;

// 1 - E[tanh(1 + Z)] from 10^7 Monte-Carlo samples, and its standard error.
constexpr double mmse_at_1_monte_carlo = 0.44966428587633706;
constexpr double mmse_at_1_standard_error = 1.573360284555933e-4;

// Arbitrary-precision quadrature values of 1 - E[tanh(x + sqrt(x) Z)].
struct Reference {
    double x, value;
};
constexpr Reference mmse_reference[] = {
    {0.5, 0.64988659532486918568}, {1.0, 0.44959950920667282971}, {2.0, 0.23101822192929561944},
    {5.0, 0.038462811369382677444}, {9.47, 0.003214232717708140034}, {10.0, 0.0024113147354122573302},
    {20.0, 0.000012036620875489876589},
};

} // namespace

TEST(Qfunc, Symmetry) { EXPECT_DOUBLE_EQ(qfunc(0.0), 0.5); }

TEST(Qfunc, FarTail) {
    const double v = qfunc(40.0);
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1e-300);
}

TEST(Qfunc, SingleUserBoundAtTenDb) {
    EXPECT_NEAR(qfunc(std::sqrt(10.0)), 7.89e-4, 1e-5);
    EXPECT_NEAR(qfunc(std::sqrt(10.0)), oracle::gaussian_tail(std::sqrt(10.0)), 1e-13);
    EXPECT_NEAR(qfunc(std::sqrt(10.0)), q_sqrt10, 1e-15);
}

TEST(Qfunc, MatchesSimpsonTailOnGrid) {
    for (double x = -8.0; x <= 8.0; x += 0.25) EXPECT_NEAR(qfunc(x), oracle::gaussian_tail(x), 1e-12) << x;
}

TEST(BerOf, Values) {
    EXPECT_DOUBLE_EQ(ber_of(0.0), 0.5);
    EXPECT_NEAR(ber_of(10.0), 7.89e-4, 1e-5);
    EXPECT_THROW(ber_of(-1e-9), DomainError);
}

TEST(BerOf, Monotone) {
    double prev = ber_of(0.0);
    for (double s = 0.05; s <= 30.0; s += 0.05) {
        const double b = ber_of(s);
        EXPECT_LE(b, prev);
        prev = b;
    }
}

TEST(GaussHermite, IntegratesLowMoments) {
    for (int n : {20, 60, 64, 120}) {
        const auto& r = gauss_hermite(n);
        double w = 0.0, t2 = 0.0, t4 = 0.0;
        for (int k = 0; k < n; ++k) {
            w += r.weights[k];
            t2 += r.weights[k] * r.nodes[k] * r.nodes[k];
            t4 += r.weights[k] * std::pow(r.nodes[k], 4);
        }
        const double sp = std::sqrt(std::numbers::pi);
        EXPECT_NEAR(w, sp, 1e-13) << n;
        EXPECT_NEAR(t2, sp / 2, 1e-13) << n;
        EXPECT_NEAR(t4, 3 * sp / 4, 1e-12) << n;
    }
}

TEST(MmseBpsk, ZeroSnrIsExactlyOne) { EXPECT_EQ(mmse_bpsk(0.0), 1.0); }

TEST(MmseBpsk, HighSnrVanishes) {
    EXPECT_LT(mmse_bpsk(100.0), 1e-8);
    EXPECT_GE(mmse_bpsk(100.0), 0.0);
    EXPECT_LT(mmse_bpsk(49.9), 1e-10);
}

TEST(MmseBpsk, AgreesWithMonteCarloAtOne) {
    EXPECT_NEAR(mmse_bpsk(1.0), mmse_at_1_monte_carlo, 3 * mmse_at_1_standard_error);
}

TEST(MmseBpsk, AgreesWithHighPrecisionReference) {
    for (const auto& r : mmse_reference) EXPECT_NEAR(mmse_bpsk(r.x), r.value, 1e-10) << r.x;
}

TEST(MmseBpsk, AgreesWithTrapezoidOracle) {
    for (double x = 0.05; x <= 20.0; x += 0.35) EXPECT_NEAR(mmse_bpsk(x), oracle::mmse_trapezoid(x), 1e-10) << x;
}

TEST(MmseBpsk, StrictlyDecreasingInUnitInterval) {
    double prev = mmse_bpsk(0.0);
    EXPECT_LE(prev, 1.0);
    for (int k = 1; k <= 200; ++k) {
        const double v = mmse_bpsk(0.1 * k);
        EXPECT_LT(v, prev) << 0.1 * k;
        EXPECT_GT(v, 0.0);
        EXPECT_LT(prev - v, 0.11); // no jumps: |mmse'| <= 1
        prev = v;
    }
}

TEST(MmseBpsk, QuadratureOrderStable) {
    for (int k = 0; k <= 200; ++k) EXPECT_NEAR(mmse_bpsk(0.1 * k, 60), mmse_bpsk(0.1 * k, 120), 1e-9) << 0.1 * k;
}

TEST(MmseBpsk, DomainError) { EXPECT_THROW(mmse_bpsk(-0.5), DomainError); }

TEST(MmseBpsk, DerivativeMatchesFiniteDifferences) {
    for (double x = 0.2; x <= 20.0; x += 0.4) {
        const double h = 1e-5;
        const double fd = (mmse_bpsk(x + h) - mmse_bpsk(x - h)) / (2 * h);
        EXPECT_NEAR(mmse_bpsk_derivative(x), fd, 1e-7) << x;
    }
    EXPECT_EQ(mmse_bpsk_derivative(0.0), -1.0);
}

TEST(MmseTable, MatchesDirectEvaluation) {
    const MmseTable table;
    for (int k = 0; k <= 100000; ++k) {
        const double x = 50.0 * k / 100000.0 + 1e-7;
        ASSERT_NEAR(table(x), mmse_bpsk(x), 1e-7) << x;
    }
    EXPECT_EQ(table(60.0), 0.0);
    EXPECT_EQ(table(0.0), 1.0);
}

TEST(MmseTable, Monotone) {
    const MmseTable table;
    double prev = table(0.0);
    for (int k = 1; k <= 200000; ++k) {
        const double v = table(50.0 * k / 200000.0);
        ASSERT_LE(v, prev) << 50.0 * k / 200000.0;
        prev = v;
    }
}

TEST(MmseFunction, SwitchSelectsEvaluator) {
    const auto direct = MmseFunction::direct();
    const auto table = MmseFunction::tabulated();
    EXPECT_FALSE(direct.uses_table());
    EXPECT_TRUE(table.uses_table());
    EXPECT_EQ(direct(2.5), mmse_bpsk(2.5));
    EXPECT_NEAR(table(2.5), mmse_bpsk(2.5), 1e-7);
}
