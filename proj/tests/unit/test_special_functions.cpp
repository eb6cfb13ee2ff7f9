#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ibres/errors.hpp"
#include "ibres/special_functions.hpp"
#include "oracles.hpp"

namespace {

using ibres::special::BesselOrder;
using ibres::special::bessel_j;
using ibres::special::hankel1;
using ibres::special::ratio_h;
using ibres::special::ratio_j;
using Complex = std::complex<double>;

constexpr Complex kI{0.0, 1.0};

double rel(Complex got, Complex want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// Uniform in the annulus [r0, r1], closed upper half-plane.
Complex random_upper(std::mt19937_64& rng, double r0, double r1) {
    std::uniform_real_distribution<double> r(r0, r1);
    std::uniform_real_distribution<double> theta(0.0, std::numbers::pi);
    return std::polar(r(rng), theta(rng));
}

TEST(BesselJ, ValuesAtOrigin) {
    EXPECT_EQ(bessel_j(BesselOrder(0), 0.0), Complex(1.0));
    EXPECT_EQ(bessel_j(BesselOrder(1), 0.0), Complex(0.0));
    EXPECT_EQ(bessel_j(BesselOrder(5), 0.0), Complex(0.0));
}

TEST(BesselJ, OrderZeroAtOneMatchesPowerSeries) {
    EXPECT_LE(rel(bessel_j(BesselOrder(0), 1.0), ibres::oracle::bessel_j_series(0, 1.0)), 1e-14);
}

TEST(BesselJ, NegativeOrderIsRejected) {
    EXPECT_THROW(BesselOrder(-1), ibres::ContractError);
}

TEST(BesselJ, SeriesOracleUpToFifty) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> radius(0.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = trial % 9;
        const Complex z = std::polar(radius(rng), angle(rng));
        EXPECT_LE(rel(bessel_j(BesselOrder(p), z), ibres::oracle::bessel_j_series(p, z)), 1e-10)
            << "p=" << p << " z=" << z;
    }
}

TEST(BesselJ, ConjugationSymmetry) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const Complex z = random_upper(rng, 0.05, 40.0);
        for (int p : {0, 3, 8}) {
            const Complex a = bessel_j(BesselOrder(p), std::conj(z));
            const Complex b = std::conj(bessel_j(BesselOrder(p), z));
            EXPECT_LE(std::abs(a - b), 1e-13 * std::abs(b));
        }
    }
}

TEST(BesselJ, OutOfRangeIsAnError) {
    EXPECT_THROW(bessel_j(BesselOrder(0), Complex(0.0, 800.0)), ibres::OutOfRangeError);
}

TEST(Hankel, SingularAtOrigin) {
    EXPECT_THROW(hankel1(BesselOrder(0), 0.0), ibres::SingularityError);
    EXPECT_THROW(hankel1(BesselOrder(3), 0.0), ibres::SingularityError);
}

TEST(Hankel, OrderZeroAtIMatchesLogSeries) {
    EXPECT_LE(rel(hankel1(BesselOrder(0), kI), ibres::oracle::hankel1_series(0, kI)), 1e-12);
}

TEST(Hankel, SeriesOracleUpToFifty) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = trial % 9;
        const Complex z = random_upper(rng, 0.05, 50.0);
        EXPECT_LE(rel(hankel1(BesselOrder(p), z), ibres::oracle::hankel1_series(p, z)), 1e-10)
            << "p=" << p << " z=" << z;
    }
}

TEST(Hankel, DecaysAlongImaginaryAxis) {
    double previous = std::abs(hankel1(BesselOrder(2), Complex(0.0, 1.0)));
    for (double t : {5.0, 20.0, 80.0, 300.0}) {
        const double now = std::abs(hankel1(BesselOrder(2), Complex(0.0, t)));
        EXPECT_LT(now, previous);
        previous = now;
    }
    EXPECT_LT(previous, 1e-120);
}

TEST(Hankel, CrossWronskian) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        const Complex z = random_upper(rng, 0.1, 30.0);
        const Complex expected = 2.0 * kI / (std::numbers::pi * z);
        for (int p = 0; p <= 8; ++p) {
            const Complex w = bessel_j(BesselOrder(p + 1), z) * hankel1(BesselOrder(p), z) -
                              bessel_j(BesselOrder(p), z) * hankel1(BesselOrder(p + 1), z);
            EXPECT_LE(std::abs(w - expected), 1e-10 * (1.0 + std::abs(expected))) << "p=" << p << " z=" << z;
        }
    }
}

TEST(Recurrence, ThreeTermForJAndH) {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 60; ++trial) {
        const Complex z = random_upper(rng, 0.2, 30.0);
        for (int p = 1; p <= 8; ++p) {
            const Complex j_lhs = bessel_j(BesselOrder(p - 1), z) + bessel_j(BesselOrder(p + 1), z);
            const Complex j_rhs = 2.0 * p / z * bessel_j(BesselOrder(p), z);
            EXPECT_LE(std::abs(j_lhs - j_rhs),
                      1e-10 * std::max({std::abs(j_rhs), std::abs(bessel_j(BesselOrder(p - 1), z))}));
            const Complex h_lhs = hankel1(BesselOrder(p - 1), z) + hankel1(BesselOrder(p + 1), z);
            const Complex h_rhs = 2.0 * p / z * hankel1(BesselOrder(p), z);
            EXPECT_LE(std::abs(h_lhs - h_rhs), 1e-10 * std::abs(hankel1(BesselOrder(p + 1), z)));
        }
    }
}

TEST(RatioJ, SmallArgumentAsymptotics) {
    for (int p = 0; p <= 8; ++p) {
        for (Complex z : {Complex(1e-4, 0.0), 1e-4 * kI, std::polar(1e-4, 0.7)}) {
            EXPECT_LE(rel(ratio_j(p, z), 2.0 * (p + 1) / z), 1e-6) << "p=" << p;
        }
    }
}

TEST(RatioJ, MatchesDirectDivision) {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 100; ++trial) {
        const Complex z = std::polar(5.0, std::uniform_real_distribution<double>(-3.1, 3.1)(rng));
        const int p = trial % 9;
        const Complex direct = bessel_j(BesselOrder(p), z) / bessel_j(BesselOrder(p + 1), z);
        EXPECT_LE(rel(ratio_j(p, z), direct), 1e-9) << "p=" << p << " z=" << z;
    }
}

TEST(RatioJ, FiniteAtTwo) {
    const Complex r = ratio_j(0, 2.0);
    EXPECT_TRUE(std::isfinite(r.real()) && std::isfinite(r.imag()));
}

TEST(RatioJ, StaysAccurateWhereDivisionUnderflows) {
    // J_p(iy) ~ e^y / sqrt(y) overflows long before the ratio stops making sense
    const Complex z(0.0, 1500.0);
    const Complex r = ratio_j(3, z);
    EXPECT_TRUE(std::isfinite(std::abs(r)));
    EXPECT_NEAR(std::abs(r), 1.0, 1e-2);
}

TEST(RatioJ, PoleAtZeroOfDenominator) {
    EXPECT_THROW(ratio_j(0, 3.8317059702075125), ibres::PoleError);
}

TEST(RatioH, SmallArgumentAsymptotics) {
    for (int p = 2; p <= 8; ++p) {
        for (Complex z : {Complex(1e-4, 0.0), 1e-4 * kI, std::polar(1e-4, 2.0)}) {
            EXPECT_LE(rel(ratio_h(p, z), 2.0 * (p - 1) / z), 1e-6) << "p=" << p;
        }
    }
}

TEST(RatioH, MatchesDirectDivision) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const Complex z = random_upper(rng, 0.5, 20.0);
        const int p = 1 + trial % 8;
        const Complex direct = hankel1(BesselOrder(p), z) / hankel1(BesselOrder(p - 1), z);
        EXPECT_LE(rel(ratio_h(p, z), direct), 1e-9) << "p=" << p << " z=" << z;
    }
}

TEST(RatioH, SingularAtOrigin) {
    EXPECT_THROW(ratio_h(2, 0.0), ibres::SingularityError);
}

TEST(RatioTerms, PlusMinusOneFormsComeFromOneRecurrenceStep) {
    const Complex z(0.3, 2.2);
    for (int p = 0; p <= 6; ++p) {
        const auto t = ibres::special::ratio_terms(p, z);
        EXPECT_EQ(t.h_pp1_over_pm1, 2.0 * p / z * t.h_p_over_pm1 - 1.0);
        EXPECT_EQ(t.j_pm1_over_pp1, 2.0 * p / z * t.j_p_over_pp1 - 1.0);
        EXPECT_EQ(t.h_p_over_pm1, ratio_h(p, z));
        EXPECT_EQ(t.j_p_over_pp1, ratio_j(p, z));
    }
}

TEST(RatioTerms, MatchDivisionsOfDirectValues) {
    const Complex z(1.1, 3.4);
    for (int p = 1; p <= 6; ++p) {
        const auto t = ibres::special::ratio_terms(p, z);
        auto h = [&](int k) { return hankel1(BesselOrder(k), z); };
        auto j = [&](int k) { return bessel_j(BesselOrder(k), z); };
        EXPECT_LE(rel(t.h_pp1_over_pm1, h(p + 1) / h(p - 1)), 1e-9);
        EXPECT_LE(rel(t.j_pm1_over_pp1, j(p - 1) / j(p + 1)), 1e-9);
    }
}

}  // namespace
