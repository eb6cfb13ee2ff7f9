#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "ibres/eigensolve.hpp"
#include "ibres/errors.hpp"
#include "oracles.hpp"

namespace {

using ibres::eig::Complex;
using ibres::eig::EigenResult;
using ibres::eig::generalized_eigenvalues;
using Eigen::MatrixXcd;

MatrixXcd random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

std::vector<Complex> taus(const std::vector<EigenResult>& r) {
    std::vector<Complex> out;
    for (const auto& e : r) out.push_back(e.tau);
    return out;
}

TEST(Generalized, DiagonalPencil) {
    MatrixXcd a = MatrixXcd::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    const auto r = generalized_eigenvalues(a, MatrixXcd::Identity(2, 2), 1e-12);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(std::abs(r[0].tau - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(r[1].tau - 2.0), 0.0, 1e-14);
    for (const auto& e : r) EXPECT_TRUE(e.finite);
}

TEST(Generalized, SingularBDropsInfiniteEigenvalue) {
    MatrixXcd b = MatrixXcd::Zero(2, 2);
    b(0, 0) = 1.0;
    const auto r = generalized_eigenvalues(MatrixXcd::Identity(2, 2), b, 1e-12);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(std::abs(r[0].tau - 1.0), 0.0, 1e-14);
}

TEST(Generalized, ZeroBHasNoFiniteEigenvalues) {
    EXPECT_TRUE(generalized_eigenvalues(MatrixXcd::Identity(3, 3), MatrixXcd::Zero(3, 3), 1e-12).empty());
}

TEST(Generalized, ShapeErrors) {
    EXPECT_THROW(generalized_eigenvalues(MatrixXcd::Identity(2, 3), MatrixXcd::Identity(2, 3), 1e-12),
                 ibres::ContractError);
    EXPECT_THROW(generalized_eigenvalues(MatrixXcd::Identity(2, 2), MatrixXcd::Identity(3, 3), 1e-12),
                 ibres::ContractError);
    EXPECT_THROW(generalized_eigenvalues(MatrixXcd::Identity(2, 2), MatrixXcd::Identity(2, 2), 0.0),
                 ibres::ContractError);
}

TEST(Generalized, RandomFourByFourAgainstDeterminantOracle) {
    std::mt19937_64 rng(4);
    const MatrixXcd a = random_matrix(rng, 4);
    const MatrixXcd b = random_matrix(rng, 4);
    const auto got = taus(generalized_eigenvalues(a, b, 1e-10));
    EXPECT_LE(ibres::oracle::multiset_distance(got, ibres::oracle::determinant_roots(a, b)), 1e-8);
}

// Randomized equivalence with the interpolation oracle, including pencils
// whose B has zeroed rows (infinite eigenvalues).
TEST(Generalized, OracleEquivalenceUpToSideSix) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 6;
        const MatrixXcd a = random_matrix(rng, n);
        MatrixXcd b = random_matrix(rng, n);
        const int zero_rows = (trial / 6) % 3 == 2 ? std::min(2, n - 1) : 0;
        for (int k = 0; k < zero_rows; ++k) b.row(k).setZero();
        // eigenvalues of a random pencil cluster near |tau| ~ 1; interpolate on a
        // circle that roughly matches their scale
        const auto got = taus(generalized_eigenvalues(a, b, 1e-9));
        ASSERT_EQ(got.size(), static_cast<std::size_t>(n - zero_rows)) << "trial " << trial;
        double scale = 1.0;
        for (const Complex t : got) scale = std::max(scale, std::abs(t));
        const auto oracle = ibres::oracle::determinant_roots(a, b, scale);
        EXPECT_LE(ibres::oracle::multiset_distance(got, oracle), 1e-8) << "trial " << trial << " side " << n;
    }
}

TEST(Generalized, ResidualsRecomputeIndependently) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const MatrixXcd a = random_matrix(rng, 8);
        const MatrixXcd b = random_matrix(rng, 8);
        for (const auto& e : generalized_eigenvalues(a, b, 1e-10)) {
            const double r = (a - e.tau * b).operator*(e.vector).norm() /
                             ((a.norm() + std::abs(e.tau) * b.norm()) * e.vector.norm());
            EXPECT_LE(r, 1e-10);
            EXPECT_NEAR(r, e.residual, 1e-13);
        }
    }
}

TEST(Generalized, ScaleEquivariance) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const MatrixXcd a = random_matrix(rng, 5);
        const MatrixXcd b = random_matrix(rng, 5);
        const double c = 0.1 + 10.0 * trial / 20.0;
        const auto base = taus(generalized_eigenvalues(a, b, 1e-10));
        const auto scaled = taus(generalized_eigenvalues(c * a, b, 1e-10));
        ASSERT_EQ(base.size(), scaled.size());
        for (const Complex t : base) {
            double best = std::numeric_limits<double>::infinity();
            for (const Complex s : scaled) best = std::min(best, std::abs(s - c * t) / std::abs(c * t));
            EXPECT_LE(best, 1e-10);
        }
    }
}

TEST(Generalized, OrderingIsByRealThenImaginary) {
    std::mt19937_64 rng(7);
    const auto r = taus(generalized_eigenvalues(random_matrix(rng, 6), random_matrix(rng, 6), 1e-10));
    for (std::size_t k = 1; k < r.size(); ++k) {
        EXPECT_TRUE(r[k - 1].real() < r[k].real() || (r[k - 1].real() == r[k].real() && r[k - 1].imag() <= r[k].imag()));
    }
}

TEST(Generalized, Deterministic) {
    std::mt19937_64 rng(8);
    const MatrixXcd a = random_matrix(rng, 7);
    const MatrixXcd b = random_matrix(rng, 7);
    EXPECT_EQ(taus(generalized_eigenvalues(a, b, 1e-10)), taus(generalized_eigenvalues(a, b, 1e-10)));
}

TEST(FiniteEigenvalues, AgreeWithCertifiedSolver) {
    std::mt19937_64 rng(9);
    const MatrixXcd a = random_matrix(rng, 6);
    MatrixXcd b = random_matrix(rng, 6);
    b.row(3).setZero();
    const auto plain = ibres::eig::finite_eigenvalues(a, b);
    const auto cert = taus(generalized_eigenvalues(a, b, 1e-10));
    EXPECT_LE(ibres::oracle::multiset_distance(plain, cert), 1e-12);
}

TEST(StandardEigenvalues, TriangularMatrix) {
    MatrixXcd m = MatrixXcd::Zero(3, 3);
    m(0, 0) = 3.0;
    m(1, 1) = Complex(0.0, 1.0);
    m(2, 2) = -2.0;
    m(0, 2) = 5.0;
    const auto ev = ibres::eig::standard_eigenvalues(m);
    ASSERT_EQ(ev.size(), 3u);
    EXPECT_NEAR(std::abs(ev[0] - Complex(-2.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(ev[1] - Complex(0.0, 1.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(ev[2] - Complex(3.0)), 0.0, 1e-14);
}

TEST(InverseIteration, RecoversEigenvector) {
    std::mt19937_64 rng(10);
    const MatrixXcd a = random_matrix(rng, 6);
    const MatrixXcd b = random_matrix(rng, 6);
    for (const Complex t : ibres::eig::finite_eigenvalues(a, b)) {
        const Eigen::VectorXcd v = ibres::eig::inverse_iteration(a, b, t);
        EXPECT_LE(ibres::eig::pencil_residual(a, b, t, v), 1e-12);
    }
}

TEST(SingularResidual, SmallAtEigenvalueLargeAway) {
    std::mt19937_64 rng(11);
    const MatrixXcd a = random_matrix(rng, 5);
    const MatrixXcd b = random_matrix(rng, 5);
    const auto ev = ibres::eig::finite_eigenvalues(a, b);
    for (const Complex t : ev) EXPECT_LE(ibres::eig::singular_residual(a, b, t), 1e-13);
    double gap = std::numeric_limits<double>::infinity();
    const Complex probe(100.0, 100.0);
    for (const Complex t : ev) gap = std::min(gap, std::abs(t - probe));
    if (gap > 10.0) {
        EXPECT_GT(ibres::eig::singular_residual(a, b, probe), 1e-3);
    }
}

TEST(Filter, ThresholdExample) {
    std::vector<EigenResult> in(3);
    in[0].tau = 0.3;
    in[1].tau = Complex(0.3, 1e-12);
    in[2].tau = Complex(0.2, 0.4);
    const auto out = ibres::eig::filter_real_amplitudes(in, 1e-8, 1.0);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0], 0.3);
    EXPECT_EQ(out[1], 0.3);
}

TEST(Filter, EmptyInput) {
    EXPECT_TRUE(ibres::eig::filter_real_amplitudes({}, 1e-8, 1.0).empty());
}

TEST(Filter, NegativeAndTooLargeExcluded) {
    std::vector<EigenResult> in(4);
    in[0].tau = -0.1;
    in[1].tau = 1.5;
    in[2].tau = 0.7;
    in[3].tau = 0.0;
    const auto out = ibres::eig::filter_real_amplitudes(in, 1e-8, 1.0);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0], 0.0);
    EXPECT_EQ(out[1], 0.7);
}

}  // namespace
