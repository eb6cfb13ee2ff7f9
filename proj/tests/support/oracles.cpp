#include "oracles.hpp"

#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ibres::oracle {

namespace mp = boost::multiprecision;
using Big = mp::cpp_complex_100;
using BigReal = mp::cpp_bin_float_100;

namespace {

constexpr int kMaxTerms = 4000;

Big to_big(Complex z) {
    return Big(BigReal(z.real()), BigReal(z.imag()));
}

Complex to_double(const Big& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

BigReal pi() {
    return boost::math::constants::pi<BigReal>();
}

BigReal euler_gamma() {
    return boost::math::constants::euler<BigReal>();
}

// psi(m + 1) = -gamma + H_m
BigReal digamma_int(int m) {
    BigReal h = 0;
    for (int k = 1; k <= m; ++k) h += BigReal(1) / k;
    return h - euler_gamma();
}

BigReal factorial(int m) {
    BigReal f = 1;
    for (int k = 2; k <= m; ++k) f *= k;
    return f;
}

Big pow_int(const Big& z, int n) {
    Big r = Big(1);
    for (int k = 0; k < n; ++k) r *= z;
    return r;
}

Big big_j(int n, const Big& z) {
    const Big half = z / BigReal(2);
    const Big q = -half * half;
    Big term = pow_int(half, n) / factorial(n);
    Big sum = term;
    const BigReal eps = std::numeric_limits<BigReal>::epsilon();
    for (int k = 1; k < kMaxTerms; ++k) {
        term *= q / (BigReal(k) * BigReal(n + k));
        sum += term;
        if (abs(term) < eps * abs(sum) && k > abs(z)) break;
    }
    return sum;
}

Big big_y(int n, const Big& zb) {
    const Big half = zb / BigReal(2);
    const Big log_half = Big(log(abs(half)), atan2(half.imag(), half.real()));
    Big y = BigReal(2) / pi() * big_j(n, zb) * log_half;

    // finite sum over k < n of (n-k-1)!/k! (z/2)^{2k-n}
    Big finite = Big(0);
    for (int k = 0; k < n; ++k) {
        finite += factorial(n - k - 1) / factorial(k) * pow_int(half, 2 * k) / pow_int(half, n);
    }
    y -= finite / pi();

    const Big q = -half * half;
    Big power = pow_int(half, n) / factorial(n);  // (z/2)^n (-z^2/4)^k / (k! (n+k)!)
    Big tail = power * (digamma_int(0) + digamma_int(n));
    const BigReal eps = std::numeric_limits<BigReal>::epsilon();
    for (int k = 1; k < kMaxTerms; ++k) {
        power *= q / (BigReal(k) * BigReal(n + k));
        const Big term = power * (digamma_int(k) + digamma_int(n + k));
        tail += term;
        if (abs(term) < eps * abs(tail) && k > abs(zb)) break;
    }
    y -= tail / pi();
    return y;
}

}  // namespace

Complex bessel_j_series(int n, Complex z) {
    return to_double(big_j(n, to_big(z)));
}

Complex bessel_y_series(int n, Complex z) {
    return to_double(big_y(n, to_big(z)));
}

// J and Y cancel to many digits when Im z is large, so combine before rounding.
Complex hankel1_series(int n, Complex z) {
    const Big zb = to_big(z);
    return to_double(big_j(n, zb) + Big(BigReal(0), BigReal(1)) * big_y(n, zb));
}

std::vector<Complex> determinant_roots(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double radius,
                                       double drop) {
    const auto side = static_cast<int>(a.rows());
    const int samples = side + 1;
    const double two_pi = 2.0 * std::acos(-1.0);
    std::vector<Complex> values(samples);
    for (int k = 0; k < samples; ++k) {
        const Complex tau = std::polar(radius, two_pi * k / samples);
        values[k] = Eigen::MatrixXcd(a - tau * b).determinant();
    }
    // c_j = (1 / (samples r^j)) sum_k values_k w^{-jk}
    std::vector<Complex> coeff(samples);
    for (int j = 0; j < samples; ++j) {
        Complex s = 0.0;
        for (int k = 0; k < samples; ++k) s += values[k] * std::polar(1.0, -two_pi * j * k / samples);
        coeff[j] = s / (static_cast<double>(samples) * std::pow(radius, j));
    }
    double largest = 0.0;
    for (const Complex& c : coeff) largest = std::max(largest, std::abs(c));
    int degree = side;
    while (degree > 0 && std::abs(coeff[degree]) <= drop * largest) --degree;
    if (degree == 0) return {};

    // companion matrix of the monic polynomial
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coeff[i] / coeff[degree];
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    std::vector<Complex> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + degree);

    // Newton polish on the interpolated polynomial
    for (Complex& r : roots) {
        for (int it = 0; it < 3; ++it) {
            Complex p = coeff[degree];
            Complex dp = 0.0;
            for (int j = degree - 1; j >= 0; --j) {
                dp = dp * r + p;
                p = p * r + coeff[j];
            }
            if (dp == Complex(0.0)) break;
            const Complex step = p / dp;
            if (!std::isfinite(std::abs(step))) break;
            r -= step;
        }
    }
    return roots;
}

double multiset_distance(std::vector<Complex> x, std::vector<Complex> y) {
    if (x.size() != y.size()) return std::numeric_limits<double>::infinity();
    std::vector<std::size_t> perm(y.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size() && worst < best; ++i) {
            worst = std::max(worst, std::abs(x[i] - y[perm[i]]) / std::max(1.0, std::abs(x[i])));
        }
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace ibres::oracle
