#include "ibres/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ibres/errors.hpp"

namespace ibres::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// Below this modulus the modified functions come from Temme's series, above
// it from Steed's CF2.
constexpr double kSeriesRadius = 2.0;
// Below this modulus J_n is summed directly from its ascending series.
constexpr double kJSeriesRadius = 2.0;

// Taylor coefficients of 1/Gamma(1+x) about x = 0 (Abramowitz & Stegun 6.1.34,
// shifted by one).
constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

struct GammaTerms {
    double gam1;    // (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
    double gam2;    // (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
    double gampl;   // 1/Gamma(1+mu)
    double gammi;   // 1/Gamma(1-mu)
};

GammaTerms temme_gamma_terms(double mu) {
    // Odd and even parts of 1/Gamma(1+x) evaluated without cancellation.
    double odd = 0.0;
    double even = 0.0;
    double power = 1.0;
    for (std::size_t k = 0; k < kRecipGamma.size(); ++k) {
        if (k % 2 == 0) {
            even += kRecipGamma[k] * power;
        } else {
            odd += kRecipGamma[k] * power;  // power = mu^(k-1) here
        }
        if (k % 2 == 1) power *= mu * mu;
    }
    // odd = sum_{k odd} c_k mu^{k-1}, so the odd part of 1/Gamma(1+mu) is mu*odd.
    GammaTerms g{};
    g.gam1 = -odd;
    g.gam2 = even;
    g.gampl = even + mu * odd;
    g.gammi = even - mu * odd;
    return g;
}

Complex sinhc(Complex e) {
    if (std::abs(e) < 1e-4) {
        const Complex e2 = e * e;
        return 1.0 + e2 / 6.0 + e2 * e2 / 120.0;
    }
    return std::sinh(e) / e;
}

struct KPair {
    Complex k_mu;
    Complex k_mu1;
};

// K_mu(w), K_{mu+1}(w) for |mu| <= 1/2, |w| <= kSeriesRadius.
KPair temme_series(double mu, Complex w) {
    const Complex x2 = 0.5 * w;
    const double pimu = kPi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    Complex d = -std::log(x2);
    Complex e = mu * d;
    const Complex fact2 = sinhc(e);
    const GammaTerms g = temme_gamma_terms(mu);
    Complex ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    Complex sum = ff;
    e = std::exp(e);
    Complex p = 0.5 * e / g.gampl;
    Complex q = 0.5 / (e * g.gammi);
    Complex c = 1.0;
    d = x2 * x2;
    Complex sum1 = p;
    const double mu2 = mu * mu;
    for (int i = 1; i <= 500; ++i) {
        const double di = i;
        ff = (di * ff + p + q) / (di * di - mu2);
        c *= d / di;
        p /= (di - mu);
        q /= (di + mu);
        const Complex del = c * ff;
        sum += del;
        const Complex del1 = c * (p - di * ff);
        sum1 += del1;
        if (std::abs(del) < std::abs(sum) * kEps && std::abs(del1) < std::abs(sum1) * kEps) {
            return {sum, sum1 * (2.0 / w)};
        }
    }
    throw ConvergenceError("Temme series for K did not converge");
}

struct Cf2Result {
    Complex ratio;  // K_{mu+1} / K_mu
    Complex s;      // normalisation sum, K_mu = sqrt(pi/(2w)) e^{-w} / s
};

// Steed's continued fraction CF2 for |mu| <= 1/2, Re w >= 0, |w| > kSeriesRadius.
Cf2Result steed_cf2(double mu, Complex w) {
    const double a1 = 0.25 - mu * mu;
    Complex b = 2.0 * (1.0 + w);
    Complex d = 1.0 / b;
    Complex h = d;
    Complex delh = d;
    Complex q1 = 0.0;
    Complex q2 = 1.0;
    Complex q = a1;
    Complex c = a1;
    double a = -a1;
    Complex s = 1.0 + q * delh;
    const int max_iter = 20000 + static_cast<int>(50.0 * std::abs(w));
    for (int i = 2; i <= max_iter; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / static_cast<double>(i);
        const Complex qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const Complex dels = q * delh;
        s += dels;
        if (std::abs(dels) < std::abs(s) * kEps && std::abs(delh) < std::abs(h) * kEps) {
            h *= a1;
            return {(mu + w + 0.5 - h) / w, s};
        }
    }
    throw ConvergenceError("CF2 for K did not converge at |w| = " + std::to_string(std::abs(w)));
}

KPair k_pair(double mu, Complex w) {
    if (std::abs(w) <= kSeriesRadius) return temme_series(mu, w);
    const Cf2Result cf = steed_cf2(mu, w);
    const Complex k_mu = std::sqrt(kPi / (2.0 * w)) * std::exp(-w) / cf.s;
    return {k_mu, k_mu * cf.ratio};
}

Complex k_ratio_reduced(double mu, Complex w) {
    if (std::abs(w) <= kSeriesRadius) {
        const KPair k = temme_series(mu, w);
        return k.k_mu1 / k.k_mu;
    }
    return steed_cf2(mu, w).ratio;
}

void require_nonzero(Complex z, const char* who) {
    if (z == Complex{0.0, 0.0}) throw SingularityError(std::string(who) + ": argument is zero");
}

void require_finite(Complex z, const char* who) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw OutOfRangeError(std::string(who) + ": non-finite argument");
    }
}

void require_bounded(Complex z, const char* who) {
    require_finite(z, who);
    if (std::abs(z.imag()) > kMaxImagArgument) {
        throw OutOfRangeError(std::string(who) + ": |Im z| exceeds " +
                              std::to_string(kMaxImagArgument));
    }
}

Complex i_power(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

Complex j_series(int p, Complex z) {
    const Complex x2 = 0.5 * z;
    Complex term = 1.0;
    for (int k = 1; k <= p; ++k) term *= x2 / static_cast<double>(k);
    Complex sum = term;
    const Complex m = -x2 * x2;
    for (int k = 1; k < 200; ++k) {
        term *= m / (static_cast<double>(k) * static_cast<double>(k + p));
        sum += term;
        if (std::abs(term) <= kEps * std::abs(sum) * 0.25) break;
    }
    return sum;
}

// J_p for z in the closed first quadrant.
Complex j_first_quadrant(int p, Complex z) {
    if (std::abs(z) <= kJSeriesRadius) return j_series(p, z);
    const Complex w = -kI * z;
    return i_power(p) * detail::modified_ik(p, w).i_nu;
}

// H1_p for Im z >= 0, z != 0.
Complex hankel1_upper(int p, Complex z) {
    const Complex w = -kI * z;
    KPair k = k_pair(0.0, w);
    for (int i = 1; i <= p; ++i) {
        const Complex next = (2.0 * (i) / w) * k.k_mu1 + k.k_mu;
        k.k_mu = k.k_mu1;
        k.k_mu1 = next;
    }
    // (2 / (pi i)) e^{-i p pi / 2} = (2/pi) i^{-(p+1)}
    return (2.0 / kPi) * i_power(-(p + 1)) * k.k_mu;
}

}  // namespace

BesselOrder::BesselOrder(int p) : p_(p) {
    if (p < 0) throw ContractError("Bessel order must be non-negative, got " + std::to_string(p));
}

namespace detail {

Complex modified_k_ratio(double mu, Complex w) {
    if (w == Complex{0.0, 0.0}) throw SingularityError("K ratio: argument is zero");
    if (mu < -0.5) {
        // K_{mu+1}/K_mu = K_{m'}/K_{m'+1} with m' = -mu-1, using K_{-v} = K_v.
        return 1.0 / modified_k_ratio(-mu - 1.0, w);
    }
    const int nl = static_cast<int>(std::floor(mu + 0.5));
    const double base = mu - nl;
    Complex r = k_ratio_reduced(base, w);
    for (int k = 1; k <= nl; ++k) {
        // K_{b+1} = K_{b-1} + (2b/w) K_b
        r = 1.0 / r + 2.0 * (base + k) / w;
    }
    return r;
}

ModifiedIK modified_ik(double nu, Complex w) {
    if (nu < 0.0) throw ContractError("modified_ik: order must be non-negative");
    if (w == Complex{0.0, 0.0}) throw SingularityError("modified_ik: argument is zero");
    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;
    const Complex xi = 1.0 / w;
    const Complex xi2 = 2.0 * xi;

    // CF1: h -> I'_nu / I_nu.
    Complex h = nu * xi;
    if (std::abs(h) < kTiny) h = kTiny;
    Complex b = xi2 * nu;
    Complex d = 0.0;
    Complex c = h;
    const int max_iter = 20000 + static_cast<int>(50.0 * std::abs(w));
    int it = 1;
    for (; it <= max_iter; ++it) {
        b += xi2;
        d = b + d;
        if (std::abs(d) < kTiny) d = kTiny;
        d = 1.0 / d;
        c = b + 1.0 / c;
        if (std::abs(c) < kTiny) c = kTiny;
        const Complex del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    if (it > max_iter) throw ConvergenceError("CF1 for I did not converge");

    // Unnormalised downward recurrence from nu to mu.
    constexpr double kStart = 1e-150;
    Complex ril = kStart;
    Complex ripl = h * ril;
    const Complex ril1 = ril;
    Complex fact = nu * xi;
    for (int l = nl; l >= 1; --l) {
        const Complex ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
    }
    const Complex f = ripl / ril;

    KPair k = k_pair(mu, w);
    const Complex rkmup = mu * xi * k.k_mu - k.k_mu1;
    const Complex rimu = xi / (f * k.k_mu - rkmup);
    const Complex i_nu = (rimu * ril1) / ril;
    for (int i = 1; i <= nl; ++i) {
        const Complex next = (mu + i) * xi2 * k.k_mu1 + k.k_mu;
        k.k_mu = k.k_mu1;
        k.k_mu1 = next;
    }
    return {i_nu, k.k_mu};
}

}  // namespace detail

Complex bessel_j(BesselOrder order, Complex z) {
    require_bounded(z, "bessel_j");
    const int p = order.value();
    if (z == Complex{0.0, 0.0}) return p == 0 ? 1.0 : 0.0;
    double sign = 1.0;
    if (z.real() < 0.0) {
        z = -z;
        if (p % 2 == 1) sign = -1.0;
    }
    if (z.imag() < 0.0) return sign * std::conj(j_first_quadrant(p, std::conj(z)));
    return sign * j_first_quadrant(p, z);
}

Complex hankel1(BesselOrder order, Complex z) {
    require_nonzero(z, "hankel1");
    require_bounded(z, "hankel1");
    const int p = order.value();
    if (z.imag() >= 0.0) return hankel1_upper(p, z);
    // H1(z) = conj(H2(conj z)) and H2 = 2J - H1.
    const Complex zc = std::conj(z);
    return std::conj(2.0 * bessel_j(order, zc) - hankel1_upper(p, zc));
}

Complex ratio_j(double nu, Complex z) {
    if (!(nu >= 0.0)) throw ContractError("ratio_j: order must be non-negative");
    require_finite(z, "ratio_j");
    require_nonzero(z, "ratio_j");
    // Modified Lentz on  J_nu/J_{nu+1} = b1 - 1/(b2 - 1/(b3 - ...)),
    // b_k = 2(nu+k)/z.
    const Complex inv_z = 1.0 / z;
    const Complex b1 = 2.0 * (nu + 1.0) * inv_z;
    Complex g = b1;
    if (std::abs(g) < kTiny) g = kTiny;
    Complex c = g;
    Complex d = 0.0;
    const int max_iter = 20000 + static_cast<int>(20.0 * std::abs(z));
    for (int k = 2; k <= max_iter; ++k) {
        const Complex bk = 2.0 * (nu + k) * inv_z;
        d = bk - d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = bk - 1.0 / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const Complex delta = c * d;
        g *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            // J_{nu+1}/J_nu vanishing against its natural scale 1/b1 means z
            // sits on a zero of J_{nu+1}.
            if (!std::isfinite(std::abs(g)) || !(std::abs(b1 / g) > 64.0 * kEps)) {
                throw PoleError("ratio_j: argument is a zero of J_{nu+1}");
            }
            return g;
        }
    }
    throw ConvergenceError("ratio_j: continued fraction did not converge");
}

Complex ratio_h(double nu, Complex z) {
    if (!(nu >= 0.0)) throw ContractError("ratio_h: order must be non-negative");
    require_finite(z, "ratio_h");
    require_nonzero(z, "ratio_h");
    if (z.imag() >= 0.0) {
        // H_nu / H_{nu-1} = -i K_nu(w) / K_{nu-1}(w), w = -iz.
        return -kI * detail::modified_k_ratio(nu - 1.0, -kI * z);
    }
    const double rounded = std::round(nu);
    if (rounded != nu) {
        throw ContractError("ratio_h: non-integer order is only supported for Im z >= 0");
    }
    const int p = static_cast<int>(rounded);
    const Complex top = hankel1(BesselOrder(p), z);
    const Complex bottom = p == 0 ? -hankel1(BesselOrder(1), z) : hankel1(BesselOrder(p - 1), z);
    return top / bottom;
}

RatioTerms ratio_terms(double p, Complex z) {
    RatioTerms r{};
    r.h_p_over_pm1 = ratio_h(p, z);
    r.j_p_over_pp1 = ratio_j(p, z);
    const Complex two_p_over_z = 2.0 * p / z;
    r.h_pp1_over_pm1 = two_p_over_z * r.h_p_over_pm1 - 1.0;
    r.j_pm1_over_pp1 = two_p_over_z * r.j_p_over_pp1 - 1.0;
    return r;
}

}  // namespace ibres::special
