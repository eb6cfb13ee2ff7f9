#pragma once

// Bessel and first-kind Hankel functions of complex argument.
//
// Direct values (bessel_j, hankel1) are provided for integer order. The
// ratio evaluators accept any real order >= 0 so that the Floquet pencil can
// be assembled for non-integer wavenumbers while tracing tongue boundaries.
//
// Internally everything is reduced to the modified functions I_nu and K_nu
// of an argument in the closed right half-plane:
//   J_n(z)  = i^n I_n(-iz)                     (0 <= arg z <= pi/2)
//   H1_nu(z) = (2 / (pi i)) e^{-i nu pi/2} K_nu(-iz)   (Im z >= 0)
// K_mu, K_{mu+1} for |mu| <= 1/2 come from Temme's series (|w| <= 2) or
// Steed's continued fraction CF2 (|w| > 2); I_nu follows from CF1 and the
// Wronskian. Ratios never form the individual function values, so they stay
// finite where the values themselves overflow.

#include <complex>

namespace ibres::special {

using Complex = std::complex<double>;

/// Non-negative integer Bessel order.
class BesselOrder {
public:
    explicit BesselOrder(int p);
    int value() const noexcept { return p_; }

private:
    int p_;
};

/// |Im z| above which J grows past, and H1 decays below, double range.
inline constexpr double kMaxImagArgument = 690.0;

/// J_p(z). Throws OutOfRangeError for |Im z| > kMaxImagArgument.
Complex bessel_j(BesselOrder p, Complex z);

/// H^(1)_p(z) = J_p(z) + i Y_p(z), principal branch (cut on the negative real
/// axis, upper side included). Throws SingularityError at z = 0 and
/// OutOfRangeError for |Im z| > kMaxImagArgument.
Complex hankel1(BesselOrder p, Complex z);

/// J_nu(z) / J_{nu+1}(z) by continued fraction, nu >= 0.
/// Throws SingularityError at z = 0, PoleError at a zero of J_{nu+1}.
Complex ratio_j(double nu, Complex z);

/// H^(1)_nu(z) / H^(1)_{nu-1}(z), nu >= 0.
/// Any real order is accepted for Im z >= 0; the lower half-plane is only
/// supported for integer nu (ContractError otherwise).
/// Throws SingularityError at z = 0.
Complex ratio_h(double nu, Complex z);

/// The four ratios entering the Floquet coefficients, for wavenumber p.
struct RatioTerms {
    Complex h_p_over_pm1;    // H_p / H_{p-1}
    Complex h_pp1_over_pm1;  // H_{p+1} / H_{p-1}
    Complex j_p_over_pp1;    // J_p / J_{p+1}
    Complex j_pm1_over_pp1;  // J_{p-1} / J_{p+1}
};

/// Evaluates the four ratios; the "+-1 over -1" forms use one step of the
/// three-term recurrence  C_{p+1} + C_{p-1} = (2p/z) C_p.
RatioTerms ratio_terms(double p, Complex z);

namespace detail {

/// K_{mu+1}(w) / K_mu(w), any real mu, Re w >= 0, w != 0.
Complex modified_k_ratio(double mu, Complex w);

struct ModifiedIK {
    Complex i_nu;
    Complex k_nu;
};

/// I_nu(w) and K_nu(w) for nu >= 0, Re w >= 0, w != 0.
ModifiedIK modified_ik(double nu, Complex w);

}  // namespace detail

}  // namespace ibres::special
