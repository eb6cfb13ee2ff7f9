#include "ibres/floquet_assembly.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "ibres/errors.hpp"
#include "ibres/special_functions.hpp"

namespace ibres::floquet {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_positive_wavenumber(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw ContractError("wavenumber p must be positive, got " + std::to_string(p));
    }
}

void write_matrix(std::ostream& out, const Eigen::MatrixXcd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ' ';
            out << m(i, j).real() << ' ' << m(i, j).imag();
        }
        out << '\n';
    }
}

}  // namespace

PhysicalParameters PhysicalParameters::from_kappa_nu(double kappa, double nu) {
    if (!(kappa > 0.0) || !(nu > 0.0)) throw ContractError("kappa and nu must be positive");
    return {kappa, nu, nu * nu / kappa};
}

PhysicalParameters PhysicalParameters::from_phi_nu(double phi, double nu) {
    if (!(phi > 0.0) || !(nu > 0.0)) throw ContractError("phi and nu must be positive");
    return {nu * nu / phi, nu, phi};
}

std::string_view to_string(FloquetClass c) noexcept {
    return c == FloquetClass::Harmonic ? "harmonic" : "subharmonic";
}

FloquetClass parse_floquet_class(std::string_view text) {
    if (text == "harmonic") return FloquetClass::Harmonic;
    if (text == "subharmonic") return FloquetClass::Subharmonic;
    throw ContractError("unknown Floquet class '" + std::string(text) + "'");
}

Complex floquet_exponent(FloquetClass c) noexcept {
    return c == FloquetClass::Harmonic ? Complex{0.0, 0.0} : Complex{0.0, 0.5};
}

Complex omega_from_shift(Complex shift, double nu) {
    if (!(nu > 0.0)) throw ContractError("viscosity must be positive");
    if (shift == Complex{0.0, 0.0}) return {0.0, 0.0};
    // std::sqrt is the principal branch: Re >= 0.
    return std::sqrt(shift / nu);
}

Complex omega(int n, FloquetClass c, double nu) {
    return omega_from_shift(floquet_exponent(c) + Complex{0.0, static_cast<double>(n)}, nu);
}

BlockRows block_rows_nondegenerate(double p, Complex shift, const PhysicalParameters& params) {
    require_positive_wavenumber(p);
    if (shift == Complex{0.0, 0.0}) {
        throw ContractError("nondegenerate rows requested at gamma + i n = 0");
    }
    const Complex om = omega_from_shift(shift, params.nu());
    const special::RatioTerms r = special::ratio_terms(p, kI * om);
    const double phi = params.phi();
    const Complex om3 = om * om * om;
    const Complex om4 = om3 * om;
    const double p2 = p * p;
    const double p3 = p2 * p;

    BlockRows rows;
    rows.a(0, 0) = kI * (phi * om3 * (r.h_p_over_pm1 - r.j_p_over_pp1) + kI * p);
    rows.a(0, 1) = phi * om3 * (r.h_p_over_pm1 + r.j_p_over_pp1) - kI * p2;
    rows.a(1, 0) = kI * (phi * om4 * (2.0 - r.h_pp1_over_pm1 - r.j_pm1_over_pp1) + 2.0 * p3);
    rows.a(1, 1) = -(phi * om4 * (r.h_pp1_over_pm1 - r.j_pm1_over_pp1) + 2.0 * p2);

    // Printed couplings are  +tau C (X_{n-1} - X_{n+1}); in (A - tau B) form
    // that is B_left = -C, B_right = +C.
    Eigen::Matrix2cd coupling;
    coupling << kI * p, -p2,
                2.0 * p3, 2.0 * kI * p2;
    rows.b_left = -coupling;
    rows.b_right = coupling;
    return rows;
}

BlockRows block_rows_nondegenerate(double p, int n, FloquetClass c, const PhysicalParameters& params) {
    return block_rows_nondegenerate(p, floquet_exponent(c) + Complex{0.0, static_cast<double>(n)}, params);
}

BlockRows block_rows_degenerate(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw ContractError("wavenumber p must be positive, got " + std::to_string(p));
    }
    BlockRows rows;
    rows.a << p, kI * p * p,
              kI * p * p * p, p * p;
    // Each row reads D (X_n - i tau X_{n-1} + i tau X_{n+1}).
    rows.b_left = kI * rows.a;
    rows.b_right = -rows.b_left;
    return rows;
}

FloquetPencil assemble_pencil(double p, FloquetClass c, const PhysicalParameters& params, int truncation) {
    if (truncation < 1) throw ContractError("truncation order must be >= 1");
    require_positive_wavenumber(p);

    FloquetPencil pencil;
    pencil.truncation = truncation;
    pencil.p = p;
    pencil.floquet_class = c;
    const Eigen::Index side = 2 * (2 * truncation + 1);
    pencil.a = Eigen::MatrixXcd::Zero(side, side);
    pencil.b = Eigen::MatrixXcd::Zero(side, side);

    const Complex gamma = floquet_exponent(c);
    for (int n = -truncation; n <= truncation; ++n) {
        const Complex shift = gamma + Complex{0.0, static_cast<double>(n)};
        const BlockRows rows = shift == Complex{0.0, 0.0} ? block_rows_degenerate(p)
                                                          : block_rows_nondegenerate(p, shift, params);
        const Eigen::Index k = pencil.offset(n);
        pencil.a.block<2, 2>(k, k) = rows.a;
        if (n > -truncation) pencil.b.block<2, 2>(k, k - 2) = rows.b_left;
        if (n < truncation) pencil.b.block<2, 2>(k, k + 2) = rows.b_right;
    }
    return pencil;
}

namespace {

// First harmonic of the given parity inside [-N, N].
int first_of_parity(int truncation, int parity) {
    const int lo = -truncation;
    return ((lo % 2) + 2) % 2 == parity ? lo : lo + 1;
}

Eigen::Matrix2cd checked_inverse(const Eigen::Matrix2cd& block, int n) {
    const Complex det = block.determinant();
    if (!(std::abs(det) > 1e3 * std::numeric_limits<double>::epsilon() * block.squaredNorm())) {
        throw NumericalError("diagonal block n=" + std::to_string(n) + " is singular");
    }
    return block.inverse();
}

int parity_count(int truncation, int parity) {
    const int first = first_of_parity(truncation, parity);
    return first > truncation ? 0 : (truncation - first) / 2 + 1;
}

}  // namespace

ParityReduction reduce_parity(const FloquetPencil& pencil) {
    const int big_n = pencil.truncation;
    const int even0 = first_of_parity(big_n, 0);
    const int odd0 = first_of_parity(big_n, 1);
    const Eigen::Index ne = 2 * parity_count(big_n, 0);
    const Eigen::Index no = 2 * parity_count(big_n, 1);
    auto ei = [&](int n) { return static_cast<Eigen::Index>(n - even0); };  // 2 * ((n - even0) / 2)
    auto oi = [&](int n) { return static_cast<Eigen::Index>(n - odd0); };
    auto b_block = [&](int row, int col) { return pencil.b.block<2, 2>(pencil.offset(row), pencil.offset(col)); };

    ParityReduction red;
    red.truncation = big_n;
    red.a = Eigen::MatrixXcd::Zero(ne, ne);
    red.s = Eigen::MatrixXcd::Zero(ne, ne);
    red.lift = Eigen::MatrixXcd::Zero(no, ne);

    for (int n = even0; n <= big_n; n += 2) {
        red.a.block<2, 2>(ei(n), ei(n)) = pencil.a.block<2, 2>(pencil.offset(n), pencil.offset(n));
    }
    for (int m = odd0; m <= big_n; m += 2) {
        const Eigen::Matrix2cd inv = checked_inverse(pencil.a.block<2, 2>(pencil.offset(m), pencil.offset(m)), m);
        for (int k : {m - 1, m + 1}) {
            if (k < -big_n || k > big_n) continue;
            red.lift.block<2, 2>(oi(m), ei(k)) = inv * b_block(m, k);
        }
    }
    for (int n = even0; n <= big_n; n += 2) {
        for (int m : {n - 1, n + 1}) {
            if (m < -big_n || m > big_n) continue;
            for (int k : {m - 1, m + 1}) {
                if (k < -big_n || k > big_n) continue;
                red.s.block<2, 2>(ei(n), ei(k)) += b_block(n, m) * red.lift.block<2, 2>(oi(m), ei(k));
            }
        }
    }
    return red;
}

Eigen::VectorXcd ParityReduction::expand(Complex tau, const Eigen::VectorXcd& even) const {
    if (even.size() != a.rows()) throw ContractError("even-harmonic vector has the wrong length");
    const Eigen::VectorXcd odd = tau * (lift * even);
    const int even0 = first_of_parity(truncation, 0);
    const int odd0 = first_of_parity(truncation, 1);
    Eigen::VectorXcd full(2 * (2 * truncation + 1));
    for (int n = even0; n <= truncation; n += 2) full.segment<2>(2 * (n + truncation)) = even.segment<2>(n - even0);
    for (int m = odd0; m <= truncation; m += 2) full.segment<2>(2 * (m + truncation)) = odd.segment<2>(m - odd0);
    return full;
}

Eigen::MatrixXcd ParityReduction::inverse_times_s() const {
    const int even0 = first_of_parity(truncation, 0);
    Eigen::MatrixXcd m(s.rows(), s.cols());
    for (Eigen::Index k = 0; k < a.rows(); k += 2) {
        const Eigen::Matrix2cd inv = checked_inverse(a.block<2, 2>(k, k), even0 + static_cast<int>(k));
        m.middleRows<2>(k) = inv * s.middleRows<2>(k);
    }
    return m;
}

void write_pencil(std::ostream& out, const FloquetPencil& pencil) {
    const auto old_precision = out.precision(17);
    out << "# pencil p=" << pencil.p << " class=" << to_string(pencil.floquet_class)
        << " N=" << pencil.truncation << " side=" << pencil.side() << '\n';
    out << "# A\n";
    write_matrix(out, pencil.a);
    out << "# B\n";
    write_matrix(out, pencil.b);
    out.precision(old_precision);
}

}  // namespace ibres::floquet
