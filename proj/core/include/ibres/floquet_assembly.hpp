#pragma once

// Truncated Floquet system for a parametrically forced circular fiber.
//
// Perturbations are expanded as e^{gamma t} sum_n X_n e^{int}. For each
// harmonic n the corrected coupled equations give two rows that are linear in
// the forcing amplitude tau, so the truncated system |n| <= N is a pencil
//
//     (A - tau B) X = 0,
//
// A block-diagonal (2x2 blocks), B block-tridiagonal with zero diagonal
// blocks. Unknowns and rows are ordered (r, theta) per harmonic,
// n = -N..N.

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string_view>

namespace ibres::floquet {

using Complex = std::complex<double>;

/// Dimensionless groups of a case study. phi = nu^2 / kappa.
class PhysicalParameters {
public:
    static PhysicalParameters from_kappa_nu(double kappa, double nu);
    static PhysicalParameters from_phi_nu(double phi, double nu);

    double kappa() const noexcept { return kappa_; }
    double nu() const noexcept { return nu_; }
    double phi() const noexcept { return phi_; }

private:
    PhysicalParameters(double kappa, double nu, double phi) : kappa_(kappa), nu_(nu), phi_(phi) {}
    double kappa_;
    double nu_;
    double phi_;
};

enum class FloquetClass { Harmonic, Subharmonic };

std::string_view to_string(FloquetClass c) noexcept;
/// Parses "harmonic" / "subharmonic"; throws ContractError otherwise.
FloquetClass parse_floquet_class(std::string_view text);

/// gamma = 0 (period 2 pi) or i/2 (period 4 pi).
Complex floquet_exponent(FloquetClass c) noexcept;

/// Principal root of shift / nu, Re >= 0; exactly zero when shift == 0.
Complex omega_from_shift(Complex shift, double nu);

/// Omega_n = sqrt((gamma + i n) / nu).
Complex omega(int n, FloquetClass c, double nu);

struct BlockRows {
    Eigen::Matrix2cd a;        // coefficients of (X_n^r, X_n^theta)
    Eigen::Matrix2cd b_left;   // coefficients of X_{n-1}, factor tau removed
    Eigen::Matrix2cd b_right;  // coefficients of X_{n+1}, factor tau removed
};

/// Rows for gamma + i n = shift != 0 (ContractError when shift == 0 or p <= 0).
BlockRows block_rows_nondegenerate(double p, Complex shift, const PhysicalParameters& params);
BlockRows block_rows_nondegenerate(double p, int n, FloquetClass c, const PhysicalParameters& params);

/// Rows used exactly at gamma + i n = 0.
BlockRows block_rows_degenerate(double p);

struct FloquetPencil {
    Eigen::MatrixXcd a;
    Eigen::MatrixXcd b;
    int truncation = 0;
    double p = 0.0;
    FloquetClass floquet_class = FloquetClass::Harmonic;

    Eigen::Index side() const noexcept { return a.rows(); }
    /// Row/column offset of harmonic n (first of its two entries).
    Eigen::Index offset(int n) const noexcept { return 2 * (n + truncation); }
};

/// Assembles rows n = -N..N; couplings to |n| = N+1 are dropped.
FloquetPencil assemble_pencil(double p, FloquetClass c, const PhysicalParameters& params, int truncation);

/// Exact elimination of the odd harmonics. B only couples n to n +- 1, so
/// with X_odd = tau A_odd^{-1} B_oe X_even the pencil collapses onto the even
/// harmonics as (A_ee - sigma S) X_even = 0 with sigma = tau^2 and
/// S = B_eo A_odd^{-1} B_oe. Each finite sigma != 0 stands for the pair
/// tau = +-sqrt(sigma). Odd-harmonic blocks are always nondegenerate.
struct ParityReduction {
    Eigen::MatrixXcd a;  // A restricted to even harmonics
    Eigen::MatrixXcd s;  // B_eo A_odd^{-1} B_oe
    Eigen::MatrixXcd lift;  // A_odd^{-1} B_oe, so X_odd = tau * lift * X_even
    int truncation = 0;

    /// Full-length vector ordered like FloquetPencil for the pair (tau, X_even).
    Eigen::VectorXcd expand(Complex tau, const Eigen::VectorXcd& even) const;
    /// A_ee^{-1} S by 2x2 block inverses; its eigenvalues are 1 / sigma, with
    /// the infinite sigma of the pencil mapped to zero.
    Eigen::MatrixXcd inverse_times_s() const;
};

/// Throws NumericalError if a diagonal block of A is singular.
ParityReduction reduce_parity(const FloquetPencil& pencil);

/// Plain-text dump: header line, then A and B row-major as "re imag" pairs.
void write_pencil(std::ostream& out, const FloquetPencil& pencil);

}  // namespace ibres::floquet
