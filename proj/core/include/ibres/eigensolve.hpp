#pragma once

// Finite generalized eigenvalues of dense complex pencils (A, B).
//
// Backed by LAPACK's complex QZ (zgges) and generalized eigenvector routine
// (ztgevc). B is typically singular (the Floquet pencil has zero diagonal
// blocks), so infinite eigenvalues are detected on the Schur diagonal of B
// and dropped rather than reported as huge finite numbers.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

namespace ibres::eig {

using Complex = std::complex<double>;

struct EigenResult {
    Complex tau;
    /// ||(A - tau B) v|| / ((||A|| + |tau| ||B||) ||v||), Frobenius norms.
    double residual = 0.0;
    bool finite = true;
    Eigen::VectorXcd vector;
};

/// All finite eigenvalues sorted by (Re, Im). Each carries its eigenvector and
/// a residual <= tol; an eigenpair that cannot be certified even after inverse
/// iteration raises NumericalError. Shape mismatch raises ContractError.
std::vector<EigenResult> generalized_eigenvalues(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                                 double tol);

/// Finite eigenvalues only, sorted by (Re, Im); no vectors, no certification.
/// Same infinite-eigenvalue rule and errors as generalized_eigenvalues.
std::vector<Complex> finite_eigenvalues(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Eigenvalues of a square matrix (Hessenberg QR), sorted by (Re, Im).
std::vector<Complex> standard_eigenvalues(const Eigen::MatrixXcd& m);

/// Eigenvector for a known eigenvalue tau by inverse iteration on A - tau B.
Eigen::VectorXcd inverse_iteration(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Complex tau);

/// Normalised residual of an eigenpair.
double pencil_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Complex tau,
                       const Eigen::VectorXcd& v);

/// sigma_min(A - tau B) / (||A|| + |tau| ||B||): a certificate for tau that
/// needs no eigenvector.
double singular_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Complex tau);

/// Keeps tau with |Im tau| <= rel_imag_tol * max(1, |tau|) and
/// 0 <= Re tau <= tau_max; returns Re tau ascending.
std::vector<double> filter_real_amplitudes(std::span<const EigenResult> results, double rel_imag_tol,
                                           double tau_max);

}  // namespace ibres::eig
