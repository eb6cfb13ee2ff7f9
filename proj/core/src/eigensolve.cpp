#include "ibres/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ibres/errors.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace ibres::eig {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kRefinementSteps = 3;

bool all_finite(const Eigen::VectorXcd& v) {
    return v.allFinite();
}

// Generalized inverse iteration (A - tau B) y = B v, used only when the QZ
// eigenvector misses the tolerance.
Eigen::VectorXcd refine(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Complex tau,
                        Eigen::VectorXcd v) {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a - tau * b);
    for (int i = 0; i < kRefinementSteps; ++i) {
        Eigen::VectorXcd y = lu.solve(b * v);
        if (!all_finite(y) || y.norm() == 0.0) break;
        v = y / y.norm();
    }
    return v;
}

}  // namespace

double pencil_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Complex tau,
                       const Eigen::VectorXcd& v) {
    const double scale = (a.norm() + std::abs(tau) * b.norm()) * v.norm();
    if (scale == 0.0) return 0.0;
    return (a * v - tau * (b * v)).norm() / scale;
}

double singular_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Complex tau) {
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a - tau * b);
    const double scale = a.norm() + std::abs(tau) * b.norm();
    if (scale == 0.0) return 0.0;
    return svd.singularValues().minCoeff() / scale;
}

namespace {

void check_pencil(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw ContractError("pencil matrices must be square and of equal size (A " +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ", B " +
                            std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
    }
    if (!a.allFinite() || !b.allFinite()) throw NumericalError("pencil contains non-finite entries");
}

// QZ in place: on return s and t hold the generalized Schur form.
void qz(Eigen::MatrixXcd& s, Eigen::MatrixXcd& t, Eigen::VectorXcd& alpha, Eigen::VectorXcd& beta,
        Eigen::MatrixXcd* vsr) {
    const auto n = static_cast<lapack_int>(s.rows());
    alpha.resize(n);
    beta.resize(n);
    Eigen::MatrixXcd dummy(1, 1);
    lapack_int sdim = 0;
    const lapack_int info =
        LAPACKE_zgges(LAPACK_COL_MAJOR, 'N', vsr ? 'V' : 'N', 'N', nullptr, n, s.data(), n, t.data(), n, &sdim,
                      alpha.data(), beta.data(), dummy.data(), 1, vsr ? vsr->data() : dummy.data(), vsr ? n : 1);
    if (info != 0) {
        throw NumericalError("QZ reduction failed to converge (zgges info=" + std::to_string(info) +
                             ", n=" + std::to_string(n) + ")");
    }
}

double infinite_threshold(const Eigen::MatrixXcd& b) {
    return kEps * b.norm() * static_cast<double>(b.rows());
}

bool by_re_im(Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
}

}  // namespace

std::vector<EigenResult> generalized_eigenvalues(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                                 double tol) {
    check_pencil(a, b);
    if (!(tol > 0.0)) throw ContractError("eigen tolerance must be positive");
    const auto n = static_cast<lapack_int>(a.rows());
    if (n == 0) return {};

    Eigen::MatrixXcd s = a;
    Eigen::MatrixXcd t = b;
    Eigen::VectorXcd alpha;
    Eigen::VectorXcd beta;
    Eigen::MatrixXcd vr(n, n);
    qz(s, t, alpha, beta, &vr);

    Eigen::MatrixXcd vl(1, 1);
    lapack_int m = 0;
    const lapack_int info = LAPACKE_ztgevc(LAPACK_COL_MAJOR, 'R', 'B', nullptr, n, s.data(), n, t.data(), n,
                                           vl.data(), 1, vr.data(), n, n, &m);
    if (info != 0) {
        throw NumericalError("generalized eigenvector computation failed (ztgevc info=" +
                             std::to_string(info) + ")");
    }

    const double threshold = infinite_threshold(b);
    std::vector<EigenResult> out;
    out.reserve(static_cast<std::size_t>(n));
    for (lapack_int j = 0; j < n; ++j) {
        if (std::abs(beta(j)) <= threshold) continue;
        EigenResult r;
        r.tau = alpha(j) / beta(j);
        r.finite = true;
        r.vector = vr.col(j);
        r.residual = pencil_residual(a, b, r.tau, r.vector);
        if (!(r.residual <= tol)) {
            r.vector = refine(a, b, r.tau, r.vector);
            r.residual = pencil_residual(a, b, r.tau, r.vector);
        }
        if (!(r.residual <= tol)) {
            throw NumericalError("eigenpair tau=(" + std::to_string(r.tau.real()) + "," +
                                 std::to_string(r.tau.imag()) + ") has residual " +
                                 std::to_string(r.residual) + " above tolerance " + std::to_string(tol));
        }
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const EigenResult& x, const EigenResult& y) { return by_re_im(x.tau, y.tau); });
    return out;
}

std::vector<Complex> finite_eigenvalues(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    check_pencil(a, b);
    if (a.rows() == 0) return {};
    Eigen::MatrixXcd s = a;
    Eigen::MatrixXcd t = b;
    Eigen::VectorXcd alpha;
    Eigen::VectorXcd beta;
    qz(s, t, alpha, beta, nullptr);
    const double threshold = infinite_threshold(b);
    std::vector<Complex> out;
    for (Eigen::Index j = 0; j < alpha.size(); ++j) {
        if (std::abs(beta(j)) > threshold) out.push_back(alpha(j) / beta(j));
    }
    std::sort(out.begin(), out.end(), by_re_im);
    return out;
}

std::vector<Complex> standard_eigenvalues(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw ContractError("matrix must be square");
    if (!m.allFinite()) throw NumericalError("matrix contains non-finite entries");
    const auto n = static_cast<lapack_int>(m.rows());
    if (n == 0) return {};
    Eigen::MatrixXcd work = m;
    Eigen::VectorXcd w(n);
    Eigen::MatrixXcd dummy(1, 1);
    const lapack_int info =
        LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(), dummy.data(), 1, dummy.data(), 1);
    if (info != 0) {
        throw NumericalError("QR iteration failed to converge (zgeev info=" + std::to_string(info) +
                             ", n=" + std::to_string(n) + ")");
    }
    std::vector<Complex> out(w.data(), w.data() + n);
    std::sort(out.begin(), out.end(), by_re_im);
    return out;
}

Eigen::VectorXcd inverse_iteration(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Complex tau) {
    check_pencil(a, b);
    const Eigen::Index n = a.rows();
    Eigen::MatrixXcd shifted = a - tau * b;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n) / std::sqrt(static_cast<double>(std::max<Eigen::Index>(n, 1)));
    Eigen::VectorXcd y = lu.solve(v);
    if (!y.allFinite()) {
        // exactly singular factorization: nudge the shift off the eigenvalue
        const double nudge = 64.0 * kEps * std::max(1.0, std::abs(tau));
        lu.compute(a - (tau + nudge) * b);
        y = lu.solve(v);
    }
    for (int i = 0; i < kRefinementSteps && y.allFinite() && y.norm() > 0.0; ++i) {
        v = y / y.norm();
        y = lu.solve(v);
    }
    return y.allFinite() && y.norm() > 0.0 ? Eigen::VectorXcd(y / y.norm()) : v;
}

std::vector<double> filter_real_amplitudes(std::span<const EigenResult> results, double rel_imag_tol,
                                           double tau_max) {
    if (!(rel_imag_tol > 0.0)) throw ContractError("rel_imag_tol must be positive");
    std::vector<double> taus;
    for (const EigenResult& r : results) {
        if (!r.finite) continue;
        const double re = r.tau.real();
        if (std::abs(r.tau.imag()) > rel_imag_tol * std::max(1.0, std::abs(r.tau))) continue;
        if (re < 0.0 || re > tau_max) continue;
        taus.push_back(re);
    }
    std::sort(taus.begin(), taus.end());
    return taus;
}

}  // namespace ibres::eig
