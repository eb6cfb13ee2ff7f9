#include "ibres/stability_sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "ibres/eigensolve.hpp"
#include "ibres/errors.hpp"

namespace ibres::sweep {

namespace {

constexpr double kColumnTol = 1e-9;

struct Solved {
    floquet::FloquetPencil pencil;
    floquet::ParityReduction reduced;
    std::vector<eig::Complex> spectrum;  // both roots +-sqrt(sigma)
};

Solved solve(double p, FloquetClass c, const PhysicalParameters& params, int n) {
    Solved s{floquet::assemble_pencil(p, c, params, n), {}, {}};
    s.reduced = floquet::reduce_parity(s.pencil);
    // eigenvalues mu = 1 / sigma; mu below the threshold are the infinite sigma
    const Eigen::MatrixXcd m = s.reduced.inverse_times_s();
    const double zero = std::numeric_limits<double>::epsilon() * m.norm() * static_cast<double>(m.rows());
    for (const eig::Complex mu : eig::standard_eigenvalues(m)) {
        if (std::abs(mu) <= zero) continue;
        const eig::Complex tau = std::sqrt(1.0 / mu);
        s.spectrum.push_back(tau);
        s.spectrum.push_back(-tau);
    }
    return s;
}

bool reportable(eig::Complex tau, const SweepConfig& config) {
    const double re = tau.real();
    return re >= 0.0 && re <= config.tau_max &&
           std::abs(tau.imag()) <= config.rel_imag_tol * std::max(1.0, std::abs(tau));
}

// Largest nearest-neighbour distance from each reportable eigenvalue of
// `from` to the full spectrum `to`.
double one_sided_drift(const std::vector<eig::Complex>& from, const std::vector<eig::Complex>& to,
                       const SweepConfig& config) {
    double worst = 0.0;
    for (const eig::Complex r : from) {
        if (!reportable(r, config)) continue;
        double best = std::numeric_limits<double>::infinity();
        for (const eig::Complex s : to) best = std::min(best, std::abs(s - r));
        worst = std::max(worst, best);
    }
    return worst;
}

// Certified eigenvector on the full pencil for a real amplitude.
double certify(const Solved& s, double tau, double tol) {
    const Eigen::VectorXcd even = eig::inverse_iteration(s.reduced.a, s.reduced.s, tau * tau);
    double residual = eig::pencil_residual(s.pencil.a, s.pencil.b, tau, s.reduced.expand(tau, even));
    if (!(residual <= tol)) {
        const Eigen::VectorXcd full = eig::inverse_iteration(s.pencil.a, s.pencil.b, tau);
        residual = std::min(residual, eig::pencil_residual(s.pencil.a, s.pencil.b, tau, full));
    }
    if (!(residual <= tol)) {
        std::ostringstream os;
        os << "eigenpair tau=" << tau << " has residual " << residual << " above tolerance " << tol;
        throw NumericalError(os.str());
    }
    return residual;
}

std::string describe(double p, FloquetClass c) {
    std::ostringstream os;
    os << "p=" << p << " class=" << floquet::to_string(c);
    return os.str();
}

}  // namespace

void SweepConfig::validate() const {
    if (!(p_min > 0.0)) throw ContractError("p_min must be positive");
    if (!(p_step > 0.0)) throw ContractError("p_step must be positive");
    if (!std::isfinite(p_max)) throw ContractError("p_max must be finite");
    if (!(tau_max >= 0.0)) throw ContractError("tau_max must be non-negative");
    if (n_initial < 4) throw ContractError("initial truncation must be >= 4");
    if (n_max < n_initial) throw ContractError("maximum truncation must be >= initial truncation");
    if (!(convergence_tol >= 0.0)) throw ContractError("convergence_tol must be non-negative");
    if (!(rel_imag_tol > 0.0)) throw ContractError("rel_imag_tol must be positive");
    if (!(eigen_tol > 0.0)) throw ContractError("eigen_tol must be positive");
}

std::vector<double> SweepConfig::grid() const {
    std::vector<double> out;
    if (p_max < p_min) return out;
    const auto count = static_cast<long>(std::floor((p_max - p_min) / p_step + 1e-9)) + 1;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) {
        out.push_back(std::round((p_min + static_cast<double>(k) * p_step) * 1e9) / 1e9);
    }
    return out;
}

int truncation_floor(double p, const PhysicalParameters& params, double tau_max) {
    // Harmonics stay coupled until the viscous diagonal n^2 / kappa outgrows
    // the coupling 2 tau p^3.
    return static_cast<int>(std::ceil(std::sqrt(2.0 * params.kappa() * tau_max * p * p * p)));
}

TruncationResult converge_truncation(double p, FloquetClass c, const PhysicalParameters& params,
                                     const SweepConfig& config) {
    if (config.n_initial < 4) throw ContractError("initial truncation must be >= 4");
    TruncationResult result;
    int n = config.n_initial;
    if (config.use_truncation_floor) {
        const int floor = truncation_floor(p, params, config.tau_max);
        while (n < floor && 4 * n <= config.n_max) n *= 2;
    }
    Solved coarse = solve(p, c, params, n);
    while (2 * n <= config.n_max) {
        const int fine_n = 2 * n;
        Solved fine = solve(p, c, params, fine_n);
        const double drift = std::max(one_sided_drift(coarse.spectrum, fine.spectrum, config),
                                      one_sided_drift(fine.spectrum, coarse.spectrum, config));
        result.drift_history.push_back(drift);
        if (drift < config.convergence_tol) {
            // spectrum is unsorted; collect, order, then certify each amplitude
            for (const eig::Complex tau : fine.spectrum) {
                if (reportable(tau, config)) result.taus.push_back(tau.real());
            }
            std::sort(result.taus.begin(), result.taus.end());
            for (double tau : result.taus) result.residuals.push_back(certify(fine, tau, config.eigen_tol));
            result.truncation = fine_n;
            return result;
        }
        coarse = std::move(fine);
        n = fine_n;
    }
    std::ostringstream os;
    os << "truncation did not converge for " << describe(p, c) << " (tol " << config.convergence_tol
       << ", N up to " << n << "); drift history:";
    for (double d : result.drift_history) os << ' ' << d;
    throw ConvergenceError(os.str());
}

std::vector<StabilityPoint> sweep(const SweepConfig& config, const PhysicalParameters& params) {
    config.validate();
    const std::vector<double> grid = config.grid();
    struct Task {
        double p;
        FloquetClass c;
    };
    std::vector<Task> tasks;
    for (FloquetClass c : {FloquetClass::Harmonic, FloquetClass::Subharmonic}) {
        for (double p : grid) tasks.push_back({p, c});
    }
    std::vector<TruncationResult> results(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());

    unsigned workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, tasks.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                results[i] = converge_truncation(tasks[i].p, tasks[i].c, params, config);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(describe(tasks[i].p, tasks[i].c) + ": " + e.what());
        } catch (const NumericalError& e) {
            throw NumericalError(describe(tasks[i].p, tasks[i].c) + ": " + e.what());
        }
    }

    std::vector<StabilityPoint> points;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const TruncationResult& r = results[i];
        for (std::size_t k = 0; k < r.taus.size(); ++k) {
            points.push_back({tasks[i].p, r.taus[k], tasks[i].c, r.residuals[k], r.truncation});
        }
    }
    std::stable_sort(points.begin(), points.end(), [](const StabilityPoint& a, const StabilityPoint& b) {
        if (a.floquet_class != b.floquet_class) return a.floquet_class < b.floquet_class;
        if (a.p != b.p) return a.p < b.p;
        return a.tau < b.tau;
    });
    return points;
}

std::vector<PhysicalMode> physical_modes(std::span<const StabilityPoint> points, double grid_step) {
    std::vector<PhysicalMode> modes;
    for (FloquetClass c : {FloquetClass::Harmonic, FloquetClass::Subharmonic}) {
        // column p -> lowest tau of this class
        std::map<double, double> lowest;
        for (const StabilityPoint& pt : points) {
            if (pt.floquet_class != c) continue;
            auto [it, inserted] = lowest.try_emplace(pt.p, pt.tau);
            if (!inserted) it->second = std::min(it->second, pt.tau);
        }
        if (lowest.empty()) continue;
        const int first = static_cast<int>(std::ceil(lowest.begin()->first - kColumnTol));
        const int last = static_cast<int>(std::floor(lowest.rbegin()->first + kColumnTol));
        for (int target = std::max(first, 1); target <= last; ++target) {
            const double pt = target;
            double onset = std::numeric_limits<double>::infinity();
            auto right = lowest.lower_bound(pt - kColumnTol);
            if (right != lowest.end() && std::abs(right->first - pt) <= kColumnTol) {
                onset = right->second;
            } else if (right != lowest.end() && right != lowest.begin()) {
                auto left = std::prev(right);
                const double gap = right->first - left->first;
                if (grid_step > 0.0 && gap <= grid_step * (1.0 + 1e-6) + kColumnTol) {
                    const double w = (pt - left->first) / gap;
                    onset = (1.0 - w) * left->second + w * right->second;
                }
            }
            if (onset >= 0.0 && onset <= kPhysicalTauLimit) modes.push_back({target, onset, c});
        }
    }
    std::sort(modes.begin(), modes.end(), [](const PhysicalMode& a, const PhysicalMode& b) {
        if (a.p != b.p) return a.p < b.p;
        return a.floquet_class < b.floquet_class;
    });
    return modes;
}

std::vector<PhysicalMode> physical_modes(std::span<const StabilityPoint> points) {
    std::vector<double> columns;
    for (const StabilityPoint& pt : points) columns.push_back(pt.p);
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end(),
                              [](double a, double b) { return std::abs(a - b) <= kColumnTol; }),
                  columns.end());
    double step = 0.0;
    for (std::size_t i = 1; i < columns.size(); ++i) {
        const double gap = columns[i] - columns[i - 1];
        step = step == 0.0 ? gap : std::min(step, gap);
    }
    return physical_modes(points, step);
}

}  // namespace ibres::sweep
