#pragma once

// Wavenumber sweeps over the Floquet pencil, truncation control and
// extraction of physically realisable (integer p) resonances.

#include <span>
#include <vector>

#include "ibres/floquet_assembly.hpp"

namespace ibres::sweep {

using floquet::FloquetClass;
using floquet::PhysicalParameters;

struct StabilityPoint {
    double p = 0.0;
    double tau = 0.0;
    FloquetClass floquet_class = FloquetClass::Harmonic;
    double residual = 0.0;
    int truncation = 0;

    friend bool operator==(const StabilityPoint&, const StabilityPoint&) = default;
};

struct SweepConfig {
    double p_min = 0.25;
    double p_max = 20.0;
    double p_step = 0.05;
    double tau_max = 1.0;
    int n_initial = 16;
    int n_max = 256;
    double convergence_tol = 1e-6;
    double rel_imag_tol = 1e-8;
    double eigen_tol = 1e-10;
    /// Start the doubling at the first N >= sqrt(2 kappa tau_max p^3); below
    /// that the coupling dominates and two under-resolved levels can agree.
    bool use_truncation_floor = true;
    /// Worker threads for the sweep; 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;

    /// Throws ContractError on an invalid configuration. An empty range
    /// (p_max < p_min) is valid and yields no points.
    void validate() const;
    /// p_min + k p_step, k = 0.., rounded to 1e-9 so integer columns are exact.
    std::vector<double> grid() const;
};

struct TruncationResult {
    std::vector<double> taus;       // real amplitudes in [0, tau_max], ascending
    std::vector<double> residuals;  // residual of each tau at the final truncation
    int truncation = 0;             // finer truncation of the converged pair
    std::vector<double> drift_history;
};

/// Smallest truncation that resolves the coupling at amplitude tau_max.
int truncation_floor(double p, const PhysicalParameters& params, double tau_max);

/// Doubles N from config.n_initial (raised by the truncation floor when
/// enabled) until every eigenvalue matched between N
/// and 2N (nearest neighbour, both directions) moves by less than
/// config.convergence_tol. Throws ConvergenceError with the drift history when
/// config.n_max is exceeded.
TruncationResult converge_truncation(double p, FloquetClass c, const PhysicalParameters& params,
                                     const SweepConfig& config);

/// All converged real tau <= tau_max on the grid, both classes, ordered by
/// (class, p, tau). Deterministic regardless of thread count.
std::vector<StabilityPoint> sweep(const SweepConfig& config, const PhysicalParameters& params);

struct PhysicalMode {
    int p = 0;
    double tau_onset = 0.0;
    FloquetClass floquet_class = FloquetClass::Harmonic;
};

/// Physical amplitude band upper limit (stiffness stays positive).
inline constexpr double kPhysicalTauLimit = 0.5;

/// Integer wavenumbers inside a tongue at tau <= 1/2, sorted by (p, class).
/// An integer p* counts when it is a grid column with a point of that class,
/// or when the two adjacent columns (at most grid_step apart) both carry
/// points; the onset is the lowest tau there, interpolated linearly in p.
std::vector<PhysicalMode> physical_modes(std::span<const StabilityPoint> points, double grid_step);
/// Same, with the grid step inferred as the smallest spacing between columns.
std::vector<PhysicalMode> physical_modes(std::span<const StabilityPoint> points);

}  // namespace ibres::sweep
