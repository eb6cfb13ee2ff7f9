#pragma once

// Two-dimensional immersed-boundary simulation of a closed elastic fiber with
// time-periodic stiffness, on a periodic square of incompressible fluid
// (density 1).
//
// One step, first-order splitting:
//   F = K(t) X_ss        (second difference on the fiber)
//   f = S F              (4-point Peskin delta)
//   u <- fluid(u, f)     (Fourier pseudo-spectral, implicit viscosity)
//   U = S* u
//   X <- X + dt U        (forward Euler)
//
// Results are bitwise reproducible for a given build: FFTW plans use
// FFTW_ESTIMATE and all transforms are serial.

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace ibres::sim {

using Points = Eigen::Matrix2Xd;  // column k is X(s_k)

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// K(t) = kappa (1 + 2 tau sin t); positive for all t iff |tau| < 1/2.
struct ForcingSchedule {
    double kappa = 0.0;
    double tau = 0.0;

    double stiffness(double t) const noexcept;
    /// max_t K(t).
    double peak_stiffness() const noexcept;
};

struct FiberState {
    Points points;
    double radius = 1.0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();

    Eigen::Index size() const noexcept { return points.cols(); }
    /// Lagrangian spacing 2 pi / M.
    double ds() const noexcept { return kTwoPi / static_cast<double>(points.cols()); }
};

/// r(s) = R (1 + amplitude cos(mode s)) about `center`, M points. M must be a
/// power of two >= 8.
FiberState perturbed_circle(int points, double radius, Eigen::Vector2d center, int mode, double amplitude);

/// F_k = K(t) (X_{k+1} - 2 X_k + X_{k-1}) / ds^2, periodic in k. Needs M >= 3
/// (the power-of-two rule applies to mode analysis, not to this operator).
Points fiber_force(const Points& points, double ds, double t, const ForcingSchedule& schedule);

/// Peskin's 4-point regularized delta (one dimension, argument in mesh widths).
double peskin_delta(double r) noexcept;

/// Periodic G x G scalar field, row-major with x fastest: index i * G + j is
/// the node (x, y) = (j h, i h).
struct GridField {
    int cells = 0;
    std::vector<double> x;
    std::vector<double> y;

    explicit GridField(int g = 0) : cells(g), x(static_cast<std::size_t>(g) * g, 0.0), y(x) {}
};

/// Spreading f(x) = sum_k F_k delta_h(x - X_k) ds and its adjoint
/// interpolation U_k = sum_x u(x) delta_h(x - X_k) h^2, on a periodic grid of
/// side `length`. Both throw StateError for non-finite positions.
class DeltaCoupling {
public:
    DeltaCoupling(int cells, double length);

    GridField spread(const Points& positions, const Points& forces, double ds) const;
    Points interpolate(const Points& positions, const GridField& velocity) const;

    int cells() const noexcept { return cells_; }
    double spacing() const noexcept { return h_; }

private:
    int cells_;
    double length_;
    double h_;
};

/// Fourier pseudo-spectral Navier-Stokes on the periodic square.
/// Advection is explicit with 2/3-rule dealiasing, viscosity is implicit and
/// the projection is exact in Fourier space. Nyquist modes are kept at zero.
class FluidSolver {
public:
    FluidSolver(int cells, double length, double viscosity);
    ~FluidSolver();
    FluidSolver(FluidSolver&&) noexcept;
    FluidSolver& operator=(FluidSolver&&) noexcept;
    FluidSolver(const FluidSolver&) = delete;
    FluidSolver& operator=(const FluidSolver&) = delete;

    /// Replaces the velocity by the projection of `velocity`.
    void set_velocity(const GridField& velocity);
    const GridField& velocity() const noexcept;

    /// u <- (u + dt (f - (u.grad) u)) projected, divided by 1 + nu dt |k|^2.
    void step(const GridField& force, double dt);

    /// max |div u| evaluated spectrally and transformed to the grid.
    double max_divergence() const;
    double max_speed() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct GridConfig {
    double length_in_radii = 4.0;  // L = 4 R
    int cells = 128;               // G
    int fiber_points = 256;        // M
    int steps_per_period = 2048;   // dt = 2 pi / 2048
    int records_per_period = 64;
};

/// Explicit-stiffness bound dt <= 2 / omega_max with omega_max^2 =
/// K_max k_max^3 / 2, k_max = pi / h: the fastest capillary-type wave the
/// grid carries. Viscosity is implicit and adds no constraint.
double max_stable_dt(const GridConfig& grid, double radius, const ForcingSchedule& schedule);

struct SimulationConfig {
    double kappa = 0.0;
    double nu = 0.0;
    double tau = 0.0;
    int seed_mode = 1;
    double seed_amplitude = 0.05;  // relative to R
    double radius = 1.0;
    int periods = 10;
    GridConfig grid;
    bool snapshots = false;  // fiber shape once per forcing period
    /// Blow-up when max |u| dt / h exceeds this (CFL number).
    double max_cfl = 1.0;

    /// Throws ConfigError / StabilityError naming the offending key.
    void validate() const;
};

/// a_p = |Fourier coefficient of r_k - mean(r)| at p = 1..M/2, with r_k the
/// distance from the centroid. For p < M/2 a_p = (2/M)|sum_k ...|, at the
/// Nyquist index (1/M)|sum_k ...|, so a pure r = c + a cos(p s) reads a_p = a
/// and sum_p a_p^2 / 2 <= (1/M) sum_k (r_k - mean)^2.
std::vector<double> mode_amplitudes(const Points& points);

struct ModeAmplitudeSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> amplitudes;  // [record][p - 1], p = 1..M/2

    std::size_t size() const noexcept { return times.size(); }
    /// a_p over time.
    std::vector<double> mode(int p) const;
};

struct SimulationResult {
    ModeAmplitudeSeries series;
    std::vector<Points> snapshots;  // t = 0, 2 pi, 4 pi, ...
    double period = kTwoPi;
    double max_divergence = 0.0;  // largest divergence at the record times
};

/// Throws DivergenceError (with the time) on blow-up.
SimulationResult run_simulation(const SimulationConfig& config);

enum class Verdict { Growing, Decaying, Flat };

std::string_view to_string(Verdict v) noexcept;

/// Maximum of a_p over each complete forcing period.
std::vector<double> period_maxima(const ModeAmplitudeSeries& series, int p, double period);

/// Envelope test over the final `window` periods: strictly increasing maxima
/// are Growing, strictly decreasing Decaying, anything else Flat. Fewer than
/// `window` complete periods is a ContractError.
Verdict growth_verdict(const ModeAmplitudeSeries& series, int p, double period, int window = 5);

}  // namespace ibres::sim
