#include "ibres/ibsim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "ibres/errors.hpp"

namespace ibres::sim {

namespace {

using Complex = std::complex<double>;

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_power_of_two(long n) {
    return n > 0 && (n & (n - 1)) == 0;
}

long wrap(long j, long n) {
    const long r = j % n;
    return r < 0 ? r + n : r;
}

void require_finite(const Points& positions) {
    if (!positions.allFinite()) throw StateError("fiber positions are not finite");
}

// Four stencil weights and the first node index along one axis.
struct Stencil {
    long first;
    double w[4];
};

Stencil stencil(double coordinate, double h) {
    const double g = coordinate / h;
    Stencil s{static_cast<long>(std::floor(g)) - 1, {}};
    for (int a = 0; a < 4; ++a) s.w[a] = peskin_delta(g - static_cast<double>(s.first + a));
    return s;
}

template <typename T>
struct FftwDeleter {
    void operator()(T* p) const noexcept { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (p == nullptr) throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

}  // namespace

double ForcingSchedule::stiffness(double t) const noexcept {
    return kappa * (1.0 + 2.0 * tau * std::sin(t));
}

double ForcingSchedule::peak_stiffness() const noexcept {
    return kappa * (1.0 + 2.0 * std::abs(tau));
}

FiberState perturbed_circle(int points, double radius, Eigen::Vector2d center, int mode, double amplitude) {
    if (points < 8 || !is_power_of_two(points)) {
        throw ContractError("fiber point count must be a power of two >= 8, got " + std::to_string(points));
    }
    if (!(radius > 0.0)) throw ContractError("fiber radius must be positive");
    FiberState fiber;
    fiber.radius = radius;
    fiber.center = center;
    fiber.points.resize(2, points);
    const double ds = kTwoPi / points;
    for (int k = 0; k < points; ++k) {
        const double s = ds * k;
        const double r = radius * (1.0 + amplitude * std::cos(mode * s));
        fiber.points.col(k) = center + r * Eigen::Vector2d(std::cos(s), std::sin(s));
    }
    return fiber;
}

Points fiber_force(const Points& points, double ds, double t, const ForcingSchedule& schedule) {
    const Eigen::Index m = points.cols();
    if (m < 3) throw ContractError("fiber force needs at least 3 points");
    if (!(ds > 0.0)) throw ContractError("fiber spacing must be positive");
    const double scale = schedule.stiffness(t) / (ds * ds);
    Points f(2, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index prev = k == 0 ? m - 1 : k - 1;
        const Eigen::Index next = k == m - 1 ? 0 : k + 1;
        f.col(k) = scale * (points.col(next) - 2.0 * points.col(k) + points.col(prev));
    }
    return f;
}

double peskin_delta(double r) noexcept {
    const double a = std::abs(r);
    if (a < 1.0) return (3.0 - 2.0 * a + std::sqrt(1.0 + 4.0 * a - 4.0 * a * a)) / 8.0;
    if (a < 2.0) return (5.0 - 2.0 * a - std::sqrt(std::max(0.0, -7.0 + 12.0 * a - 4.0 * a * a))) / 8.0;
    return 0.0;
}

// ---------------------------------------------------------------- coupling

DeltaCoupling::DeltaCoupling(int cells, double length) : cells_(cells), length_(length), h_(length / cells) {
    if (cells < 4) throw ContractError("grid needs at least 4 cells per side");
    if (!(length > 0.0)) throw ContractError("domain length must be positive");
}

GridField DeltaCoupling::spread(const Points& positions, const Points& forces, double ds) const {
    if (positions.cols() != forces.cols()) throw ContractError("positions and forces differ in length");
    require_finite(positions);
    GridField f(cells_);
    const double weight = ds / (h_ * h_);
    for (Eigen::Index k = 0; k < positions.cols(); ++k) {
        const Stencil sx = stencil(positions(0, k), h_);
        const Stencil sy = stencil(positions(1, k), h_);
        for (int b = 0; b < 4; ++b) {
            const std::size_t row = static_cast<std::size_t>(wrap(sy.first + b, cells_)) * cells_;
            for (int a = 0; a < 4; ++a) {
                const std::size_t idx = row + static_cast<std::size_t>(wrap(sx.first + a, cells_));
                const double w = weight * sx.w[a] * sy.w[b];
                f.x[idx] += w * forces(0, k);
                f.y[idx] += w * forces(1, k);
            }
        }
    }
    return f;
}

Points DeltaCoupling::interpolate(const Points& positions, const GridField& velocity) const {
    if (velocity.cells != cells_) throw ContractError("velocity field has the wrong grid size");
    require_finite(positions);
    Points u = Points::Zero(2, positions.cols());
    for (Eigen::Index k = 0; k < positions.cols(); ++k) {
        const Stencil sx = stencil(positions(0, k), h_);
        const Stencil sy = stencil(positions(1, k), h_);
        for (int b = 0; b < 4; ++b) {
            const std::size_t row = static_cast<std::size_t>(wrap(sy.first + b, cells_)) * cells_;
            for (int a = 0; a < 4; ++a) {
                const std::size_t idx = row + static_cast<std::size_t>(wrap(sx.first + a, cells_));
                const double w = sx.w[a] * sy.w[b];
                u(0, k) += w * velocity.x[idx];
                u(1, k) += w * velocity.y[idx];
            }
        }
    }
    return u;
}

// ---------------------------------------------------------------- fluid

struct FluidSolver::Impl {
    int g;
    int gh;  // g / 2 + 1 complex columns
    double nu;
    std::vector<double> kx;  // per complex column
    std::vector<double> ky;  // per row
    std::vector<char> keep;  // 2/3-rule mask on the complex grid
    GridField u;
    std::vector<Complex> uh;
    std::vector<Complex> vh;
    FftwBuffer<double> rbuf;
    FftwBuffer<fftw_complex> cbuf;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    std::size_t spectral_size() const { return static_cast<std::size_t>(g) * gh; }

    void to_spectral(const std::vector<double>& in, std::vector<Complex>& out) {
        std::copy(in.begin(), in.end(), rbuf.get());
        fftw_execute(forward);
        const auto* c = reinterpret_cast<const Complex*>(cbuf.get());
        out.assign(c, c + spectral_size());
    }

    // c2r overwrites its input, so always go through the scratch buffer.
    void to_physical(const std::vector<Complex>& in, std::vector<double>& out) {
        std::copy(in.begin(), in.end(), reinterpret_cast<Complex*>(cbuf.get()));
        fftw_execute(backward);
        const double norm = 1.0 / (static_cast<double>(g) * g);
        out.resize(static_cast<std::size_t>(g) * g);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = rbuf[i] * norm;
    }

    template <typename F>
    void for_each_mode(F&& f) {
        for (int i = 0; i < g; ++i) {
            for (int j = 0; j < gh; ++j) f(static_cast<std::size_t>(i) * gh + j, i, j);
        }
    }

    bool nyquist(int i, int j) const { return 2 * i == g || 2 * j == g; }

    void project(std::vector<Complex>& ah, std::vector<Complex>& bh) {
        for_each_mode([&](std::size_t idx, int i, int j) {
            if (nyquist(i, j)) {
                ah[idx] = bh[idx] = 0.0;
                return;
            }
            const double k2 = kx[j] * kx[j] + ky[i] * ky[i];
            if (k2 == 0.0) return;
            const Complex d = (kx[j] * ah[idx] + ky[i] * bh[idx]) / k2;
            ah[idx] -= kx[j] * d;
            bh[idx] -= ky[i] * d;
        });
    }

    std::vector<double> derivative(const std::vector<Complex>& ah, bool along_x) {
        std::vector<Complex> d(ah.size());
        for_each_mode([&](std::size_t idx, int i, int j) {
            d[idx] = Complex(0.0, along_x ? kx[j] : ky[i]) * ah[idx];
        });
        std::vector<double> out;
        to_physical(d, out);
        return out;
    }
};

FluidSolver::FluidSolver(int cells, double length, double viscosity) : impl_(std::make_unique<Impl>()) {
    if (cells < 4 || cells % 2 != 0) throw ContractError("grid size must be even and >= 4");
    if (!(length > 0.0)) throw ContractError("domain length must be positive");
    if (!(viscosity >= 0.0)) throw ContractError("viscosity must be non-negative");
    Impl& m = *impl_;
    m.g = cells;
    m.gh = cells / 2 + 1;
    m.nu = viscosity;
    const double k0 = kTwoPi / length;
    for (int j = 0; j < m.gh; ++j) m.kx.push_back(k0 * j);
    for (int i = 0; i < cells; ++i) m.ky.push_back(k0 * (2 * i <= cells ? i : i - cells));
    m.keep.resize(m.spectral_size());
    m.for_each_mode([&](std::size_t idx, int i, int j) {
        const int si = 2 * i <= cells ? i : cells - i;
        m.keep[idx] = 3 * j < cells && 3 * si < cells;
    });
    m.u = GridField(cells);
    m.uh.assign(m.spectral_size(), 0.0);
    m.vh.assign(m.spectral_size(), 0.0);
    m.rbuf = fftw_buffer<double>(static_cast<std::size_t>(cells) * cells);
    m.cbuf = fftw_buffer<fftw_complex>(m.spectral_size());
    const std::lock_guard lock(planner_mutex());
    m.forward = fftw_plan_dft_r2c_2d(cells, cells, m.rbuf.get(), m.cbuf.get(), FFTW_ESTIMATE);
    m.backward = fftw_plan_dft_c2r_2d(cells, cells, m.cbuf.get(), m.rbuf.get(), FFTW_ESTIMATE);
    if (m.forward == nullptr || m.backward == nullptr) throw NumericalError("FFTW planning failed");
}

FluidSolver::~FluidSolver() {
    if (!impl_) return;
    const std::lock_guard lock(planner_mutex());
    if (impl_->forward) fftw_destroy_plan(impl_->forward);
    if (impl_->backward) fftw_destroy_plan(impl_->backward);
}

FluidSolver::FluidSolver(FluidSolver&&) noexcept = default;
FluidSolver& FluidSolver::operator=(FluidSolver&&) noexcept = default;

void FluidSolver::set_velocity(const GridField& velocity) {
    Impl& m = *impl_;
    if (velocity.cells != m.g) throw ContractError("velocity field has the wrong grid size");
    m.to_spectral(velocity.x, m.uh);
    m.to_spectral(velocity.y, m.vh);
    m.project(m.uh, m.vh);
    m.to_physical(m.uh, m.u.x);
    m.to_physical(m.vh, m.u.y);
}

const GridField& FluidSolver::velocity() const noexcept {
    return impl_->u;
}

void FluidSolver::step(const GridField& force, double dt) {
    Impl& m = *impl_;
    if (force.cells != m.g) throw ContractError("force field has the wrong grid size");
    const std::vector<double> ux = m.derivative(m.uh, true);
    const std::vector<double> uy = m.derivative(m.uh, false);
    const std::vector<double> vx = m.derivative(m.vh, true);
    const std::vector<double> vy = m.derivative(m.vh, false);
    std::vector<double> nx(ux.size());
    std::vector<double> ny(ux.size());
    for (std::size_t i = 0; i < nx.size(); ++i) {
        nx[i] = m.u.x[i] * ux[i] + m.u.y[i] * uy[i];
        ny[i] = m.u.x[i] * vx[i] + m.u.y[i] * vy[i];
    }
    std::vector<Complex> nxh;
    std::vector<Complex> nyh;
    std::vector<Complex> fxh;
    std::vector<Complex> fyh;
    m.to_spectral(nx, nxh);
    m.to_spectral(ny, nyh);
    m.to_spectral(force.x, fxh);
    m.to_spectral(force.y, fyh);

    m.for_each_mode([&](std::size_t idx, int, int) {
        const Complex adv_x = m.keep[idx] ? nxh[idx] : 0.0;
        const Complex adv_y = m.keep[idx] ? nyh[idx] : 0.0;
        m.uh[idx] += dt * (fxh[idx] - adv_x);
        m.vh[idx] += dt * (fyh[idx] - adv_y);
    });
    m.project(m.uh, m.vh);
    m.for_each_mode([&](std::size_t idx, int i, int j) {
        const double damp = 1.0 / (1.0 + m.nu * dt * (m.kx[j] * m.kx[j] + m.ky[i] * m.ky[i]));
        m.uh[idx] *= damp;
        m.vh[idx] *= damp;
    });
    m.to_physical(m.uh, m.u.x);
    m.to_physical(m.vh, m.u.y);
}

double FluidSolver::max_divergence() const {
    Impl& m = *impl_;
    std::vector<Complex> d(m.spectral_size());
    m.for_each_mode([&](std::size_t idx, int i, int j) {
        d[idx] = Complex(0.0, m.kx[j]) * m.uh[idx] + Complex(0.0, m.ky[i]) * m.vh[idx];
    });
    std::vector<double> div;
    m.to_physical(d, div);
    double worst = 0.0;
    for (double v : div) worst = std::max(worst, std::abs(v));
    return worst;
}

double FluidSolver::max_speed() const noexcept {
    const GridField& u = impl_->u;
    double worst = 0.0;
    for (std::size_t i = 0; i < u.x.size(); ++i) worst = std::max(worst, std::hypot(u.x[i], u.y[i]));
    return worst;
}

// ---------------------------------------------------------------- driver

double max_stable_dt(const GridConfig& grid, double radius, const ForcingSchedule& schedule) {
    const double h = grid.length_in_radii * radius / grid.cells;
    const double k_max = std::numbers::pi / h;
    const double tension = schedule.peak_stiffness() * radius;
    if (!(tension > 0.0)) return std::numeric_limits<double>::infinity();
    return 2.0 / std::sqrt(tension * k_max * k_max * k_max / 2.0);
}

void SimulationConfig::validate() const {
    if (!(kappa > 0.0)) throw ConfigError("kappa", "must be positive");
    if (!(nu > 0.0)) throw ConfigError("nu", "must be positive");
    if (!std::isfinite(tau)) throw ConfigError("tau", "must be finite");
    if (!(radius > 0.0)) throw ConfigError("radius", "must be positive");
    if (periods < 1) throw ConfigError("periods", "must be >= 1");
    if (grid.fiber_points < 8 || !is_power_of_two(grid.fiber_points)) {
        throw ConfigError("fiber_points", "must be a power of two >= 8");
    }
    if (seed_mode < 1 || seed_mode >= grid.fiber_points / 2) {
        throw ConfigError("seed_mode", "must lie in [1, fiber_points / 2)");
    }
    if (!(seed_amplitude >= 0.0 && seed_amplitude < 1.0)) throw ConfigError("seed_amplitude", "must lie in [0, 1)");
    if (grid.cells < 8 || grid.cells % 2 != 0) throw ConfigError("cells", "must be even and >= 8");
    const double h = grid.length_in_radii / grid.cells;  // in radii
    if (!(grid.length_in_radii > 2.0 * (1.0 + seed_amplitude) + 4.0 * h)) {
        throw ConfigError("length_in_radii", "domain too small for the fiber and its delta support");
    }
    if (grid.steps_per_period < 1) throw ConfigError("steps_per_period", "must be >= 1");
    if (grid.records_per_period < 32) throw ConfigError("records_per_period", "must be >= 32");
    if (grid.steps_per_period % grid.records_per_period != 0) {
        throw ConfigError("records_per_period", "must divide steps_per_period");
    }
    if (!(max_cfl > 0.0)) throw ConfigError("max_cfl", "must be positive");
    const double dt = kTwoPi / grid.steps_per_period;
    const double bound = max_stable_dt(grid, radius, ForcingSchedule{kappa, tau});
    if (dt > bound) {
        throw StabilityError("steps_per_period", "dt = " + std::to_string(dt) + " exceeds the stiffness bound " +
                                                     std::to_string(bound));
    }
}

std::vector<double> mode_amplitudes(const Points& points) {
    const Eigen::Index m = points.cols();
    if (m < 8 || !is_power_of_two(m)) throw ContractError("mode analysis needs a power-of-two point count >= 8");
    require_finite(points);
    const Eigen::Vector2d centroid = points.rowwise().mean();
    Eigen::VectorXd r = (points.colwise() - centroid).colwise().norm().transpose();
    r.array() -= r.mean();
    // exact phase table: e^{-i p s_k} = table[(p k) mod M]
    std::vector<Complex> table(static_cast<std::size_t>(m));
    for (Eigen::Index k = 0; k < m; ++k) table[k] = std::polar(1.0, -kTwoPi * k / m);
    std::vector<double> a(static_cast<std::size_t>(m / 2));
    for (Eigen::Index p = 1; p <= m / 2; ++p) {
        Complex c = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) c += r(k) * table[(p * k) % m];
        a[p - 1] = (p == m / 2 ? 1.0 : 2.0) * std::abs(c) / m;
    }
    return a;
}

std::vector<double> ModeAmplitudeSeries::mode(int p) const {
    std::vector<double> out;
    out.reserve(amplitudes.size());
    for (const auto& row : amplitudes) {
        if (p < 1 || static_cast<std::size_t>(p) > row.size()) throw ContractError("mode index out of range");
        out.push_back(row[p - 1]);
    }
    return out;
}

SimulationResult run_simulation(const SimulationConfig& config) {
    config.validate();
    const GridConfig& gc = config.grid;
    const double length = gc.length_in_radii * config.radius;
    const double dt = kTwoPi / gc.steps_per_period;
    const int stride = gc.steps_per_period / gc.records_per_period;
    const ForcingSchedule schedule{config.kappa, config.tau};

    FiberState fiber = perturbed_circle(gc.fiber_points, config.radius, Eigen::Vector2d(length / 2, length / 2),
                                        config.seed_mode, config.seed_amplitude);
    const double ds = fiber.ds();
    const DeltaCoupling coupling(gc.cells, length);
    FluidSolver fluid(gc.cells, length, config.nu);
    const double speed_limit = config.max_cfl * coupling.spacing() / dt;

    SimulationResult result;
    auto record = [&](double t) {
        result.series.times.push_back(t);
        result.series.amplitudes.push_back(mode_amplitudes(fiber.points));
    };
    record(0.0);
    if (config.snapshots) result.snapshots.push_back(fiber.points);

    const long total = static_cast<long>(gc.steps_per_period) * config.periods;
    for (long n = 0; n < total; ++n) {
        const double t = dt * static_cast<double>(n);
        const double t_next = dt * static_cast<double>(n + 1);
        const Points force = fiber_force(fiber.points, ds, t, schedule);
        fluid.step(coupling.spread(fiber.points, force, ds), dt);
        const double speed = fluid.max_speed();
        if (!(speed <= speed_limit)) {
            throw DivergenceError("velocity " + std::to_string(speed) + " exceeds the CFL limit " +
                                      std::to_string(speed_limit) + " at t = " + std::to_string(t_next),
                                  t_next);
        }
        fiber.points += dt * coupling.interpolate(fiber.points, fluid.velocity());
        if ((n + 1) % stride == 0) {
            record(t_next);
            result.max_divergence = std::max(result.max_divergence, fluid.max_divergence());
        }
        if (config.snapshots && (n + 1) % gc.steps_per_period == 0) result.snapshots.push_back(fiber.points);
    }
    return result;
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Growing: return "GROWING";
        case Verdict::Decaying: return "DECAYING";
        case Verdict::Flat: return "FLAT";
    }
    return "FLAT";
}

std::vector<double> period_maxima(const ModeAmplitudeSeries& series, int p, double period) {
    if (!(period > 0.0)) throw ContractError("period must be positive");
    const std::vector<double> a = series.mode(p);
    std::vector<double> maxima;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double t = series.times[j];
        if (t <= 0.0) continue;
        // sample in (k T, (k+1) T] belongs to period k
        const auto k = static_cast<std::size_t>(std::ceil(t / period - 1e-9)) - 1;
        if (k >= maxima.size()) maxima.resize(k + 1, 0.0);
        maxima[k] = std::max(maxima[k], a[j]);
    }
    // drop a trailing partial period
    if (!series.times.empty() && !maxima.empty()) {
        const double covered = series.times.back() / period;
        if (covered + 1e-9 < static_cast<double>(maxima.size())) maxima.pop_back();
    }
    return maxima;
}

Verdict growth_verdict(const ModeAmplitudeSeries& series, int p, double period, int window) {
    if (window < 2) throw ContractError("envelope window must cover at least 2 periods");
    const std::vector<double> maxima = period_maxima(series, p, period);
    if (maxima.size() < static_cast<std::size_t>(window)) {
        throw ContractError("envelope test needs " + std::to_string(window) + " complete periods, got " +
                            std::to_string(maxima.size()));
    }
    const auto first = maxima.end() - window;
    const bool up = std::adjacent_find(first, maxima.end(), std::greater_equal<>()) == maxima.end();
    const bool down = std::adjacent_find(first, maxima.end(), std::less_equal<>()) == maxima.end();
    return up ? Verdict::Growing : down ? Verdict::Decaying : Verdict::Flat;
}

}  // namespace ibres::sim
