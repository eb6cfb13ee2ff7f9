#pragma once

// Run configuration, file formats and the four subcommands behind the
// `ibres` executable. Everything here writes to caller-supplied streams or to
// the configured output directory, so the commands are testable in-process.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibres/ibsim.hpp"
#include "ibres/stability_sweep.hpp"

namespace ibres::cli {

/// kappa, nu and phi as given; resolve() applies the consistency rules.
struct CaseParameters {
    std::optional<double> kappa;
    std::optional<double> nu;
    std::optional<double> phi;

    /// nu plus kappa or phi. When both kappa and phi are present they must
    /// satisfy phi = nu^2 / kappa to 1e-12 relative. ConfigError names the key.
    floquet::PhysicalParameters resolve() const;
};

/// A named case study with the decimal strings it was defined from.
struct Preset {
    std::string_view name;  // "case1" .. "case4"
    std::string_view kappa;
    std::string_view nu;
    std::string_view phi;

    CaseParameters parameters() const;
};

std::span<const Preset> presets() noexcept;
/// Accepts "1".."4" or "case1".."case4"; ConfigError("case") otherwise.
const Preset& find_preset(std::string_view name);

struct RunConfig {
    CaseParameters params;
    sweep::SweepConfig sweep;
    sim::SimulationConfig sim;          // kappa / nu are filled from params
    std::optional<double> sim_tau;      // unset: derived from the tongue at seed_mode
    std::filesystem::path out_dir = ".";
    bool verbose = false;
};

/// Applies `key = value` lines (with `#` comments) on top of `config`.
/// Unknown keys and malformed values raise ConfigError naming the key.
void apply_config(std::istream& in, RunConfig& config);
void apply_config_file(const std::filesystem::path& path, RunConfig& config);
/// Single assignment, shared with the command-line layer.
void apply_setting(std::string_view key, std::string_view value, RunConfig& config);

// ---------------------------------------------------------------- formats

/// Header `class,p,tau,residual,N`; numbers with 17 significant digits.
void write_points_csv(std::ostream& out, std::span<const sweep::StabilityPoint> points);
/// Inverse of write_points_csv; IoError on malformed input.
std::vector<sweep::StabilityPoint> read_points_csv(std::istream& in);

/// Header `t,a_1,...,a_<modes>`.
void write_modes_csv(std::ostream& out, const sim::ModeAmplitudeSeries& series, int modes = 8);
/// Header `x,y`, one fiber point per row.
void write_shape_csv(std::ostream& out, const sim::Points& points);

struct PlotRange {
    double p_min = 0.0;
    double p_max = 20.0;
    double tau_max = 1.0;
};

/// Tongue plot: harmonic points as blue circles, subharmonic points as red
/// squares, one SVG element (class "pt") per point, a dashed guide at
/// tau = 1/2 and vertical gridlines at integer p.
void write_tongues_svg(std::ostream& out, std::span<const sweep::StabilityPoint> points, const PlotRange& range);

/// One line per mode, `class p tau_onset`, or the single line `none`.
void write_mode_report(std::ostream& out, std::span<const sweep::PhysicalMode> modes);

// ---------------------------------------------------------------- commands

/// Sweep, write points.csv and tongues.svg into out_dir, print the mode report.
std::vector<sweep::StabilityPoint> cmd_contours(const RunConfig& config, std::ostream& out, std::ostream& log);
/// Sweep and print the mode report only.
std::vector<sweep::PhysicalMode> cmd_modes(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Forcing amplitude used when none is configured: halfway between the
/// lowest onset at integer p and 1/2. ConfigError("tau") if p lies in no
/// tongue below 1/2.
double default_simulation_tau(const RunConfig& config, int p);

/// Run the simulation, write modes.csv (and shape_<k>.csv snapshots when
/// enabled), print the amplitude used and a verdict line per tracked mode.
sim::SimulationResult cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Prints J_p, H_p and the four ratio terms; a failing quantity prints an
/// error line instead. Returns false when any quantity failed.
bool cmd_bessel(int p, std::complex<double> z, std::ostream& out);

/// Writes the truncated pencil of both classes at wavenumber p to
/// out_dir/pencil_<class>.txt.
void dump_pencils(const RunConfig& config, double p, std::ostream& log);

}  // namespace ibres::cli
