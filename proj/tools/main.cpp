// ibres: stability tongues and immersed-boundary runs for a parametrically
// forced elastic fiber.
//
// Settings are layered: --case preset, then --config file, then flags.
// Exit codes: 0 ok, 2 configuration, 3 numerical failure, 4 I/O.

#include <CLI11.hpp>

#include <complex>
#include <iostream>
#include <optional>
#include <string>

#include "ibres/cli_io.hpp"
#include "ibres/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Flags {
    std::optional<std::string> preset;
    std::optional<std::string> config_file;
    std::optional<std::string> out;
    std::optional<double> p_min;
    std::optional<double> p_max;
    std::optional<double> p_step;
    std::optional<double> tau_max;
    std::optional<int> n_initial;
    std::optional<unsigned> threads;
    std::optional<double> dump_pencil;
    std::optional<int> seed_mode;
    std::optional<int> periods;
    std::optional<double> tau;
    bool snapshots = false;
    bool verbose = false;
};

void add_common(CLI::App& cmd, Flags& f) {
    cmd.add_option("--case", f.preset, "Built-in case study 1-4 (or case1-case4)");
    cmd.add_option("--config", f.config_file, "key = value configuration file");
    cmd.add_option("--out", f.out, "Output directory");
    cmd.add_option("--N", f.n_initial, "Initial Floquet truncation");
    cmd.add_flag("--verbose", f.verbose, "Diagnostics on stderr");
}

void add_sweep(CLI::App& cmd, Flags& f) {
    cmd.add_option("--pmin", f.p_min, "Smallest wavenumber");
    cmd.add_option("--pmax", f.p_max, "Largest wavenumber");
    cmd.add_option("--pstep", f.p_step, "Wavenumber step");
    cmd.add_option("--taumax", f.tau_max, "Largest forcing amplitude reported");
    cmd.add_option("--threads", f.threads, "Sweep worker threads (0 = all cores)");
    cmd.add_option("--dump-pencil", f.dump_pencil, "Also write the truncated pencils at this p");
}

ibres::cli::RunConfig build_config(const Flags& f) {
    ibres::cli::RunConfig c;
    if (f.preset) ibres::cli::apply_setting("case", *f.preset, c);
    if (f.config_file) ibres::cli::apply_config_file(*f.config_file, c);
    if (f.out) ibres::cli::apply_setting("out", *f.out, c);
    if (f.p_min) c.sweep.p_min = *f.p_min;
    if (f.p_max) c.sweep.p_max = *f.p_max;
    if (f.p_step) c.sweep.p_step = *f.p_step;
    if (f.tau_max) c.sweep.tau_max = *f.tau_max;
    if (f.n_initial) c.sweep.n_initial = *f.n_initial;
    if (f.threads) c.sweep.threads = *f.threads;
    if (f.seed_mode) c.sim.seed_mode = *f.seed_mode;
    if (f.periods) c.sim.periods = *f.periods;
    if (f.tau) c.sim_tau = *f.tau;
    if (f.snapshots) c.sim.snapshots = true;
    if (f.verbose) c.verbose = true;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parametric resonance of an immersed elastic fiber"};
    app.require_subcommand(1);
    Flags flags;

    CLI::App* contours = app.add_subcommand("contours", "Sweep p, write points.csv and tongues.svg");
    add_common(*contours, flags);
    add_sweep(*contours, flags);

    CLI::App* modes = app.add_subcommand("modes", "Sweep p and list integer-p resonances");
    add_common(*modes, flags);
    add_sweep(*modes, flags);

    CLI::App* simulate = app.add_subcommand("simulate", "Immersed-boundary run, write modes.csv");
    add_common(*simulate, flags);
    simulate->add_option("--seed-mode", flags.seed_mode, "Wavenumber of the initial perturbation");
    simulate->add_option("--periods", flags.periods, "Forcing periods to simulate");
    simulate->add_option("--tau", flags.tau, "Forcing amplitude (default: inside the tongue at the seed mode)");
    simulate->add_flag("--snapshots", flags.snapshots, "Write the fiber shape once per period");

    CLI::App* bessel = app.add_subcommand("bessel", "Print J_p(z), H_p(z) and the ratio terms");
    int order = 0;
    double re = 0.0;
    double im = 0.0;
    bessel->add_option("p", order, "Integer order")->required();
    bessel->add_option("re", re, "Real part of z")->required();
    bessel->add_option("im", im, "Imaginary part of z");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*bessel) return ibres::cli::cmd_bessel(order, {re, im}, std::cout) ? 0 : kExitNumerical;
        const ibres::cli::RunConfig config = build_config(flags);
        if ((*contours || *modes) && flags.dump_pencil) ibres::cli::dump_pencils(config, *flags.dump_pencil, std::cerr);
        if (*contours) ibres::cli::cmd_contours(config, std::cout, std::cerr);
        if (*modes) ibres::cli::cmd_modes(config, std::cout, std::cerr);
        if (*simulate) ibres::cli::cmd_simulate(config, std::cout, std::cerr);
        return 0;
    } catch (const ibres::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ibres::ContractError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ibres::DivergenceError& e) {
        std::cerr << "numerical failure: simulation diverged at t = " << e.time() << ": " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ibres::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ibres::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
