#include "ibres/cli_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ibres/errors.hpp"
#include "ibres/special_functions.hpp"

namespace ibres::cli {

namespace {

constexpr std::array<Preset, 4> kPresets{{
    {"case1", "0.5", "0.004", "3.2e-5"},
    {"case2", "0.04", "0.00056", "7.84e-6"},
    {"case3", "0.02", "0.0002", "2e-6"},
    {"case4", "0.08", "0.0002", "5e-7"},
}};

constexpr double kPhiRelTol = 1e-12;
constexpr int kVerdictWindow = 5;
constexpr int kTrackedModes = 8;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v)) {
        throw ConfigError(std::string(key), "expected a finite number, got '" + std::string(text) + "'");
    }
    return v;
}

int parse_int(std::string_view key, std::string_view text) {
    text = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(std::string(key), "expected an integer, got '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

std::string format_g(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Key-named checks for everything sweep() would reject.
void validate_sweep(const sweep::SweepConfig& s) {
    if (!(s.p_min > 0.0)) throw ConfigError("p_min", "must be positive");
    if (!(s.p_step > 0.0)) throw ConfigError("p_step", "must be positive");
    if (!(s.tau_max >= 0.0)) throw ConfigError("tau_max", "must be non-negative");
    if (s.n_initial < 4) throw ConfigError("n_initial", "must be >= 4");
    if (s.n_max < s.n_initial) throw ConfigError("n_max", "must be >= n_initial");
    if (!(s.convergence_tol >= 0.0)) throw ConfigError("convergence_tol", "must be non-negative");
    if (!(s.rel_imag_tol > 0.0)) throw ConfigError("rel_imag_tol", "must be positive");
    if (!(s.eigen_tol > 0.0)) throw ConfigError("eigen_tol", "must be positive");
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    return f;
}

void close_output(std::ofstream& f, const std::filesystem::path& path) {
    f.close();
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

std::vector<sweep::StabilityPoint> run_sweep(const RunConfig& config, std::ostream& log) {
    const floquet::PhysicalParameters params = config.params.resolve();
    validate_sweep(config.sweep);
    const auto start = std::chrono::steady_clock::now();
    std::vector<sweep::StabilityPoint> points = sweep::sweep(config.sweep, params);
    if (config.verbose) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        double worst = 0.0;
        int n_final = 0;
        for (const auto& pt : points) {
            worst = std::max(worst, pt.residual);
            n_final = std::max(n_final, pt.truncation);
        }
        log << "sweep: kappa=" << params.kappa() << " nu=" << params.nu() << " phi=" << params.phi() << ", "
            << config.sweep.grid().size() << " columns, " << points.size() << " points, max N " << n_final
            << ", max residual " << worst << ", " << secs << " s\n";
    }
    return points;
}

}  // namespace

floquet::PhysicalParameters CaseParameters::resolve() const {
    if (!nu) throw ConfigError("nu", "is required");
    if (!(*nu > 0.0)) throw ConfigError("nu", "must be positive");
    if (!kappa && !phi) throw ConfigError("kappa", "one of kappa or phi is required");
    if (kappa && !(*kappa > 0.0)) throw ConfigError("kappa", "must be positive");
    if (phi && !(*phi > 0.0)) throw ConfigError("phi", "must be positive");
    if (kappa && phi) {
        const double implied = *nu * *nu / *kappa;
        if (std::abs(implied - *phi) > kPhiRelTol * *phi) {
            throw ConfigError("phi", "inconsistent with nu^2 / kappa = " + format_g(implied, 17));
        }
    }
    return kappa ? floquet::PhysicalParameters::from_kappa_nu(*kappa, *nu)
                 : floquet::PhysicalParameters::from_phi_nu(*phi, *nu);
}

CaseParameters Preset::parameters() const {
    return {parse_double("kappa", kappa), parse_double("nu", nu), parse_double("phi", phi)};
}

std::span<const Preset> presets() noexcept {
    return kPresets;
}

const Preset& find_preset(std::string_view name) {
    name = trim(name);
    for (const Preset& p : kPresets) {
        if (name == p.name || name == p.name.substr(4)) return p;
    }
    throw ConfigError("case", "unknown case '" + std::string(name) + "' (expected 1-4 or case1-case4)");
}

void apply_setting(std::string_view key, std::string_view value, RunConfig& c) {
    key = trim(key);
    value = trim(value);
    const std::string k(key);
    sweep::SweepConfig& s = c.sweep;
    sim::SimulationConfig& m = c.sim;
    if (key == "case") c.params = find_preset(value).parameters();
    else if (key == "kappa") c.params.kappa = parse_double(k, value);
    else if (key == "nu") c.params.nu = parse_double(k, value);
    else if (key == "phi") c.params.phi = parse_double(k, value);
    else if (key == "p_min") s.p_min = parse_double(k, value);
    else if (key == "p_max") s.p_max = parse_double(k, value);
    else if (key == "p_step") s.p_step = parse_double(k, value);
    else if (key == "tau_max") s.tau_max = parse_double(k, value);
    else if (key == "n_initial" || key == "N") s.n_initial = parse_int(k, value);
    else if (key == "n_max") s.n_max = parse_int(k, value);
    else if (key == "convergence_tol") s.convergence_tol = parse_double(k, value);
    else if (key == "rel_imag_tol") s.rel_imag_tol = parse_double(k, value);
    else if (key == "eigen_tol") s.eigen_tol = parse_double(k, value);
    else if (key == "truncation_floor") s.use_truncation_floor = parse_bool(k, value);
    else if (key == "threads") {
        const int t = parse_int(k, value);
        if (t < 0) throw ConfigError(k, "must be >= 0");
        s.threads = static_cast<unsigned>(t);
    }
    else if (key == "tau") c.sim_tau = parse_double(k, value);
    else if (key == "seed_mode") m.seed_mode = parse_int(k, value);
    else if (key == "seed_amplitude") m.seed_amplitude = parse_double(k, value);
    else if (key == "periods") m.periods = parse_int(k, value);
    else if (key == "radius") m.radius = parse_double(k, value);
    else if (key == "length_in_radii") m.grid.length_in_radii = parse_double(k, value);
    else if (key == "cells") m.grid.cells = parse_int(k, value);
    else if (key == "fiber_points") m.grid.fiber_points = parse_int(k, value);
    else if (key == "steps_per_period") m.grid.steps_per_period = parse_int(k, value);
    else if (key == "records_per_period") m.grid.records_per_period = parse_int(k, value);
    else if (key == "max_cfl") m.max_cfl = parse_double(k, value);
    else if (key == "snapshots") m.snapshots = parse_bool(k, value);
    else if (key == "out") {
        if (value.empty()) throw ConfigError(k, "must not be empty");
        c.out_dir = std::filesystem::path(std::string(value));
    }
    else if (key == "verbose") c.verbose = parse_bool(k, value);
    else throw ConfigError(k, "unknown key");
}

void apply_config(std::istream& in, RunConfig& config) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(text), "line " + std::to_string(number) + " is not key = value");
        }
        const std::string_view key = trim(text.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(number), "missing key before '='");
        apply_setting(key, text.substr(eq + 1), config);
    }
}

void apply_config_file(const std::filesystem::path& path, RunConfig& config) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config", "cannot read '" + path.string() + "'");
    apply_config(f, config);
}

// ---------------------------------------------------------------- formats

void write_points_csv(std::ostream& out, std::span<const sweep::StabilityPoint> points) {
    out << "class,p,tau,residual,N\n";
    for (const sweep::StabilityPoint& pt : points) {
        out << floquet::to_string(pt.floquet_class) << ',' << format_g(pt.p, 17) << ',' << format_g(pt.tau, 17)
            << ',' << format_g(pt.residual, 17) << ',' << pt.truncation << '\n';
    }
}

std::vector<sweep::StabilityPoint> read_points_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "class,p,tau,residual,N") {
        throw IoError("points CSV: missing or unexpected header");
    }
    std::vector<sweep::StabilityPoint> points;
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest = trim(line);
        for (auto comma = rest.find(','); ; comma = rest.find(',')) {
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (fields.size() != 5) throw IoError("points CSV line " + std::to_string(number) + ": expected 5 fields");
        try {
            sweep::StabilityPoint pt;
            pt.floquet_class = floquet::parse_floquet_class(fields[0]);
            pt.p = parse_double("p", fields[1]);
            pt.tau = parse_double("tau", fields[2]);
            pt.residual = parse_double("residual", fields[3]);
            pt.truncation = parse_int("N", fields[4]);
            points.push_back(pt);
        } catch (const std::exception& e) {
            throw IoError("points CSV line " + std::to_string(number) + ": " + e.what());
        }
    }
    return points;
}

void write_modes_csv(std::ostream& out, const sim::ModeAmplitudeSeries& series, int modes) {
    out << 't';
    for (int p = 1; p <= modes; ++p) out << ",a_" << p;
    out << '\n';
    for (std::size_t j = 0; j < series.size(); ++j) {
        out << format_g(series.times[j], 17);
        for (int p = 1; p <= modes; ++p) {
            const auto& row = series.amplitudes[j];
            out << ',' << format_g(static_cast<std::size_t>(p) <= row.size() ? row[p - 1] : 0.0, 17);
        }
        out << '\n';
    }
}

void write_shape_csv(std::ostream& out, const sim::Points& points) {
    out << "x,y\n";
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
        out << format_g(points(0, k), 17) << ',' << format_g(points(1, k), 17) << '\n';
    }
}

void write_tongues_svg(std::ostream& out, std::span<const sweep::StabilityPoint> points, const PlotRange& range) {
    constexpr double width = 800.0;
    constexpr double height = 500.0;
    constexpr double left = 60.0;
    constexpr double right = 20.0;
    constexpr double top = 20.0;
    constexpr double bottom = 50.0;
    const double p_span = range.p_max > range.p_min ? range.p_max - range.p_min : 1.0;
    const double tau_span = range.tau_max > 0.0 ? range.tau_max : 1.0;
    auto px = [&](double p) { return left + (p - range.p_min) / p_span * (width - left - right); };
    auto py = [&](double tau) { return height - bottom - tau / tau_span * (height - top - bottom); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<g class=\"grid\" stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (double p = std::ceil(range.p_min); p <= range.p_max; p += 1.0) {
        out << "<line x1=\"" << fixed(px(p)) << "\" y1=\"" << fixed(py(0.0)) << "\" x2=\"" << fixed(px(p))
            << "\" y2=\"" << fixed(py(tau_span)) << "\"/>\n";
    }
    out << "</g>\n";
    out << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << fixed(px(range.p_min)) << "\" y1=\"" << fixed(py(0.0)) << "\" x2=\""
        << fixed(px(range.p_min + p_span)) << "\" y2=\"" << fixed(py(0.0)) << "\"/>\n";
    out << "<line x1=\"" << fixed(px(range.p_min)) << "\" y1=\"" << fixed(py(0.0)) << "\" x2=\""
        << fixed(px(range.p_min)) << "\" y2=\"" << fixed(py(tau_span)) << "\"/>\n";
    out << "</g>\n";
    out << "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"12\">\n";
    const double label_step = p_span > 30.0 ? 5.0 : p_span > 12.0 ? 2.0 : 1.0;
    for (double p = std::ceil(range.p_min / label_step) * label_step; p <= range.p_max; p += label_step) {
        out << "<text x=\"" << fixed(px(p)) << "\" y=\"" << fixed(py(0.0) + 16) << "\" text-anchor=\"middle\">"
            << format_g(p, 6) << "</text>\n";
    }
    for (double tau = 0.0; tau <= tau_span + 1e-12; tau += tau_span / 4.0) {
        out << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(py(tau) + 4) << "\" text-anchor=\"end\">"
            << format_g(tau, 4) << "</text>\n";
    }
    out << "<text x=\"" << fixed(width / 2) << "\" y=\"" << fixed(height - 10)
        << "\" text-anchor=\"middle\">wavenumber p</text>\n";
    out << "<text x=\"16\" y=\"" << fixed(height / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fixed(height / 2) << ")\">forcing amplitude \xCF\x84</text>\n";
    out << "</g>\n";
    if (sweep::kPhysicalTauLimit <= tau_span) {
        out << "<line class=\"guide\" x1=\"" << fixed(px(range.p_min)) << "\" y1=\""
            << fixed(py(sweep::kPhysicalTauLimit)) << "\" x2=\"" << fixed(px(range.p_min + p_span)) << "\" y2=\""
            << fixed(py(sweep::kPhysicalTauLimit)) << "\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n";
    }
    out << "<g class=\"points\">\n";
    for (const sweep::StabilityPoint& pt : points) {
        const double x = px(pt.p);
        const double y = py(pt.tau);
        if (pt.floquet_class == floquet::FloquetClass::Harmonic) {
            out << "<circle class=\"pt harmonic\" cx=\"" << fixed(x) << "\" cy=\"" << fixed(y)
                << "\" r=\"2.5\" fill=\"#1f5fbf\"/>\n";
        } else {
            out << "<rect class=\"pt subharmonic\" x=\"" << fixed(x - 2.5) << "\" y=\"" << fixed(y - 2.5)
                << "\" width=\"5\" height=\"5\" fill=\"#cc2222\"/>\n";
        }
    }
    out << "</g>\n";
    out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<circle cx=\"" << fixed(width - 150) << "\" cy=\"32\" r=\"4\" fill=\"#1f5fbf\"/>"
        << "<text x=\"" << fixed(width - 140) << "\" y=\"36\">harmonic</text>\n"
        << "<rect x=\"" << fixed(width - 154) << "\" y=\"46\" width=\"8\" height=\"8\" fill=\"#cc2222\"/>"
        << "<text x=\"" << fixed(width - 140) << "\" y=\"54\">subharmonic</text>\n"
        << "</g>\n</svg>\n";
}

void write_mode_report(std::ostream& out, std::span<const sweep::PhysicalMode> modes) {
    if (modes.empty()) {
        out << "none\n";
        return;
    }
    for (const sweep::PhysicalMode& m : modes) {
        out << floquet::to_string(m.floquet_class) << ' ' << m.p << ' ' << format_g(m.tau_onset, 10) << '\n';
    }
}

// ---------------------------------------------------------------- commands

std::vector<sweep::StabilityPoint> cmd_contours(const RunConfig& config, std::ostream& out, std::ostream& log) {
    std::vector<sweep::StabilityPoint> points = run_sweep(config, log);
    ensure_directory(config.out_dir);
    const std::filesystem::path csv_path = config.out_dir / "points.csv";
    std::ofstream csv = open_output(csv_path);
    write_points_csv(csv, points);
    close_output(csv, csv_path);

    const std::filesystem::path svg_path = config.out_dir / "tongues.svg";
    std::ofstream svg = open_output(svg_path);
    write_tongues_svg(svg, points, {config.sweep.p_min, std::max(config.sweep.p_min, config.sweep.p_max),
                                    config.sweep.tau_max});
    close_output(svg, svg_path);
    if (config.verbose) log << "wrote " << csv_path.string() << " and " << svg_path.string() << '\n';

    write_mode_report(out, sweep::physical_modes(points, config.sweep.p_step));
    return points;
}

std::vector<sweep::PhysicalMode> cmd_modes(const RunConfig& config, std::ostream& out, std::ostream& log) {
    const std::vector<sweep::StabilityPoint> points = run_sweep(config, log);
    std::vector<sweep::PhysicalMode> modes = sweep::physical_modes(points, config.sweep.p_step);
    write_mode_report(out, modes);
    return modes;
}

double default_simulation_tau(const RunConfig& config, int p) {
    const floquet::PhysicalParameters params = config.params.resolve();
    sweep::SweepConfig s = config.sweep;
    s.tau_max = sweep::kPhysicalTauLimit;
    validate_sweep(s);
    double onset = std::numeric_limits<double>::infinity();
    for (const floquet::FloquetClass c : {floquet::FloquetClass::Harmonic, floquet::FloquetClass::Subharmonic}) {
        const sweep::TruncationResult r = sweep::converge_truncation(p, c, params, s);
        if (!r.taus.empty()) onset = std::min(onset, r.taus.front());
    }
    if (!std::isfinite(onset)) {
        throw ConfigError("tau", "p=" + std::to_string(p) + " lies in no tongue below 1/2; set tau explicitly");
    }
    return 0.5 * (onset + sweep::kPhysicalTauLimit);
}

sim::SimulationResult cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& log) {
    const floquet::PhysicalParameters params = config.params.resolve();
    sim::SimulationConfig sc = config.sim;
    sc.kappa = params.kappa();
    sc.nu = params.nu();
    if (sc.periods < kVerdictWindow) {
        throw ConfigError("periods", "growth verdicts need at least " + std::to_string(kVerdictWindow) + " periods");
    }
    sc.tau = config.sim_tau ? *config.sim_tau : default_simulation_tau(config, sc.seed_mode);
    sc.validate();
    ensure_directory(config.out_dir);
    out << "tau " << format_g(sc.tau, 10) << '\n';

    const auto start = std::chrono::steady_clock::now();
    sim::SimulationResult result = sim::run_simulation(sc);
    if (config.verbose) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log << "simulate: " << sc.periods << " periods, " << result.series.size() << " records, max divergence "
            << result.max_divergence << ", " << secs << " s\n";
    }

    const std::filesystem::path csv_path = config.out_dir / "modes.csv";
    std::ofstream csv = open_output(csv_path);
    write_modes_csv(csv, result.series, kTrackedModes);
    close_output(csv, csv_path);
    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
        const std::filesystem::path path = config.out_dir / ("shape_" + std::to_string(k) + ".csv");
        std::ofstream f = open_output(path);
        write_shape_csv(f, result.snapshots[k]);
        close_output(f, path);
    }

    const double seed = sc.seed_amplitude * sc.radius;
    for (int p = 1; p <= kTrackedModes; ++p) {
        const std::vector<double> maxima = sim::period_maxima(result.series, p, result.period);
        const sim::Verdict v = sim::growth_verdict(result.series, p, result.period, kVerdictWindow);
        out << "p=" << p << ' ' << sim::to_string(v) << " final/seed=" << format_g(maxima.back() / seed, 6) << '\n';
    }
    return result;
}

bool cmd_bessel(int p, std::complex<double> z, std::ostream& out) {
    if (p < 0) throw ConfigError("p", "order must be non-negative");
    bool ok = true;
    auto emit = [&](std::string_view name, auto&& compute) {
        try {
            const std::complex<double> v = compute();
            out << name << ' ' << format_g(v.real(), 15) << ' ' << format_g(v.imag(), 15) << '\n';
        } catch (const std::exception& e) {
            ok = false;
            out << name << " error: " << e.what() << '\n';
        }
    };
    const special::BesselOrder order(p);
    const double nu = p;
    emit("J_p", [&] { return special::bessel_j(order, z); });
    emit("H_p", [&] { return special::hankel1(order, z); });
    // the +-1 forms come from one recurrence step, as in ratio_terms
    emit("H_p/H_{p-1}", [&] { return special::ratio_h(nu, z); });
    emit("H_{p+1}/H_{p-1}", [&] { return 2.0 * nu / z * special::ratio_h(nu, z) - 1.0; });
    emit("J_p/J_{p+1}", [&] { return special::ratio_j(nu, z); });
    emit("J_{p-1}/J_{p+1}", [&] { return 2.0 * nu / z * special::ratio_j(nu, z) - 1.0; });
    return ok;
}

void dump_pencils(const RunConfig& config, double p, std::ostream& log) {
    const floquet::PhysicalParameters params = config.params.resolve();
    validate_sweep(config.sweep);
    ensure_directory(config.out_dir);
    for (const floquet::FloquetClass c : {floquet::FloquetClass::Harmonic, floquet::FloquetClass::Subharmonic}) {
        const floquet::FloquetPencil pencil = floquet::assemble_pencil(p, c, params, config.sweep.n_initial);
        const std::filesystem::path path =
            config.out_dir / ("pencil_" + std::string(floquet::to_string(c)) + ".txt");
        std::ofstream f = open_output(path);
        floquet::write_pencil(f, pencil);
        close_output(f, path);
        if (config.verbose) log << "wrote " << path.string() << '\n';
    }
}

}  // namespace ibres::cli
