// Command-line front end: resonant-sweep, sideband-sweep, oracle and compare
// subcommands over a JSON run configuration.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sqob/bloch.hpp"
#include "sqob/config.hpp"
#include "sqob/report.hpp"
#include "sqob/resonant.hpp"
#include "sqob/sideband.hpp"
#include "sqob/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sqob::ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Output is composed fully in memory and written in one pass, so a failure
// never leaves a partial file behind.
void write_output(const sqob::RunConfig& cfg, const std::string& text) {
    if (cfg.output.path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output.path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + cfg.output.path + "'");
    out << text;
}

int run_resonant_sweep(const sqob::RunConfig& cfg) {
    if (cfg.model.epsilon != 0.0) {
        std::cerr << "resonant-sweep: config must have epsilon = 0\n";
        return kExitConfig;
    }
    const sqob::DerivedParams d = sqob::derive(cfg.model);
    write_output(cfg, sqob::resonant_sweep_csv(cfg.model, d, cfg.e0_grid(), cfg));
    return kExitOk;
}

int run_sideband_sweep(const sqob::RunConfig& cfg, bool with_hysteresis) {
    const sqob::DerivedParams d = sqob::derive(cfg.model);
    sqob::ResponseCurve curve = sqob::sweep(cfg.e0_grid(), cfg.model, d, cfg.solver.depth);
    sqob::classify_branches(curve);
    const auto folds = sqob::turning_points(curve);
    std::vector<sqob::HysteresisReport> hyst;
    if (with_hysteresis) {
        hyst.push_back(sqob::hysteresis(curve, sqob::HysteresisReport::Direction::up));
        hyst.push_back(sqob::hysteresis(curve, sqob::HysteresisReport::Direction::down));
    }
    if (cfg.output.format == sqob::RunConfig::Output::Format::json) {
        write_output(cfg, sqob::sideband_sweep_json(curve, folds, hyst, cfg).dump(2) + "\n");
    } else {
        std::string text = sqob::sideband_sweep_csv(curve, folds, cfg);
        std::string hy;
        for (const auto& h : hyst) hy += sqob::hysteresis_comment(h);
        // hysteresis comments go after the config line, before the header
        const size_t pos = text.find('\n') + 1;
        text.insert(pos, hy);
        write_output(cfg, text);
    }
    return kExitOk;
}

int run_oracle(const sqob::RunConfig& cfg, double ein_re, double ein_im) {
    const sqob::DerivedParams d = sqob::derive(cfg.model);
    const sqob::cplx e_in(ein_re, ein_im);
    sqob::Trajectory traj = sqob::settle(e_in, cfg.model, d, cfg.solver.settle_tol,
                                         cfg.solver.max_periods, std::nullopt,
                                         cfg.solver.tol);
    if (cfg.model.epsilon == 0.0) {
        // fixed point: report the single sample, no harmonic content
        std::string out = sqob::config_comment(cfg);
        out += "t,s0,sm_re,sm_im,et_re,et_im\n";
        out += sqob::fmt(0.0) + "," + sqob::fmt(traj.states[0].s0) + "," +
               sqob::fmt(traj.states[0].sm.real()) + "," +
               sqob::fmt(traj.states[0].sm.imag()) + "," +
               sqob::fmt(traj.fields_total[0].real()) + "," +
               sqob::fmt(traj.fields_total[0].imag()) + "\n";
        write_output(cfg, out);
        return kExitOk;
    }
    const sqob::HarmonicSolution h =
        sqob::extract_harmonics(traj, cfg.model.epsilon, cfg.solver.n_max, cfg.model, d);
    if (cfg.output.format == sqob::RunConfig::Output::Format::json)
        write_output(cfg, sqob::oracle_json(traj, h, cfg).dump(2) + "\n");
    else
        write_output(cfg, sqob::oracle_csv(traj, h, cfg));
    return kExitOk;
}

int run_compare(const sqob::RunConfig& cfg) {
    const sqob::DerivedParams d = sqob::derive(cfg.model);
    std::string out = sqob::config_comment(cfg);
    out += "e0_abs,e_in_abs,ratio,rel_a0,rel_a1,rel_am1\n";
    for (double e0 : cfg.e0_grid()) {
        const sqob::TripletSolution t =
            sqob::solve_triplet(sqob::cplx(e0, 0.0), cfg.model, d, cfg.solver.depth);
        const sqob::AtomicState init =
            sqob::detail::triplet_initial_state(t, cfg.model, d);
        const sqob::Trajectory traj =
            sqob::settle(t.e_in, cfg.model, d, cfg.solver.settle_tol,
                         cfg.solver.max_periods, init, cfg.solver.tol);
        const sqob::HarmonicSolution h =
            sqob::extract_harmonics(traj, cfg.model.epsilon, cfg.solver.n_max, cfg.model, d);
        const double a0n = std::abs(t.a0);
        const double ratio = std::max(std::abs(t.a1), std::abs(t.am1)) / a0n;
        out += sqob::fmt(e0) + "," + sqob::fmt(std::abs(t.e_in)) + "," +
               sqob::fmt(ratio) + "," + sqob::fmt(std::abs(h.a(0) - t.a0) / a0n) + "," +
               sqob::fmt(std::abs(h.a(1) - t.a1) / a0n) + "," +
               sqob::fmt(std::abs(h.a(-1) - t.am1) / a0n) + "\n";
    }
    write_output(cfg, out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bistable response of two-level atoms driven against a detuned "
                 "broadband squeezed vacuum: central and sideband output modes"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    bool with_hysteresis = false;
    double ein_re = 0.0, ein_im = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "JSON run configuration")->required();
        sub->add_option("--output", output_override, "override the output path");
    };
    CLI::App* resonant = app.add_subcommand("resonant-sweep", "resonant input-output table");
    add_common(resonant);
    CLI::App* sideband =
        app.add_subcommand("sideband-sweep", "harmonic-balance mode response curves");
    add_common(sideband);
    sideband->add_flag("--hysteresis", with_hysteresis, "append hysteresis jump report");
    CLI::App* oracle = app.add_subcommand("oracle", "settled time-domain orbit and harmonics");
    add_common(oracle);
    oracle->add_option("--e-in", ein_re, "input field amplitude (real part)")->required();
    oracle->add_option("--e-in-im", ein_im, "input field amplitude (imaginary part)");
    CLI::App* compare =
        app.add_subcommand("compare", "triplet solver vs time-domain oracle errors");
    add_common(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // usage problems map onto the config-error exit code; --help stays 0
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        sqob::RunConfig cfg = sqob::parse_config(read_file(config_path));
        if (!output_override.empty()) cfg.output.path = output_override;
        if (resonant->parsed()) return run_resonant_sweep(cfg);
        if (sideband->parsed()) return run_sideband_sweep(cfg, with_hysteresis);
        if (oracle->parsed()) return run_oracle(cfg, ein_re, ein_im);
        if (compare->parsed()) return run_compare(cfg);
        return kExitConfig;
    } catch (const sqob::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitNumerical;
    }
}
