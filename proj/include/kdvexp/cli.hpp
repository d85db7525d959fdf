#ifndef KDVEXP_CLI_HPP
#define KDVEXP_CLI_HPP

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"
#include "selftest.hpp"

namespace kdvexp {

// Command-line front end. Exit codes: 0 success, 1 configuration or usage
// error, 2 numerical failure (divergence, tolerance not met, failed selftest).

namespace detail {

inline SchemeVariant parse_scheme_single(const std::string& s) {
    if (s == "expint1") return SchemeVariant::ExpInt1;
    if (s == "expint2") return SchemeVariant::ExpInt2;
    throw ConfigError("unknown scheme '" + s + "' (expected expint1 or expint2)");
}

inline std::vector<SchemeVariant> parse_scheme_list(const std::string& s) {
    if (s == "both") return {SchemeVariant::ExpInt1, SchemeVariant::ExpInt2};
    return {parse_scheme_single(s)};
}

inline NyquistPolicy parse_nyquist(const std::string& s) {
    if (s == "default" || s == "zeronyquist") return NyquistPolicy::ZeroNyquist;
    if (s == "paper" || s == "paperexact") return NyquistPolicy::PaperExact;
    throw ConfigError("unknown nyquist policy '" + s + "' (expected default or paper)");
}

inline AlphaPolicy parse_alpha_policy(const std::string& s) {
    if (s == "auto" || s == "autoshift") return AlphaPolicy::AutoShift;
    if (s == "zero" || s == "requirezeromean") return AlphaPolicy::RequireZeroMean;
    throw ConfigError("unknown alpha policy '" + s + "' (expected auto or zero)");
}

inline std::vector<NormKind> parse_norms(const std::string& s) {
    std::vector<NormKind> norms;
    for (const std::string& part : split(s, ',')) {
        NormKind n;
        if (part == "l2") n = NormKind::L2;
        else if (part == "h1") n = NormKind::H1;
        else if (part == "h2") n = NormKind::H2;
        else throw ConfigError("unknown norm '" + part + "' (expected l2, h1, h2)");
        if (std::find(norms.begin(), norms.end(), n) == norms.end()) norms.push_back(n);
    }
    if (norms.empty()) throw ConfigError("empty norm list");
    return norms;
}

inline InitialCondition parse_ic(const std::string& spec) {
    std::istringstream is(spec);
    std::vector<std::string> toks;
    std::string t;
    while (is >> t) toks.push_back(t);
    if (toks.empty()) throw ConfigError("empty initial-condition spec");
    if (toks[0] == "sech2sin") {
        if (toks.size() > 1) throw ConfigError("sech2sin takes no parameters");
        return InitialCondition::sech2sin();
    }
    if (toks[0] == "soliton") {
        double c = 1.0, a = 0.0;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            const std::size_t eq = toks[i].find('=');
            if (eq == std::string::npos)
                throw ConfigError("soliton parameters look like c=1 a=0, got '" + toks[i] + "'");
            const std::string key = toks[i].substr(0, eq);
            const std::string val = toks[i].substr(eq + 1);
            if (key == "c") c = parse_double(val, "soliton c", 0);
            else if (key == "a") a = parse_double(val, "soliton a", 0);
            else throw ConfigError("unknown soliton parameter '" + key + "'");
        }
        if (!(c > 0.0)) throw ConfigError("soliton speed c must be positive");
        return InitialCondition::make_soliton(c, a);
    }
    throw ConfigError("unknown initial condition '" + toks[0] + "' (expected sech2sin or soliton)");
}

// Path for the CSV as seen from the plot script: when both files land in the
// same directory, reference the CSV by file name only.
inline std::string csv_path_for_plot(const std::string& out, const std::string& plot) {
    namespace fs = std::filesystem;
    if (fs::path(out).parent_path() == fs::path(plot).parent_path())
        return fs::path(out).filename().string();
    return out;
}

inline std::vector<double> parse_time_list(const std::string& s) {
    std::vector<double> times;
    for (const std::string& part : split(s, ','))
        times.push_back(parse_double(part, "snapshot_times", 0));
    return times;
}

inline int run_simulate(const RunConfig& rc) {
    if (rc.scheme == "both") throw ConfigError("simulate runs one scheme; pass expint1 or expint2");
    Grid grid(rc.k, rc.torus_scale);
    SchemeConfig cfg;
    cfg.variant = parse_scheme_single(rc.scheme);
    cfg.tau = rc.tau;
    cfg.alpha_policy = parse_alpha_policy(rc.alpha_policy);
    cfg.nyquist = parse_nyquist(rc.nyquist);
    cfg.dealias = rc.dealias;

    std::vector<double> times;
    if (!rc.snapshot_times.empty()) {
        times = parse_time_list(rc.snapshot_times);
    } else {
        if (rc.snapshots < 1) throw ConfigError("snapshots must be at least 1");
        if (rc.snapshots == 1) times = {rc.t_final};
        else
            for (int j = 0; j < rc.snapshots; ++j)
                times.push_back(rc.t_final * j / (rc.snapshots - 1));
    }

    const SpectralField u0 = make_initial(grid, parse_ic(rc.ic));
    const Trajectory traj = run_evolution(u0, cfg, rc.t_final, times);

    std::ofstream out(rc.out);
    if (!out) throw ConfigError("cannot open output file '" + rc.out + "'");
    write_trajectory_csv(out, traj);
    if (!rc.plot.empty()) {
        std::ofstream plot(rc.plot);
        if (!plot) throw ConfigError("cannot open plot script '" + rc.plot + "'");
        emit_plot_script(plot, traj, csv_path_for_plot(rc.out, rc.plot));
    }
    std::cout << "wrote " << rc.out << ": " << traj.snapshots.size() << " snapshots, " << traj.steps_taken
              << " steps" << (traj.partial_final_step ? " (short final step)" : "") << "\n";
    return 0;
}

inline int run_converge(const RunConfig& rc) {
    if (rc.tau_list.empty()) throw ConfigError("converge requires tau_list (e.g. dyadic:2^-7..2^-13:x0.5)");
    StudyConfig cfg;
    cfg.grid = Grid(rc.k, rc.torus_scale);
    cfg.ic = parse_ic(rc.ic);
    cfg.schemes = parse_scheme_list(rc.scheme);
    cfg.taus = parse_tau_list(rc.tau_list);
    cfg.t_final = rc.t_final;
    cfg.norms = parse_norms(rc.norms);
    if (rc.reference == "exact") cfg.reference = ReferenceKind::ExactSoliton;
    else if (rc.reference == "finetau") cfg.reference = ReferenceKind::FineTau;
    else throw ConfigError("unknown reference '" + rc.reference + "' (expected exact or finetau)");
    cfg.tau_ref = rc.tau_ref;
    cfg.alpha_policy = parse_alpha_policy(rc.alpha_policy);
    cfg.nyquist = parse_nyquist(rc.nyquist);
    cfg.dealias = rc.dealias;
    cfg.threads = rc.threads;

    const ConvergenceStudy study = convergence_study(cfg);

    std::ofstream out(rc.out);
    if (!out) throw ConfigError("cannot open output file '" + rc.out + "'");
    write_errors_csv(out, study);
    if (!rc.plot.empty()) {
        std::ofstream plot(rc.plot);
        if (!plot) throw ConfigError("cannot open plot script '" + rc.plot + "'");
        emit_plot_script(plot, study, csv_path_for_plot(rc.out, rc.plot));
    }
    for (const SchemeSlope& s : study.slopes)
        std::cout << "slope " << s.scheme << " " << norm_label(s.norm) << " = " << s.fit.slope << " ("
                  << s.fit.points << " points)\n";
    for (const std::string& w : study.warnings) std::cerr << "warning: " << w << "\n";
    if (study.records.empty()) {
        std::cerr << "error: no study cell completed\n";
        return 2;
    }
    std::cout << "wrote " << rc.out << "\n";
    return 0;
}

} // namespace detail

inline int cli_main(std::vector<std::string> args) {
    CLI::App app{"Spectral exponential-type integrators for the periodic KdV equation"};
    app.require_subcommand(1);

    // Load --config first so explicit flags override file values.
    RunConfig rc;
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) rc = parse_config_file(args[i + 1]);
            else if (args[i].rfind("--config=", 0) == 0) rc = parse_config_file(args[i].substr(9));
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << (e.line > 0 ? " (line " + std::to_string(e.line) + ")" : "")
                  << "\n";
        return 1;
    }

    std::string config_path; // consumed above; registered so CLI11 accepts it
    std::vector<std::string> ic_tokens;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key=value configuration file");
        sub->add_option("--k", rc.k, "number of modes (even, >= 4)");
        sub->add_option("--torus-scale", rc.torus_scale, "torus scale L (domain [-pi/L, pi/L))");
        sub->add_option("--scheme", rc.scheme, "expint1 | expint2 | both (converge only)");
        sub->add_option("--t-final", rc.t_final, "final time");
        sub->add_option("--ic", ic_tokens, "initial condition: sech2sin | soliton c=<v> a=<v>")
            ->expected(1, 3);
        sub->add_option("--out", rc.out, "output CSV path");
        sub->add_option("--plot", rc.plot, "emit a gnuplot script to this path");
        sub->add_option("--nyquist", rc.nyquist, "default | paper");
        sub->add_flag("--dealias", rc.dealias, "apply the 2/3 rule inside products");
        sub->add_option("--alpha-policy", rc.alpha_policy, "auto (split mean) | zero (require zero mean)");
        sub->add_option("--threads", rc.threads, "parallel study cells (KDVEXP_THREADS caps this)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "evolve one initial condition and write snapshots");
    add_common(simulate);
    simulate->add_option("--tau", rc.tau, "time step");
    simulate->add_option("--snapshots", rc.snapshots, "evenly spaced snapshot count (endpoints included)");
    simulate->add_option("--snapshot-times", rc.snapshot_times, "comma list of snapshot times");

    CLI::App* converge = app.add_subcommand("converge", "temporal convergence study");
    add_common(converge);
    converge->add_option("--tau-list", rc.tau_list, "dyadic:2^-A..2^-B[:xS] or comma list");
    converge->add_option("--reference", rc.reference, "exact | finetau");
    converge->add_option("--tau-ref", rc.tau_ref, "fine reference step (finetau)");
    converge->add_option("--norm,--norms", rc.norms, "comma list of l2,h1,h2");

    CLI::App* selftest = app.add_subcommand("selftest", "run built-in oracle and invariant checks");

    std::vector<std::string> cli_args(args.rbegin(), args.rend()); // CLI11 wants reversed argv tail
    try {
        app.parse(cli_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (!ic_tokens.empty()) {
        std::string joined;
        for (const std::string& t : ic_tokens) {
            if (!joined.empty()) joined += ' ';
            joined += t;
        }
        rc.ic = joined;
    }

    try {
        if (simulate->parsed()) return detail::run_simulate(rc);
        if (converge->parsed()) return detail::run_converge(rc);
        if (selftest->parsed()) return run_selftest(std::cout) ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << (e.line > 0 ? " (line " + std::to_string(e.line) + ")" : "")
                  << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) { // symmetry, mean, quadrature, fit
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

inline int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(std::move(args));
}

} // namespace kdvexp

#endif
