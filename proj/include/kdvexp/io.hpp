#ifndef KDVEXP_IO_HPP
#define KDVEXP_IO_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "experiments.hpp"

namespace kdvexp {

// ---------------------------------------------------------------------------
// Flat key=value run configuration, CSV emission, and gnuplot scripts.
// ---------------------------------------------------------------------------

struct RunConfig {
    int k = 256;
    double torus_scale = 1.0;
    std::string scheme = "expint1"; // expint1 | expint2 | both (converge only)
    double tau = 1e-3;
    double t_final = 1.0;
    std::string ic = "sech2sin"; // sech2sin | soliton c=<v> a=<v>
    int snapshots = 2;           // evenly spaced, endpoints included
    std::string snapshot_times;  // comma list; overrides `snapshots` when set
    std::string out = "out.csv";
    std::string plot;            // gnuplot script path; empty = do not emit
    std::string tau_list;        // converge: dyadic:2^-A..2^-B[:xS] or comma list
    std::string reference = "exact"; // exact | finetau
    double tau_ref = 1e-6;
    std::string norms = "h1"; // comma list of l2,h1,h2
    std::string nyquist = "default"; // default | paper
    bool dealias = false;
    std::string alpha_policy = "auto"; // auto | zero
    int threads = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline double parse_double(const std::string& s, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value '" + s + "' for " + key, line);
    }
}

inline int parse_int(const std::string& s, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value '" + s + "' for " + key, line);
    }
}

inline bool parse_bool(const std::string& s, const std::string& key, int line) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("invalid boolean value '" + s + "' for " + key, line);
}

// 17 significant digits reproduce a double exactly on read-back.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void apply_config_entry(RunConfig& rc, const std::string& key, const std::string& value, int line) {
    if (key == "k") rc.k = parse_int(value, key, line);
    else if (key == "torus_scale") rc.torus_scale = parse_double(value, key, line);
    else if (key == "scheme") rc.scheme = value;
    else if (key == "tau") rc.tau = parse_double(value, key, line);
    else if (key == "t_final") rc.t_final = parse_double(value, key, line);
    else if (key == "ic") rc.ic = value;
    else if (key == "snapshots") rc.snapshots = parse_int(value, key, line);
    else if (key == "snapshot_times") rc.snapshot_times = value;
    else if (key == "out") rc.out = value;
    else if (key == "plot") rc.plot = value;
    else if (key == "tau_list") rc.tau_list = value;
    else if (key == "reference") rc.reference = value;
    else if (key == "tau_ref") rc.tau_ref = parse_double(value, key, line);
    else if (key == "norms") rc.norms = value;
    else if (key == "nyquist") rc.nyquist = value;
    else if (key == "dealias") rc.dealias = parse_bool(value, key, line);
    else if (key == "alpha_policy") rc.alpha_policy = value;
    else if (key == "threads") rc.threads = parse_int(value, key, line);
    else throw ConfigError("unknown configuration key '" + key + "'", line);
}

} // namespace detail

// Parses the flat key=value format: one entry per line, '#' starts a
// comment, blank lines are skipped. Unknown keys are hard errors carrying
// the 1-based line number; later entries override earlier ones.
inline RunConfig parse_config(std::istream& in) {
    RunConfig rc;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string text = detail::trim(raw);
        if (text.empty()) continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value, got '" + text + "'", line);
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", line);
        detail::apply_config_entry(rc, key, value, line);
    }
    return rc;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

// Step lists: either an explicit comma list of values or the dyadic form
// dyadic:2^-A..2^-B[:xS], which expands to S * 2^-j for j = A..B (S = 1 when
// omitted).
inline std::vector<double> parse_tau_list(const std::string& spec) {
    const std::string s = detail::trim(spec);
    if (s.empty()) throw ConfigError("empty tau list");
    if (s.rfind("dyadic:", 0) == 0) {
        std::string body = s.substr(7);
        double scale = 1.0;
        const std::size_t colon = body.find(':');
        if (colon != std::string::npos) {
            std::string sfx = detail::trim(body.substr(colon + 1));
            if (sfx.empty() || sfx[0] != 'x')
                throw ConfigError("dyadic tau list: expected ':x<scale>' suffix in '" + s + "'");
            scale = detail::parse_double(sfx.substr(1), "tau_list scale", 0);
            body = detail::trim(body.substr(0, colon));
        }
        const std::size_t dots = body.find("..");
        if (dots == std::string::npos)
            throw ConfigError("dyadic tau list: expected '2^-A..2^-B' in '" + s + "'");
        auto parse_pow = [&](std::string part) {
            part = detail::trim(part);
            if (part.rfind("2^-", 0) != 0)
                throw ConfigError("dyadic tau list: expected '2^-<int>', got '" + part + "'");
            return detail::parse_int(part.substr(3), "tau_list exponent", 0);
        };
        int a = parse_pow(body.substr(0, dots));
        int b = parse_pow(body.substr(dots + 2));
        if (a > b) std::swap(a, b);
        std::vector<double> taus;
        for (int j = a; j <= b; ++j) taus.push_back(scale * std::ldexp(1.0, -j));
        return taus;
    }
    std::vector<double> taus;
    for (const std::string& part : detail::split(s, ',')) {
        if (part.empty()) throw ConfigError("empty entry in tau list '" + s + "'");
        taus.push_back(detail::parse_double(part, "tau_list", 0));
    }
    return taus;
}

// ---------------------------------------------------------------------------
// CSV writers. All floating-point values use 17 significant digits, so the
// files are byte-deterministic and read back exactly.
// ---------------------------------------------------------------------------

// One row per snapshot: the time, then the K real samples left to right.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.snapshots.empty()) {
        os << "# t, x_0 ... x_{-1} (no snapshots)\n";
        return;
    }
    const int K = traj.snapshots.front().u.size();
    os << "# t, x_0 ... x_" << (K - 1) << "\n";
    for (const Snapshot& snap : traj.snapshots) {
        const RealField f = inverse_transform(snap.u);
        os << detail::fmt17(snap.t);
        for (int j = 0; j < K; ++j) os << ',' << detail::fmt17(f.v[j]);
        os << '\n';
    }
}

// One row per (scheme, tau, norm) error measurement, then the fitted slopes
// and any warnings as trailing comments.
inline void write_errors_csv(std::ostream& os, const ConvergenceStudy& study) {
    os << "# scheme, tau, norm, error\n";
    for (const ErrorRecord& rec : study.records)
        for (const auto& [norm, err] : rec.errors)
            os << rec.scheme << ',' << detail::fmt17(rec.tau) << ',' << norm_label(norm) << ','
               << detail::fmt17(err) << '\n';
    for (const SchemeSlope& s : study.slopes)
        os << "# slope " << s.scheme << ' ' << norm_label(s.norm) << " = " << detail::fmt17(s.fit.slope)
           << " (" << s.fit.points << " points)\n";
    os << "# reference = " << (study.reference == ReferenceKind::ExactSoliton ? "exact" : "finetau");
    if (study.reference == ReferenceKind::FineTau) os << " tau_ref=" << detail::fmt17(study.tau_ref);
    os << '\n';
    for (const std::string& w : study.warnings) os << "# warning: " << w << '\n';
}

// ---------------------------------------------------------------------------
// gnuplot scripts. The CSV is referenced by the given (relative) path.
// ---------------------------------------------------------------------------

// Log-log error plot with order guide lines: slope 1 dashed, slope 2
// dash-dotted, anchored at each scheme's coarsest measured point.
inline void emit_plot_script(std::ostream& os, const ConvergenceStudy& study, const std::string& csv_path) {
    os << "# gnuplot script: temporal convergence (log-log)\n";
    os << "set datafile separator ','\n";
    os << "set logscale xy\n";
    os << "set xlabel 'time step tau'\n";
    os << "set ylabel 'error'\n";
    os << "set key bottom right\n";
    os << "set grid\n";

    // Collect the (scheme, norm) series present in the records.
    std::vector<std::pair<std::string, NormKind>> series;
    for (const ErrorRecord& rec : study.records)
        for (const auto& [norm, err] : rec.errors) {
            (void)err;
            if (std::find(series.begin(), series.end(), std::make_pair(rec.scheme, norm)) == series.end())
                series.emplace_back(rec.scheme, norm);
        }

    // Guide-line anchors: the coarsest tau among the records (largest tau is
    // first after study assembly) and its error per series.
    std::string guides;
    int guide_id = 0;
    for (const auto& [scheme, norm] : series) {
        for (const ErrorRecord& rec : study.records) {
            if (rec.scheme != scheme) continue;
            for (const auto& [nk, err] : rec.errors) {
                if (nk != norm) continue;
                const int order = scheme == "expint1" ? 1 : 2;
                const double c = err / std::pow(rec.tau, order);
                os << "g" << guide_id << "(x) = " << detail::fmt17(c) << " * x**" << order << "\n";
                guides += ", g" + std::to_string(guide_id) + "(x) with lines dt " +
                          (order == 1 ? std::string("2") : std::string("4")) + " lc 'gray40' title 'slope " +
                          std::to_string(order) + "'";
                ++guide_id;
                break;
            }
            break; // coarsest record only
        }
    }

    os << "plot";
    bool first = true;
    for (const auto& [scheme, norm] : series) {
        if (!first) os << ",";
        first = false;
        os << " '" << csv_path << "' using 2:(strcol(1) eq '" << scheme << "' && strcol(3) eq '"
           << norm_label(norm) << "' ? column(4) : 1/0) with linespoints title '" << scheme << " "
           << norm_label(norm) << "'";
    }
    os << guides << "\n";
    os << "pause -1 'press return'\n";
}

// Linear-axes snapshot plot: one curve per trajectory row, x reconstructed
// from the grid layout.
inline void emit_plot_script(std::ostream& os, const Trajectory& traj, const std::string& csv_path) {
    const int K = traj.snapshots.empty() ? 0 : traj.snapshots.front().u.size();
    const double x0 = traj.snapshots.empty() ? 0.0 : traj.snapshots.front().u.grid.x(0);
    const double h = traj.snapshots.empty() ? 1.0 : traj.snapshots.front().u.grid.spacing();
    os << "# gnuplot script: solution snapshots\n";
    os << "set datafile separator ','\n";
    os << "set xlabel 'x'\n";
    os << "set ylabel 'u'\n";
    os << "set grid\n";
    os << "x0 = " << detail::fmt17(x0) << "\n";
    os << "h  = " << detail::fmt17(h) << "\n";
    os << "K  = " << K << "\n";
    std::ostringstream times;
    for (std::size_t r = 0; r < traj.snapshots.size(); ++r) {
        if (r) times << ' ';
        times << detail::fmt17(traj.snapshots[r].t);
    }
    os << "times = '" << times.str() << "'\n";
    // Matrix cells count from 0: cell 0 holds t, cells 1..K the samples.
    os << "plot for [r=0:" << (traj.snapshots.empty() ? 0 : traj.snapshots.size() - 1) << "] '" << csv_path
       << "' matrix every :::(r)::(r) using ($1 == 0 ? 1/0 : x0 + ($1 - 1) * h):3 with lines"
          " title sprintf('t = %s', word(times, r + 1))\n";
    os << "pause -1 'press return'\n";
}

} // namespace kdvexp

#endif
