#include <catch2/catch_amalgamated.hpp>

#include <kdvexp/cli.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace kdvexp;
using Catch::Approx;

namespace {

RunConfig parse_str(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

// Returns the line number a ConfigError carries, or -1 if parsing succeeded.
int config_error_line(const std::string& text) {
    try {
        parse_str(text);
    } catch (const ConfigError& e) {
        return e.line;
    }
    return -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l)) out.push_back(l);
    return out;
}

std::vector<double> parse_csv_row(const std::string& line) {
    std::vector<double> vals;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) vals.push_back(std::stod(cell));
    return vals;
}

// Scratch directory for files the CLI writes; wiped on construction so stale
// runs cannot leak into assertions.
struct ScratchDir {
    std::filesystem::path dir;
    ScratchDir() : dir(std::filesystem::temp_directory_path() / "kdvexp_io_test") {
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

// Redirects a stream into a buffer for the lifetime of the object; the CLI
// reports progress on stdout and errors on stderr.
struct CaptureStream {
    std::ostream& os;
    std::ostringstream buf;
    std::streambuf* old;
    explicit CaptureStream(std::ostream& s) : os(s), old(s.rdbuf(buf.rdbuf())) {}
    ~CaptureStream() { os.rdbuf(old); }
    std::string text() const { return buf.str(); }
};

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("config parsing: every key, comments, and override order") {
    SECTION("defaults survive an empty stream") {
        const RunConfig rc = parse_str("");
        REQUIRE(rc.k == 256);
        REQUIRE(rc.torus_scale == 1.0);
        REQUIRE(rc.scheme == "expint1");
        REQUIRE(rc.tau == 1e-3);
        REQUIRE(rc.t_final == 1.0);
        REQUIRE(rc.ic == "sech2sin");
        REQUIRE(rc.snapshots == 2);
        REQUIRE(rc.snapshot_times.empty());
        REQUIRE(rc.out == "out.csv");
        REQUIRE(rc.plot.empty());
        REQUIRE(rc.tau_list.empty());
        REQUIRE(rc.reference == "exact");
        REQUIRE(rc.tau_ref == 1e-6);
        REQUIRE(rc.norms == "h1");
        REQUIRE(rc.nyquist == "default");
        REQUIRE(rc.dealias == false);
        REQUIRE(rc.alpha_policy == "auto");
        REQUIRE(rc.threads == 0);
    }

    SECTION("all keys set") {
        const RunConfig rc = parse_str("k = 128\n"
                                       "torus_scale = 0.5\n"
                                       "scheme = expint2\n"
                                       "tau = 0.002\n"
                                       "t_final = 2.5\n"
                                       "ic = soliton c=2 a=0.25\n"
                                       "snapshots = 5\n"
                                       "snapshot_times = 0,1.25,2.5\n"
                                       "out = run.csv\n"
                                       "plot = run.gp\n"
                                       "tau_list = dyadic:2^-4..2^-6\n"
                                       "reference = finetau\n"
                                       "tau_ref = 1e-05\n"
                                       "norms = l2,h1\n"
                                       "nyquist = paper\n"
                                       "dealias = yes\n"
                                       "alpha_policy = zero\n"
                                       "threads = 3\n");
        REQUIRE(rc.k == 128);
        REQUIRE(rc.torus_scale == 0.5);
        REQUIRE(rc.scheme == "expint2");
        REQUIRE(rc.tau == 0.002);
        REQUIRE(rc.t_final == 2.5);
        REQUIRE(rc.ic == "soliton c=2 a=0.25");
        REQUIRE(rc.snapshots == 5);
        REQUIRE(rc.snapshot_times == "0,1.25,2.5");
        REQUIRE(rc.out == "run.csv");
        REQUIRE(rc.plot == "run.gp");
        REQUIRE(rc.tau_list == "dyadic:2^-4..2^-6");
        REQUIRE(rc.reference == "finetau");
        REQUIRE(rc.tau_ref == 1e-5);
        REQUIRE(rc.norms == "l2,h1");
        REQUIRE(rc.nyquist == "paper");
        REQUIRE(rc.dealias == true);
        REQUIRE(rc.alpha_policy == "zero");
        REQUIRE(rc.threads == 3);
    }

    SECTION("comments, blank lines, and whitespace") {
        const RunConfig rc = parse_str("# run parameters\n"
                                       "\n"
                                       "  k   =  64   # trailing comment\n"
                                       "   \t \n"
                                       "tau=0.5\n");
        REQUIRE(rc.k == 64);
        REQUIRE(rc.tau == 0.5);
    }

    SECTION("later entries win") {
        const RunConfig rc = parse_str("tau = 1\ntau = 0.5\n");
        REQUIRE(rc.tau == 0.5);
    }

    SECTION("boolean spellings") {
        REQUIRE(parse_str("dealias = true").dealias);
        REQUIRE(parse_str("dealias = 1").dealias);
        REQUIRE(parse_str("dealias = on").dealias);
        REQUIRE_FALSE(parse_str("dealias = false").dealias);
        REQUIRE_FALSE(parse_str("dealias = no").dealias);
        REQUIRE_FALSE(parse_str("dealias = 0").dealias);
    }
}

TEST_CASE("config parsing: errors carry 1-based line numbers") {
    REQUIRE(config_error_line("k = 8\n\nbogus_key = 1\n") == 3);
    REQUIRE(config_error_line("k = 8\nno equals sign here\n") == 2);
    REQUIRE(config_error_line("= 5\n") == 1);
    REQUIRE(config_error_line("tau = abc\n") == 1);
    REQUIRE(config_error_line("tau = 1.5x\n") == 1); // trailing characters
    REQUIRE(config_error_line("k = 3.5\n") == 1);
    REQUIRE(config_error_line("dealias = maybe\n") == 1);
    // Comment-only lines still advance the counter.
    REQUIRE(config_error_line("# one\n# two\nbogus = 1\n") == 3);

    try {
        parse_str("bogus_key = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(contains(e.what(), "unknown configuration key 'bogus_key'"));
    }
}

TEST_CASE("config file loading") {
    ScratchDir tmp;
    const std::string path = tmp.path("run.cfg");
    {
        std::ofstream out(path);
        out << "k = 48\nscheme = expint2\n";
    }
    const RunConfig rc = parse_config_file(path);
    REQUIRE(rc.k == 48);
    REQUIRE(rc.scheme == "expint2");

    try {
        parse_config_file(tmp.path("missing.cfg"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(contains(e.what(), "cannot open config file"));
        REQUIRE(e.line == 0);
    }
}

TEST_CASE("tau list grammar") {
    SECTION("dyadic with scale") {
        const std::vector<double> taus = parse_tau_list("dyadic:2^-7..2^-13:x0.5");
        REQUIRE(taus.size() == 7);
        for (int i = 0; i < 7; ++i) REQUIRE(taus[i] == 0.5 * std::ldexp(1.0, -(7 + i)));
    }

    SECTION("reversed exponent range normalizes") {
        REQUIRE(parse_tau_list("dyadic:2^-13..2^-7:x0.5") == parse_tau_list("dyadic:2^-7..2^-13:x0.5"));
    }

    SECTION("dyadic without scale") {
        const std::vector<double> taus = parse_tau_list("dyadic:2^-3..2^-5");
        REQUIRE(taus == std::vector<double>{0.125, 0.0625, 0.03125});
    }

    SECTION("comma list with whitespace") {
        const std::vector<double> taus = parse_tau_list(" 1e-2 , 5e-3,2.5e-3 ");
        REQUIRE(taus == std::vector<double>{1e-2, 5e-3, 2.5e-3});
    }

    SECTION("single value") {
        REQUIRE(parse_tau_list("3e-4") == std::vector<double>{3e-4});
    }

    SECTION("malformed specs") {
        REQUIRE_THROWS_AS(parse_tau_list(""), ConfigError);
        REQUIRE_THROWS_AS(parse_tau_list("   "), ConfigError);
        REQUIRE_THROWS_AS(parse_tau_list("dyadic:2^-3..2^-5:y2"), ConfigError); // bad suffix
        REQUIRE_THROWS_AS(parse_tau_list("dyadic:2^3..2^-5"), ConfigError);     // missing '-'
        REQUIRE_THROWS_AS(parse_tau_list("dyadic:2^-3.2^-5"), ConfigError);     // missing '..'
        REQUIRE_THROWS_AS(parse_tau_list("dyadic:2^-a..2^-5"), ConfigError);    // bad exponent
        REQUIRE_THROWS_AS(parse_tau_list("1e-2,,1e-3"), ConfigError);           // empty entry
        REQUIRE_THROWS_AS(parse_tau_list("abc"), ConfigError);
    }
}

TEST_CASE("trajectory CSV: header and exact read-back") {
    Grid g(8, 1.0);
    RealField f(g);
    for (int j = 0; j < 8; ++j) f.v[j] = std::sin(0.7 * j) - 0.2 * j;

    Trajectory traj;
    traj.snapshots.push_back({0.25, forward_transform(f)});
    for (int j = 0; j < 8; ++j) f.v[j] *= -1.5;
    traj.snapshots.push_back({0.375, forward_transform(f)});

    std::ostringstream os;
    write_trajectory_csv(os, traj);
    const std::vector<std::string> lines = lines_of(os.str());
    REQUIRE(lines.size() == 3);
    REQUIRE(lines[0] == "# t, x_0 ... x_7");

    // 17 significant digits must reproduce every double exactly on read-back.
    for (std::size_t r = 0; r < 2; ++r) {
        const std::vector<double> vals = parse_csv_row(lines[r + 1]);
        REQUIRE(vals.size() == 9);
        REQUIRE(vals[0] == traj.snapshots[r].t);
        const RealField back = inverse_transform(traj.snapshots[r].u);
        for (int j = 0; j < 8; ++j) REQUIRE(vals[j + 1] == back.v[j]);
    }

    SECTION("empty trajectory writes a stub header") {
        std::ostringstream empty;
        write_trajectory_csv(empty, Trajectory{});
        REQUIRE(empty.str() == "# t, x_0 ... x_{-1} (no snapshots)\n");
    }
}

namespace {

// A small study assembled by hand so the CSV and plot formats are pinned
// without running any solver.
ConvergenceStudy sample_study() {
    ConvergenceStudy st;
    st.records.push_back({"expint1", 2e-3, {{NormKind::H1, 3.1e-3}, {NormKind::L2, 2.2e-3}}});
    st.records.push_back({"expint1", 1e-3, {{NormKind::H1, 1.55e-3}, {NormKind::L2, 1.1e-3}}});
    st.records.push_back({"expint2", 2e-3, {{NormKind::H1, 4.0e-5}, {NormKind::L2, 3.0e-5}}});
    st.slopes.push_back({"expint1", NormKind::H1, SlopeFit{1.0, 0.44, 2}});
    st.reference = ReferenceKind::FineTau;
    st.tau_ref = 1e-6;
    st.warnings = {"tau = 1 diverged for expint1"};
    return st;
}

} // namespace

TEST_CASE("errors CSV: layout, footers, and rewrite determinism") {
    const ConvergenceStudy st = sample_study();
    std::ostringstream os;
    write_errors_csv(os, st);
    const std::vector<std::string> lines = lines_of(os.str());

    using detail::fmt17;
    REQUIRE(lines.size() == 10);
    REQUIRE(lines[0] == "# scheme, tau, norm, error");
    REQUIRE(lines[1] == "expint1," + fmt17(2e-3) + ",h1," + fmt17(3.1e-3));
    REQUIRE(lines[2] == "expint1," + fmt17(2e-3) + ",l2," + fmt17(2.2e-3));
    REQUIRE(lines[3] == "expint1," + fmt17(1e-3) + ",h1," + fmt17(1.55e-3));
    REQUIRE(lines[4] == "expint1," + fmt17(1e-3) + ",l2," + fmt17(1.1e-3));
    REQUIRE(lines[5] == "expint2," + fmt17(2e-3) + ",h1," + fmt17(4.0e-5));
    REQUIRE(lines[6] == "expint2," + fmt17(2e-3) + ",l2," + fmt17(3.0e-5));
    REQUIRE(lines[7] == "# slope expint1 h1 = " + fmt17(1.0) + " (2 points)");
    REQUIRE(lines[8] == "# reference = finetau tau_ref=" + fmt17(1e-6));
    REQUIRE(lines[9] == "# warning: tau = 1 diverged for expint1");

    SECTION("exact reference omits tau_ref") {
        ConvergenceStudy ex = st;
        ex.reference = ReferenceKind::ExactSoliton;
        ex.warnings.clear();
        std::ostringstream os2;
        write_errors_csv(os2, ex);
        const std::vector<std::string> lines2 = lines_of(os2.str());
        REQUIRE(lines2.back() == "# reference = exact");
    }

    SECTION("rewriting produces identical bytes") {
        std::ostringstream again;
        write_errors_csv(again, st);
        REQUIRE(again.str() == os.str());
    }
}

TEST_CASE("convergence plot script structure") {
    const ConvergenceStudy st = sample_study();
    std::ostringstream os;
    emit_plot_script(os, st, "errs.csv");
    const std::string script = os.str();
    using detail::fmt17;

    REQUIRE(contains(script, "set datafile separator ','"));
    REQUIRE(contains(script, "set logscale xy"));
    // Guides anchor at each series' coarsest record: slope 1 for expint1,
    // slope 2 for expint2, in series discovery order (h1 before l2).
    REQUIRE(contains(script, "g0(x) = " + fmt17(3.1e-3 / 2e-3) + " * x**1"));
    REQUIRE(contains(script, "g1(x) = " + fmt17(2.2e-3 / 2e-3) + " * x**1"));
    REQUIRE(contains(script, "g2(x) = " + fmt17(4.0e-5 / (2e-3 * 2e-3)) + " * x**2"));
    REQUIRE(contains(script, "g3(x) = " + fmt17(3.0e-5 / (2e-3 * 2e-3)) + " * x**2"));
    REQUIRE(contains(script, "g0(x) with lines dt 2"));
    REQUIRE(contains(script, "g2(x) with lines dt 4"));
    REQUIRE(contains(script,
                     "'errs.csv' using 2:(strcol(1) eq 'expint1' && strcol(3) eq 'h1' ? column(4) : 1/0)"));
    REQUIRE(contains(script,
                     "'errs.csv' using 2:(strcol(1) eq 'expint2' && strcol(3) eq 'l2' ? column(4) : 1/0)"));
    REQUIRE(contains(script, "title 'expint1 h1'"));
    REQUIRE(contains(script, "pause -1"));
}

TEST_CASE("snapshot plot script structure") {
    Grid g(8, 1.0);
    RealField f(g);
    for (int j = 0; j < 8; ++j) f.v[j] = 0.1 * j;
    Trajectory traj;
    traj.snapshots.push_back({0.25, forward_transform(f)});
    traj.snapshots.push_back({0.375, forward_transform(f)});

    std::ostringstream os;
    emit_plot_script(os, traj, "traj.csv");
    const std::string script = os.str();
    using detail::fmt17;

    REQUIRE(contains(script, "x0 = " + fmt17(g.x(0))));
    REQUIRE(contains(script, "h  = " + fmt17(g.spacing())));
    REQUIRE(contains(script, "K  = 8"));
    REQUIRE(contains(script, "times = '" + fmt17(0.25) + " " + fmt17(0.375) + "'"));
    REQUIRE(contains(script, "for [r=0:1] 'traj.csv' matrix every :::(r)::(r)"));
    // Matrix cell 0 is the time column; samples start at cell 1.
    REQUIRE(contains(script, "($1 == 0 ? 1/0 : x0 + ($1 - 1) * h):3"));
    REQUIRE(contains(script, "pause -1"));
}

TEST_CASE("CLI option helpers") {
    using namespace kdvexp::detail;

    SECTION("scheme lists") {
        REQUIRE(parse_scheme_list("expint1") == std::vector<SchemeVariant>{SchemeVariant::ExpInt1});
        REQUIRE(parse_scheme_list("expint2") == std::vector<SchemeVariant>{SchemeVariant::ExpInt2});
        REQUIRE(parse_scheme_list("both") ==
                std::vector<SchemeVariant>{SchemeVariant::ExpInt1, SchemeVariant::ExpInt2});
        REQUIRE_THROWS_AS(parse_scheme_single("rk4"), ConfigError);
    }

    SECTION("nyquist and alpha policies accept both spellings") {
        REQUIRE(parse_nyquist("default") == NyquistPolicy::ZeroNyquist);
        REQUIRE(parse_nyquist("zeronyquist") == NyquistPolicy::ZeroNyquist);
        REQUIRE(parse_nyquist("paper") == NyquistPolicy::PaperExact);
        REQUIRE(parse_nyquist("paperexact") == NyquistPolicy::PaperExact);
        REQUIRE_THROWS_AS(parse_nyquist("strict"), ConfigError);
        REQUIRE(parse_alpha_policy("auto") == AlphaPolicy::AutoShift);
        REQUIRE(parse_alpha_policy("autoshift") == AlphaPolicy::AutoShift);
        REQUIRE(parse_alpha_policy("zero") == AlphaPolicy::RequireZeroMean);
        REQUIRE(parse_alpha_policy("requirezeromean") == AlphaPolicy::RequireZeroMean);
        REQUIRE_THROWS_AS(parse_alpha_policy("none"), ConfigError);
    }

    SECTION("norm lists dedupe and validate") {
        REQUIRE(parse_norms("l2,h1,h2") ==
                std::vector<NormKind>{NormKind::L2, NormKind::H1, NormKind::H2});
        REQUIRE(parse_norms("h1,h1") == std::vector<NormKind>{NormKind::H1});
        REQUIRE_THROWS_AS(parse_norms("h3"), ConfigError);
        REQUIRE_THROWS_AS(parse_norms(""), ConfigError);
    }

    SECTION("initial-condition specs") {
        REQUIRE(parse_ic("sech2sin").kind == InitialCondition::Kind::Sech2Sin);
        const InitialCondition sol = parse_ic("soliton c=2 a=0.5");
        REQUIRE(sol.kind == InitialCondition::Kind::Soliton);
        REQUIRE(sol.soliton.c == 2.0);
        REQUIRE(sol.soliton.a == 0.5);
        const InitialCondition bare = parse_ic("soliton");
        REQUIRE(bare.soliton.c == 1.0);
        REQUIRE(bare.soliton.a == 0.0);
        REQUIRE_THROWS_AS(parse_ic(""), ConfigError);
        REQUIRE_THROWS_AS(parse_ic("sech2sin extra"), ConfigError);
        REQUIRE_THROWS_AS(parse_ic("gaussian"), ConfigError);
        REQUIRE_THROWS_AS(parse_ic("soliton c=0"), ConfigError);
        REQUIRE_THROWS_AS(parse_ic("soliton q=1"), ConfigError);
        REQUIRE_THROWS_AS(parse_ic("soliton c:2"), ConfigError);
    }

    SECTION("snapshot time lists") {
        REQUIRE(parse_time_list("0, 0.5,1.0") == std::vector<double>{0.0, 0.5, 1.0});
        REQUIRE_THROWS_AS(parse_time_list("0,x"), ConfigError);
    }

    SECTION("plot scripts reference sibling CSVs by file name") {
        REQUIRE(csv_path_for_plot("dir/a.csv", "dir/a.gp") == "a.csv");
        REQUIRE(csv_path_for_plot("a.csv", "a.gp") == "a.csv");
        REQUIRE(csv_path_for_plot("one/a.csv", "two/a.gp") == "one/a.csv");
    }
}

TEST_CASE("cli: selftest subcommand") {
    CaptureStream out(std::cout);
    REQUIRE(cli_main({"selftest"}) == 0);
    REQUIRE(contains(out.text(), "selftest: all checks passed"));
}

TEST_CASE("cli: usage and configuration errors exit 1") {
    CaptureStream out(std::cout);
    CaptureStream err(std::cerr);

    REQUIRE(cli_main({}) == 1);                               // subcommand required
    REQUIRE(cli_main({"bogus"}) == 1);                        // unknown subcommand
    REQUIRE(cli_main({"simulate", "--k", "many"}) == 1);      // non-integer option
    REQUIRE(cli_main({"--help"}) == 0);                       // help is not an error

    REQUIRE(cli_main({"converge", "--k", "32"}) == 1);
    REQUIRE(contains(err.text(), "tau_list"));

    REQUIRE(cli_main({"simulate", "--scheme", "both"}) == 1);
    REQUIRE(contains(err.text(), "one scheme"));

    ScratchDir tmp;
    REQUIRE(cli_main({"simulate", "--config", tmp.path("missing.cfg")}) == 1);
    REQUIRE(contains(err.text(), "cannot open config file"));

    const std::string bad = tmp.path("bad.cfg");
    {
        std::ofstream cfg(bad);
        cfg << "k = 32\nbogus = 1\n";
    }
    REQUIRE(cli_main({"simulate", "--config", bad}) == 1);
    REQUIRE(contains(err.text(), "unknown configuration key 'bogus'"));
    REQUIRE(contains(err.text(), "(line 2)"));
}

TEST_CASE("cli: simulate writes snapshots and a plot script") {
    ScratchDir tmp;
    const std::string csv = tmp.path("traj.csv");
    const std::string gp = tmp.path("traj.gp");

    CaptureStream out(std::cout);
    REQUIRE(cli_main({"simulate", "--k", "32", "--tau", "1e-2", "--t-final", "0.05", "--snapshots", "3",
                      "--out", csv, "--plot", gp}) == 0);
    REQUIRE(contains(out.text(), "wrote " + csv));
    REQUIRE(contains(out.text(), "3 snapshots, 5 steps"));

    const std::vector<std::string> lines = lines_of(slurp(csv));
    REQUIRE(lines.size() == 4);
    REQUIRE(lines[0] == "# t, x_0 ... x_31");
    // Snapshots land on the first step boundary at or after the requested
    // time, and the row records the actual time: 0.025 -> 0.03 with tau 0.01.
    const double expected_t[3] = {0.0, 0.03, 0.05};
    for (int r = 0; r < 3; ++r) {
        const std::vector<double> vals = parse_csv_row(lines[r + 1]);
        REQUIRE(vals.size() == 33);
        REQUIRE(vals[0] == Approx(expected_t[r]).margin(1e-12));
    }
    const std::string script = slurp(gp);
    REQUIRE(contains(script, "K  = 32"));
    REQUIRE(contains(script, "'traj.csv'")); // sibling file referenced by name

    SECTION("a fractional final step is reported") {
        CaptureStream out2(std::cout);
        REQUIRE(cli_main({"simulate", "--k", "32", "--tau", "2e-2", "--t-final", "0.05", "--snapshots",
                          "1", "--out", csv}) == 0);
        REQUIRE(contains(out2.text(), "3 steps (short final step)"));
    }
}

TEST_CASE("cli: multi-token initial condition reaches the solver") {
    ScratchDir tmp;
    const std::string csv = tmp.path("sol.csv");

    // t_final = 0 runs no steps, so the single row is the sampled initial
    // condition and pins the --ic token join end to end.
    CaptureStream out(std::cout);
    REQUIRE(cli_main({"simulate", "--k", "64", "--torus-scale", "0.1", "--tau", "1e-3", "--t-final", "0",
                      "--snapshots", "1", "--ic", "soliton", "c=2", "a=0.5", "--out", csv}) == 0);

    const std::vector<std::string> lines = lines_of(slurp(csv));
    REQUIRE(lines.size() == 2);
    const std::vector<double> vals = parse_csv_row(lines[1]);
    REQUIRE(vals.size() == 65);
    REQUIRE(vals[0] == 0.0);

    Grid g(64, 0.1);
    const RealField expect = inverse_transform(make_initial(g, InitialCondition::make_soliton(2.0, 0.5)));
    for (int j = 0; j < 64; ++j) REQUIRE(vals[j + 1] == Approx(expect.v[j]).margin(1e-12));
}

TEST_CASE("cli: config file plus flag overrides reproduces the pure-flag run") {
    ScratchDir tmp;
    const std::string cfg = tmp.path("run.cfg");
    {
        std::ofstream out(cfg);
        out << "k = 32\n"
               "tau = 0.02        # overridden on the command line\n"
               "t_final = 0.05\n"
               "snapshots = 3\n";
    }
    const std::string a = tmp.path("a.csv");
    const std::string b = tmp.path("b.csv");

    CaptureStream out(std::cout);
    REQUIRE(cli_main({"simulate", "--config=" + cfg, "--tau", "0.01", "--out", a}) == 0);
    REQUIRE(cli_main({"simulate", "--k", "32", "--tau", "0.01", "--t-final", "0.05", "--snapshots", "3",
                      "--out", b}) == 0);

    const std::string bytes_a = slurp(a);
    REQUIRE(!bytes_a.empty());
    REQUIRE(bytes_a == slurp(b));
}

TEST_CASE("cli: converge writes records, slopes, and is thread-count independent") {
    ScratchDir tmp;
    const std::string csv = tmp.path("errs.csv");
    const std::string gp = tmp.path("errs.gp");

    const std::vector<std::string> base = {"converge", "--k",        "32",     "--t-final", "0.02",
                                           "--tau-list", "2e-3,1e-3", "--reference", "finetau",
                                           "--tau-ref", "2e-5",      "--scheme", "both",
                                           "--norms",   "h1"};

    auto with = [&](std::vector<std::string> args, const std::string& out_path,
                    const std::string& threads) {
        args.insert(args.end(), {"--out", out_path, "--threads", threads});
        return args;
    };

    CaptureStream out(std::cout);
    CaptureStream err(std::cerr);
    {
        std::vector<std::string> args = with(base, csv, "1");
        args.insert(args.end(), {"--plot", gp});
        REQUIRE(cli_main(args) == 0);
    }
    REQUIRE(contains(out.text(), "slope expint1 h1 ="));
    REQUIRE(contains(out.text(), "slope expint2 h1 ="));
    REQUIRE(contains(out.text(), "wrote " + csv));

    const std::vector<std::string> lines = lines_of(slurp(csv));
    REQUIRE(lines[0] == "# scheme, tau, norm, error");
    int data_rows = 0;
    for (const std::string& l : lines)
        if (!l.empty() && l[0] != '#') ++data_rows;
    REQUIRE(data_rows == 4); // two schemes x two taus, one norm
    REQUIRE(contains(slurp(csv), "# reference = finetau tau_ref=" + detail::fmt17(2e-5)));
    REQUIRE(contains(slurp(gp), "set logscale xy"));

    SECTION("outputs are byte-identical across thread counts") {
        const std::string c4 = tmp.path("errs4.csv");
        REQUIRE(cli_main(with(base, c4, "4")) == 0);
        REQUIRE(slurp(c4) == slurp(csv));
    }
}
