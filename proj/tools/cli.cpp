#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "kou2d/analysis.hpp"
#include "kou2d/jumpint.hpp"
#include "kou2d/mc_oracle.hpp"
#include "kou2d/stability.hpp"
#include "kou2d/steppers.hpp"

namespace kou2d::cli {

namespace {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Options shared by all subcommands; subcommands fall through to the parent.
struct RunConfig {
    std::string set = "set1";
    std::map<std::string, double> overrides;
    int m = 0;
    int m2 = 0;
    std::string scheme = "mcs2";
    int N = 0;
    double theta = 0.0;
    int l = 2;
    double tol = 1e-10;
    int max_iter = 1000;
    int threads = 0;
    std::string output;
    std::uint64_t seed = 42;
    bool verbose = false;
};

struct PriceArgs {
    std::vector<std::string> spots;
};

struct ConvergeArgs {
    std::vector<std::string> schemes;
    std::vector<int> Ns = {20, 40, 80, 160};
    bool greeks = false;
    bool deterministic = false;
    bool no_cache = false;
};

struct StabilityArgs {
    std::vector<std::string> parts;
    int samples = 10000;
    int n_max = 100;
    double gamma = 1.0;
    double w0_max = 0.1;
    double theta = 0.0;
};

struct McArgs {
    std::vector<std::string> spots;
    long paths = 1'000'000;
    bool antithetic = false;
};

struct BenchArgs {
    std::vector<int> ms = {100, 200, 300, 400, 500};
    int repeats = 5;
};

struct Spot {
    double s1;
    double s2;
};

Spot parse_spot(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw ValidationError("spot '" + text + "' must be given as s1,s2");
    try {
        std::size_t used1 = 0, used2 = 0;
        const std::string a = text.substr(0, comma);
        const std::string b = text.substr(comma + 1);
        Spot s{std::stod(a, &used1), std::stod(b, &used2)};
        if (used1 != a.size() || used2 != b.size()) throw std::invalid_argument("trailing characters");
        return s;
    } catch (const std::exception&) {
        throw ValidationError("spot '" + text + "' is not a pair of numbers");
    }
}

KouParams resolve_params(const RunConfig& cfg) {
    KouParams p;
    try {
        p = parameter_set(cfg.set).params;
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    for (const auto& [key, value] : cfg.overrides) {
        static const std::map<std::string, double KouParams::*> fields = {
            {"sigma1", &KouParams::sigma1}, {"sigma2", &KouParams::sigma2}, {"r", &KouParams::r},
            {"rho", &KouParams::rho},       {"lambda", &KouParams::lambda}, {"p1", &KouParams::p1},
            {"p2", &KouParams::p2},         {"eta_p1", &KouParams::eta_p1}, {"eta_q1", &KouParams::eta_q1},
            {"eta_p2", &KouParams::eta_p2}, {"eta_q2", &KouParams::eta_q2}, {"K", &KouParams::K},
            {"T", &KouParams::T},           {"S_max", &KouParams::S_max}};
        p.*fields.at(key) = value;
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    return p;
}

std::string set_label(const RunConfig& cfg) {
    // Overridden parameters are still keyed separately in the cache via the parameter hash.
    return cfg.overrides.empty() ? cfg.set : cfg.set + "+";
}

SchemeSpec resolve_spec(const RunConfig& cfg) {
    if (cfg.N < 1) throw ValidationError("--n must be a positive step count");
    Scheme s;
    try {
        s = parse_scheme(cfg.scheme);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    SchemeSpec spec = make_spec(s, cfg.N);
    if (cfg.theta > 0.0) spec.theta = cfg.theta;
    spec.l = cfg.l;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    return spec;
}

void require_grid(const RunConfig& cfg) {
    if (cfg.m < 2) throw ValidationError("--m must be at least 2");
    if (cfg.m2 != 0 && cfg.m2 < 2) throw ValidationError("--m2 must be at least 2");
}

SolverOptions solver_options(const RunConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw ValidationError("--tol must be positive");
    if (cfg.max_iter < 1) throw ValidationError("--max-iter must be positive");
    return {cfg.tol, cfg.max_iter};
}

// Writes to --output when given, else to `out`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& out) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ValidationError("cannot open output file '" + path + "'");
        }
        stream_ = path.empty() ? &out : &file_;
        *stream_ << std::setprecision(17);
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

std::string fixed4(double x) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << x;
    return s.str();
}

void log_counters(const RunConfig& cfg, const PideProblem& p, std::ostream& err) {
    if (!cfg.verbose) return;
    const SolverCounters& c = p.counters();
    err << "integral evaluations: " << c.jump_evaluations << ", tridiagonal solves: " << c.tri_solves
        << ", BiCGSTAB solves: " << c.cn_solves << " (" << c.cn_iterations << " iterations, max residual "
        << c.cn_max_residual << ")\n";
}

int cmd_price(const RunConfig& cfg, const PriceArgs& args, std::ostream& out, std::ostream& err) {
    require_grid(cfg);
    const KouParams params = resolve_params(cfg);
    const SchemeSpec spec = resolve_spec(cfg);
    std::vector<Spot> spots;
    for (const auto& s : args.spots) spots.push_back(parse_spot(s));
    if (spots.empty()) spots.push_back({params.K, params.K});
    for (const Spot& s : spots)
        if (!(s.s1 >= 0.0 && s.s1 <= params.S_max && s.s2 >= 0.0 && s.s2 <= params.S_max))
            throw ValidationError("spot outside [0, S_max]^2");

    PideProblem problem(params, cfg.m, cfg.m2 > 0 ? cfg.m2 : cfg.m, solver_options(cfg));
    const GridFunction v = run(spec, problem);
    log_counters(cfg, problem, err);
    for (const Spot& s : spots)
        out << "price(" << fixed4(s.s1) << ", " << fixed4(s.s2)
            << ") = " << fixed4(interpolate_price(v, problem.grid(), s.s1, s.s2)) << '\n';
    if (!cfg.output.empty()) {
        Sink sink(cfg.output, out);
        *sink << "s1,s2,value\n";
        const Grid2D& g = problem.grid();
        for (int j = 0; j <= g.m2(); ++j)
            for (int i = 0; i <= g.m1(); ++i) *sink << g.g1[i] << ',' << g.g2[j] << ',' << v(i, j) << '\n';
    }
    return kSuccess;
}

int cmd_greeks(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    require_grid(cfg);
    const KouParams params = resolve_params(cfg);
    const SchemeSpec spec = resolve_spec(cfg);
    PideProblem problem(params, cfg.m, cfg.m2 > 0 ? cfg.m2 : cfg.m, solver_options(cfg));
    const GridFunction v = run(spec, problem);
    log_counters(cfg, problem, err);
    const Grid2D& g = problem.grid();
    const Greeks gr = greeks(v, g);
    Sink sink(cfg.output, out);
    *sink << "s1,s2,value,delta1,delta2,gamma11,gamma22,gamma12\n";
    for (int j = 0; j <= g.m2(); ++j)
        for (int i = 0; i <= g.m1(); ++i)
            *sink << g.g1[i] << ',' << g.g2[j] << ',' << v(i, j) << ',' << gr.delta1(i, j) << ',' << gr.delta2(i, j)
                  << ',' << gr.gamma11(i, j) << ',' << gr.gamma22(i, j) << ',' << gr.gamma12(i, j) << '\n';
    return kSuccess;
}

int cmd_converge(const RunConfig& cfg, const ConvergeArgs& args, std::ostream& out, std::ostream& err) {
    require_grid(cfg);
    if (cfg.m2 != 0 && cfg.m2 != cfg.m) throw ValidationError("converge uses square grids; omit --m2");
    const KouParams params = resolve_params(cfg);
    std::vector<Scheme> schemes;
    try {
        for (const auto& s : args.schemes) schemes.push_back(parse_scheme(s));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    if (schemes.empty()) schemes.assign(all_schemes().begin(), all_schemes().end());
    if (args.Ns.empty()) throw ValidationError("--ns needs at least one value");
    for (int N : args.Ns)
        if (N < 1) throw ValidationError("--ns values must be positive");
    StudyOptions opts{cfg.threads, solver_options(cfg), !args.no_cache};
    Sink sink(cfg.output, out);
    auto seconds = [&](double s) { return args.deterministic ? 0.0 : s; };
    if (args.greeks) {
        const auto recs = greek_error_study(params, set_label(cfg), cfg.m, schemes, args.Ns, opts);
        *sink << "scheme,m,N,Nprime,greek,error,seconds\n";
        for (const auto& r : recs)
            for (std::size_t q = 0; q < all_greeks().size(); ++q)
                *sink << to_string(r.scheme) << ',' << r.m << ',' << r.N << ',' << r.Nprime << ','
                      << to_string(all_greeks()[q]) << ',' << r.errors[q] << ',' << seconds(r.seconds) << '\n';
        return kSuccess;
    }
    const auto recs = convergence_study(params, set_label(cfg), cfg.m, schemes, args.Ns, opts);
    *sink << "scheme,m,N,Nprime,error,seconds\n";
    for (const auto& r : recs)
        *sink << to_string(r.scheme) << ',' << r.m << ',' << r.N << ',' << r.Nprime << ',' << r.error << ','
              << seconds(r.seconds) << '\n';
    if (cfg.verbose && args.Ns.size() >= 2) {
        for (Scheme s : schemes) {
            std::vector<double> n, e;
            for (const auto& r : recs)
                if (r.scheme == s && r.error > 0.0) {
                    n.push_back(r.N);
                    e.push_back(r.error);
                }
            if (n.size() >= 2) err << to_string(s) << " order " << fixed4(convergence_order(n, e)) << '\n';
        }
    }
    return kSuccess;
}

int cmd_stability(const RunConfig& cfg, const StabilityArgs& args, std::ostream& out, std::ostream&) {
    if (args.samples < 1) throw ValidationError("--samples must be positive");
    if (args.n_max < 1) throw ValidationError("--nmax must be positive");
    if (!(args.gamma > 0.0)) throw ValidationError("--gamma must be positive");
    if (!(args.w0_max > 0.0)) throw ValidationError("--w0-max must be positive");
    std::vector<TheoremPart> parts;
    for (const auto& name : args.parts) {
        bool found = false;
        for (TheoremPart p : all_theorem_parts())
            if (to_string(p) == name) {
                parts.push_back(p);
                found = true;
            }
        if (!found) throw ValidationError("unknown theorem part '" + name + "' (expected 1a..1d, 2a, 2b, 3a, 3b)");
    }
    if (parts.empty()) parts.assign(all_theorem_parts().begin(), all_theorem_parts().end());
    SamplerConfig sc;
    sc.samples = args.samples;
    sc.gamma = args.gamma;
    sc.w0_max = args.w0_max;
    sc.w0_min = std::min(sc.w0_min, args.w0_max);
    sc.l = cfg.l;
    sc.seed = cfg.seed;
    Sink sink(cfg.output, out);
    *sink << "scheme,part,theta,samples,n_max,max_ratio,pass\n";
    bool all_pass = true;
    for (TheoremPart p : parts) {
        const BoundReport r = verify_bounds(p, sc, args.n_max, args.theta);
        all_pass = all_pass && r.passed();
        *sink << scheme_of(p) << ',' << to_string(p) << ',' << r.theta << ',' << r.samples << ',' << r.n_max << ','
              << r.max_ratio << ',' << (r.passed() ? "pass" : "fail") << '\n';
    }
    return all_pass ? kSuccess : kSolverFailure;
}

int cmd_mc(const RunConfig& cfg, const McArgs& args, std::ostream& out, std::ostream&) {
    const KouParams params = resolve_params(cfg);
    if (args.paths < 2) throw ValidationError("--paths must be at least 2");
    std::vector<Spot> spots;
    for (const auto& s : args.spots) spots.push_back(parse_spot(s));
    if (spots.empty()) spots.push_back({params.K, params.K});
    McConfig mc;
    mc.paths = args.paths;
    mc.seed = cfg.seed;
    mc.antithetic = args.antithetic;
    mc.threads = cfg.threads;
    Sink sink(cfg.output, out);
    *sink << "s1,s2,paths,price,stderr\n";
    for (const Spot& s : spots) {
        if (!(s.s1 > 0.0) || !(s.s2 > 0.0)) throw ValidationError("spots must be positive");
        const McResult r = mc_price(params, s.s1, s.s2, mc);
        *sink << s.s1 << ',' << s.s2 << ',' << r.paths << ',' << r.price << ',' << r.std_error << '\n';
    }
    return kSuccess;
}

int cmd_bench(const RunConfig& cfg, const BenchArgs& args, std::ostream& out, std::ostream&) {
    const KouParams params = resolve_params(cfg);
    if (args.repeats < 1) throw ValidationError("--repeats must be positive");
    for (int m : args.ms)
        if (m < 2) throw ValidationError("--ms values must be at least 2");
    Sink sink(cfg.output, out);
    *sink << "m,seconds\n";
    for (int m : args.ms) *sink << m << ',' << benchmark_apply_jump(params, m, args.repeats) << '\n';
    return kSuccess;
}

void add_shared_options(CLI::App& app, RunConfig& cfg) {
    app.add_option("--set", cfg.set, "Parameter set: set1, set2 or set3")->capture_default_str();
    for (const char* name : {"sigma1", "sigma2", "r", "rho", "lambda", "p1", "p2", "eta_p1", "eta_q1", "eta_p2",
                             "eta_q2", "K", "T", "S_max"}) {
        const std::string key = name;
        app.add_option_function<double>(
            "--" + key, [&cfg, key](double v) { cfg.overrides[key] = v; }, "Override parameter " + key);
    }
    app.add_option("--m", cfg.m, "Grid cells per direction (m1 = m2 = m unless --m2 is given)");
    app.add_option("--m2", cfg.m2, "Grid cells in the s2 direction");
    app.add_option("--scheme", cfg.scheme, "Time stepper: cnfe, cnfi, ietr, cnab, mcs, mcs2, sc2a")
        ->capture_default_str();
    app.add_option("--n", cfg.N, "Base number of time steps N (the scheme takes N' steps)");
    app.add_option("--theta", cfg.theta, "Splitting parameter (default per scheme)");
    app.add_option("--l", cfg.l, "Fixed-point sweeps of CNFI")->capture_default_str();
    app.add_option("--tol", cfg.tol, "BiCGSTAB relative residual tolerance")->capture_default_str();
    app.add_option("--max-iter", cfg.max_iter, "BiCGSTAB iteration cap")->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("-o,--output", cfg.output, "Write CSV output to this file");
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_flag("-v,--verbose", cfg.verbose, "Report solver statistics on stderr");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-asset Kou jump-diffusion option pricer", "kou2d"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value configuration file; command-line flags win");

    RunConfig cfg;
    add_shared_options(app, cfg);

    PriceArgs price_args;
    auto* price = app.add_subcommand("price", "Solve the PIDE and report prices at given spots");
    price->add_option("--spot", price_args.spots, "Spot as s1,s2 (repeatable)");

    auto* greeks_cmd = app.add_subcommand("greeks", "Solve the PIDE and write value and Greek surfaces as CSV");

    ConvergeArgs conv_args;
    auto* converge = app.add_subcommand("converge", "Temporal error study against the 3000-step MCS2 reference");
    converge->add_option("--schemes", conv_args.schemes, "Schemes to study (default all)")->delimiter(',');
    converge->add_option("--ns", conv_args.Ns, "Base step counts N")->delimiter(',');
    converge->add_flag("--greeks", conv_args.greeks, "Measure errors on the five Greek surfaces");
    converge->add_flag("--deterministic", conv_args.deterministic, "Write 0 for the wall-time column");
    converge->add_flag("--no-cache", conv_args.no_cache, "Recompute the reference solution");

    StabilityArgs stab_args;
    auto* stability = app.add_subcommand("stability", "Sample the stability bounds of the schemes");
    stability->add_option("--parts", stab_args.parts, "Theorem parts: 1a 1b 1c 1d 2a 2b 3a 3b")->delimiter(',');
    stability->add_option("--samples", stab_args.samples, "Samples per part")->capture_default_str();
    stability->add_option("--nmax", stab_args.n_max, "Largest power checked")->capture_default_str();
    stability->add_option("--gamma", stab_args.gamma, "Mixed-term bound in the sampling condition")
        ->capture_default_str();
    stability->add_option("--w0-max", stab_args.w0_max, "Largest |w0| sampled")->capture_default_str();
    stability->add_option("--stab-theta", stab_args.theta, "theta for parts 2 and 3 (default 1/3 or 1/2)");

    McArgs mc_args;
    auto* mc = app.add_subcommand("mc", "Monte Carlo price with standard error");
    mc->add_option("--spot", mc_args.spots, "Spot as s1,s2 (repeatable)");
    mc->add_option("--paths", mc_args.paths, "Number of paths")->capture_default_str();
    mc->add_flag("--antithetic", mc_args.antithetic, "Use antithetic Gaussian increments");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench-integral", "Time the integral evaluation for several grid sizes");
    bench->add_option("--ms", bench_args.ms, "Grid sizes")->delimiter(',');
    bench->add_option("--repeats", bench_args.repeats, "Timed repetitions per size")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kSuccess : kValidationError;
    }

    try {
        if (*price) return cmd_price(cfg, price_args, out, err);
        if (*greeks_cmd) return cmd_greeks(cfg, out, err);
        if (*converge) return cmd_converge(cfg, conv_args, out, err);
        if (*stability) return cmd_stability(cfg, stab_args, out, err);
        if (*mc) return cmd_mc(cfg, mc_args, out, err);
        if (*bench) return cmd_bench(cfg, bench_args, out, err);
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return kSolverFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kSolverFailure;
    }
    return kValidationError;
}

}  // namespace kou2d::cli
