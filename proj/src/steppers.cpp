#include "kou2d/steppers.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace kou2d {

const std::array<Scheme, 7>& all_schemes() {
    static const std::array<Scheme, 7> schemes = {Scheme::CNFE, Scheme::CNFI, Scheme::IETR, Scheme::CNAB,
                                                  Scheme::MCS,  Scheme::MCS2, Scheme::SC2A};
    return schemes;
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::CNFE: return "CNFE";
        case Scheme::CNFI: return "CNFI";
        case Scheme::IETR: return "IETR";
        case Scheme::CNAB: return "CNAB";
        case Scheme::MCS: return "MCS";
        case Scheme::MCS2: return "MCS2";
        case Scheme::SC2A: return "SC2A";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (Scheme s : all_schemes())
        if (to_string(s) == upper) return s;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

bool is_two_step(Scheme s) { return s == Scheme::CNAB || s == Scheme::MCS2 || s == Scheme::SC2A; }

bool is_adi(Scheme s) { return s == Scheme::MCS || s == Scheme::MCS2 || s == Scheme::SC2A; }

double default_theta(Scheme s) {
    switch (s) {
        case Scheme::MCS:
        case Scheme::MCS2: return 1.0 / 3.0;
        case Scheme::SC2A: return 0.75;
        default: return 0.0;
    }
}

int fair_steps(Scheme s, int N) {
    if (N < 1) throw std::invalid_argument("fair_steps: N must be positive");
    switch (s) {
        case Scheme::CNFI:
        case Scheme::MCS: return N;
        case Scheme::IETR:
        case Scheme::MCS2: return 3 * N / 2;
        case Scheme::CNFE:
        case Scheme::CNAB:
        case Scheme::SC2A: return 2 * N;
    }
    return N;
}

void SchemeSpec::validate() const {
    if (N < 1) throw std::invalid_argument("SchemeSpec: N must be positive");
    if (l < 1) throw std::invalid_argument("SchemeSpec: l must be at least 1");
    if (is_adi(scheme) && !(theta > 0.0)) throw std::invalid_argument("SchemeSpec: theta must be positive");
}

SchemeSpec make_spec(Scheme s, int N) {
    SchemeSpec spec;
    spec.scheme = s;
    spec.theta = default_theta(s);
    spec.l = 2;
    spec.N = N;
    spec.validate();
    return spec;
}

GridFunction run(const SchemeSpec& spec, PideProblem& problem, const std::function<void(int, int)>& progress) {
    return run(spec, problem, problem.initial_values(), progress);
}

GridFunction run_steps(const SchemeSpec& spec, PideProblem& problem, int steps,
                       const std::function<void(int, int)>& progress) {
    if (steps < 1) throw std::invalid_argument("run_steps: steps must be positive");
    const GridFunction v0 = problem.initial_values();
    Stepper<PideProblem> stepper(problem, spec, problem.params().T / steps);
    GridFunction out(v0.m1(), v0.m2());
    stepper.run(v0.values(), steps, out.values(), progress);
    return out;
}

GridFunction run(const SchemeSpec& spec, PideProblem& problem, const GridFunction& v0,
                 const std::function<void(int, int)>& progress) {
    const int steps = spec.steps();
    Stepper<PideProblem> stepper(problem, spec, problem.params().T / steps);
    GridFunction out(v0.m1(), v0.m2());
    stepper.run(v0.values(), steps, out.values(), progress);
    return out;
}

ScalarAmplification scalar_amplification(const SchemeSpec& spec, std::complex<double> z0, std::complex<double> z1,
                                         std::complex<double> z2, std::complex<double> w0) {
    ScalarTestProblem p{z0, z1, z2, w0};
    Stepper<ScalarTestProblem> stepper(p, spec, 1.0);
    using C = std::complex<double>;
    const C one[1] = {1.0};
    const C zero[1] = {0.0};
    C out[1];
    ScalarAmplification a{};
    stepper.step(one, zero, out);
    a.r1 = out[0];
    if (is_two_step(spec.scheme)) {
        stepper.step(zero, one, out);
        a.r0 = out[0];
    }
    return a;
}

}  // namespace kou2d
