#pragma once

#include <array>
#include <complex>
#include <concepts>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kou2d/grid.hpp"
#include "kou2d/problem.hpp"

namespace kou2d {

enum class Scheme { CNFE, CNFI, IETR, CNAB, MCS, MCS2, SC2A };

const std::array<Scheme, 7>& all_schemes();
std::string to_string(Scheme s);
/// Case-insensitive scheme name; throws std::invalid_argument otherwise.
Scheme parse_scheme(std::string_view name);

bool is_two_step(Scheme s);
bool is_adi(Scheme s);
/// 1/3 for MCS and MCS2, 3/4 for SC2A, 0 (unused) for the IMEX schemes.
double default_theta(Scheme s);
/// Step count N' giving all schemes comparable work: N, floor(3N/2) or 2N.
int fair_steps(Scheme s, int N);

struct SchemeSpec {
    Scheme scheme = Scheme::MCS2;
    double theta = 1.0 / 3.0;
    int l = 2;  // fixed-point sweeps of CNFI
    int N = 1;

    int steps() const { return fair_steps(scheme, N); }
    void validate() const;
};

/// Spec with the default theta and l for `s`.
SchemeSpec make_spec(Scheme s, int N);

/// Parameter of the MCS step that starts MCS2 and SC2A.
inline constexpr double kStartTheta = 1.0 / 3.0;

/// What a time stepper needs from a semidiscrete problem V' = (A^(M) + A1 + A2 + A^(J)) V.
template <typename P>
concept SplitProblem = requires(P& p, const P& cp, std::span<const typename P::value_type> v,
                                std::span<typename P::value_type> out, double scale, int dir) {
    { cp.size() } -> std::convertible_to<std::size_t>;
    cp.apply_mixed(v, out);
    cp.apply_direction(dir, v, out);
    cp.apply_diffusion(v, out);
    p.apply_jump(v, out);
    p.prepare_directional(scale);
    p.solve_directional(dir, v, out);
    p.prepare_implicit(scale);
    p.solve_implicit(v, out);
};

/// The scalar test equation V' = (mu0 + mu1 + mu2 + lambda0) V; with dt = 1 the
/// quadruple holds z_j = mu_j dt and w0 = lambda0 dt directly.
struct ScalarTestProblem {
    using value_type = std::complex<double>;
    using span_in = std::span<const value_type>;
    using span_out = std::span<value_type>;

    value_type z0, z1, z2, w0;
    double dir_scale = 0.0;
    double implicit_scale = 0.0;

    std::size_t size() const { return 1; }
    void apply_mixed(span_in v, span_out out) const { out[0] = z0 * v[0]; }
    void apply_direction(int dir, span_in v, span_out out) const { out[0] = (dir == 1 ? z1 : z2) * v[0]; }
    void apply_diffusion(span_in v, span_out out) const { out[0] = (z0 + z1 + z2) * v[0]; }
    void apply_jump(span_in v, span_out out) const { out[0] = w0 * v[0]; }
    void prepare_directional(double scale) { dir_scale = scale; }
    void solve_directional(int dir, span_in rhs, span_out out) const {
        out[0] = rhs[0] / (1.0 - dir_scale * (dir == 1 ? z1 : z2));
    }
    void prepare_implicit(double scale) { implicit_scale = scale; }
    void solve_implicit(span_in rhs, span_out x) const { x[0] = rhs[0] / (1.0 - implicit_scale * (z0 + z1 + z2)); }
};

/// Advances a split problem with one of the seven schemes at a fixed step dt.
/// All stage vectors are allocated once.
template <SplitProblem P>
class Stepper {
public:
    using T = typename P::value_type;
    using In = std::span<const T>;
    using Out = std::span<T>;

    Stepper(P& problem, SchemeSpec spec, double dt) : p_(problem), spec_(spec), dt_(dt), n_(problem.size()) {
        spec_.validate();
        for (auto* w : {&w0_, &w1_, &w2_, &w3_, &w4_, &w5_, &w6_, &w7_}) w->assign(n_, T{});
    }

    const SchemeSpec& spec() const { return spec_; }
    double dt() const { return dt_; }

    /// First step V^0 -> V^1: IMEX Euler for the IMEX schemes, MCS otherwise.
    void start(In v0, Out v1) {
        switch (spec_.scheme) {
            case Scheme::MCS: step_mcs(v0, v1, spec_.theta); break;
            case Scheme::MCS2:
            case Scheme::SC2A: step_mcs(v0, v1, kStartTheta); break;
            default: imex_euler_start(v0, v1); break;
        }
    }

    /// Main step V^{n-1} (and V^{n-2} for two-step schemes) -> V^n.
    void step(In prev, In prev2, Out out) {
        switch (spec_.scheme) {
            case Scheme::CNFE: step_cnfe(prev, out); break;
            case Scheme::CNFI: step_cnfi(prev, out); break;
            case Scheme::IETR: step_ietr(prev, out); break;
            case Scheme::CNAB: step_cnab(prev, prev2, out); break;
            case Scheme::MCS: step_mcs(prev, out, spec_.theta); break;
            case Scheme::MCS2: step_mcs2(prev, prev2, out); break;
            case Scheme::SC2A: step_sc2a(prev, prev2, out); break;
        }
    }

    /// Runs `steps` steps from v0 (startup included) and writes V^steps to out.
    void run(In v0, int steps, Out out, const std::function<void(int, int)>& progress = {}) {
        if (steps < 1) throw std::invalid_argument("Stepper::run: steps must be positive");
        std::vector<T> a(v0.begin(), v0.end()), b(n_), c(n_);
        std::vector<T>* older = &a;
        std::vector<T>* prev = &b;
        std::vector<T>* next = &c;
        start(*older, *prev);
        if (progress) progress(1, steps);
        for (int n = 2; n <= steps; ++n) {
            step(*prev, *older, *next);
            std::swap(older, prev);
            std::swap(prev, next);
            if (progress) progress(n, steps);
        }
        std::copy(prev->begin(), prev->end(), out.begin());
    }

    void imex_euler_start(In v0, Out v1) {
        const double h = 0.5 * dt_;
        p_.prepare_implicit(h);
        auto& jw = w0_;
        auto& rhs = w1_;
        auto& half = w2_;
        p_.apply_jump(v0, jw);
        for (std::size_t i = 0; i < n_; ++i) rhs[i] = v0[i] + h * jw[i];
        std::copy(v0.begin(), v0.end(), half.begin());
        p_.solve_implicit(rhs, half);
        p_.apply_jump(half, jw);
        for (std::size_t i = 0; i < n_; ++i) rhs[i] = half[i] + h * jw[i];
        std::copy(half.begin(), half.end(), v1.begin());
        p_.solve_implicit(rhs, v1);
    }

    void step_cnfe(In v, Out out) {
        const double h = 0.5 * dt_;
        p_.prepare_implicit(h);
        auto& dv = w0_;
        auto& jv = w1_;
        auto& rhs = w2_;
        p_.apply_diffusion(v, dv);
        p_.apply_jump(v, jv);
        for (std::size_t i = 0; i < n_; ++i) rhs[i] = v[i] + h * dv[i] + dt_ * jv[i];
        std::copy(v.begin(), v.end(), out.begin());
        p_.solve_implicit(rhs, out);
    }

    void step_cnfi(In v, Out out) {
        const double h = 0.5 * dt_;
        p_.prepare_implicit(h);
        auto& dv = w0_;
        auto& jy = w1_;
        auto& base = w2_;
        auto& rhs = w3_;
        p_.apply_diffusion(v, dv);
        p_.apply_jump(v, jy);
        for (std::size_t i = 0; i < n_; ++i) base[i] = v[i] + h * dv[i] + h * jy[i];
        std::copy(v.begin(), v.end(), out.begin());
        for (int k = 1; k <= spec_.l; ++k) {
            if (k > 1) p_.apply_jump(In(out.data(), n_), jy);
            for (std::size_t i = 0; i < n_; ++i) rhs[i] = base[i] + h * jy[i];
            p_.solve_implicit(rhs, out);
        }
    }

    void step_ietr(In v, Out out) {
        const double h = 0.5 * dt_;
        p_.prepare_implicit(h);
        auto& dv = w0_;
        auto& jv = w1_;
        auto& y0 = w2_;
        auto& rhs = w3_;
        p_.apply_diffusion(v, dv);
        p_.apply_jump(v, jv);
        for (std::size_t i = 0; i < n_; ++i) {
            y0[i] = v[i] + dt_ * (dv[i] + jv[i]);
            rhs[i] = y0[i] - v[i];
        }
        p_.apply_jump(rhs, jv);
        for (std::size_t i = 0; i < n_; ++i) rhs[i] = y0[i] + h * jv[i] - h * dv[i];
        std::copy(v.begin(), v.end(), out.begin());
        p_.solve_implicit(rhs, out);
    }

    void step_cnab(In v1, In v2, Out out) {
        const double h = 0.5 * dt_;
        p_.prepare_implicit(h);
        auto& dv = w0_;
        auto& comb = w1_;
        auto& jc = w2_;
        auto& rhs = w3_;
        p_.apply_diffusion(v1, dv);
        for (std::size_t i = 0; i < n_; ++i) comb[i] = 1.5 * v1[i] - 0.5 * v2[i];
        p_.apply_jump(comb, jc);
        for (std::size_t i = 0; i < n_; ++i) rhs[i] = v1[i] + h * dv[i] + dt_ * jc[i];
        std::copy(v1.begin(), v1.end(), out.begin());
        p_.solve_implicit(rhs, out);
    }

    void step_mcs(In v, Out out, double theta) {
        const double td = theta * dt_;
        p_.prepare_directional(td);
        auto& a1v = w0_;
        auto& a2v = w1_;
        auto& y0 = w2_;
        auto& y = w3_;
        auto& d = w4_;
        auto& t0 = w5_;
        auto& t1 = w6_;
        p_.apply_mixed(v, t0);
        p_.apply_jump(v, t1);
        p_.apply_direction(1, v, a1v);
        p_.apply_direction(2, v, a2v);
        for (std::size_t i = 0; i < n_; ++i) y0[i] = v[i] + dt_ * (t0[i] + t1[i] + a1v[i] + a2v[i]);
        stabilizing_corrections(y0, a1v, a2v, td, y);
        for (std::size_t i = 0; i < n_; ++i) d[i] = y[i] - v[i];
        p_.apply_mixed(d, t0);
        p_.apply_jump(d, t1);
        for (std::size_t i = 0; i < n_; ++i) y0[i] += 0.5 * dt_ * (t0[i] + t1[i]);
        add_directional_part(d, 0.5 - theta, y0, t0);
        stabilizing_corrections(y0, a1v, a2v, td, out);
    }

    void step_mcs2(In v1, In v2, Out out) {
        const double theta = spec_.theta;
        const double td = theta * dt_;
        p_.prepare_directional(td);
        auto& a1v = w0_;
        auto& a2v = w1_;
        auto& y0 = w2_;
        auto& y = w3_;
        auto& d = w4_;
        auto& t0 = w5_;
        auto& t1 = w6_;
        p_.apply_mixed(v1, t0);
        p_.apply_direction(1, v1, a1v);
        p_.apply_direction(2, v1, a2v);
        for (std::size_t i = 0; i < n_; ++i) d[i] = 1.5 * v1[i] - 0.5 * v2[i];
        p_.apply_jump(d, t1);
        for (std::size_t i = 0; i < n_; ++i) y0[i] = v1[i] + dt_ * (t0[i] + a1v[i] + a2v[i] + t1[i]);
        stabilizing_corrections(y0, a1v, a2v, td, y);
        for (std::size_t i = 0; i < n_; ++i) d[i] = y[i] - v1[i];
        p_.apply_mixed(d, t0);
        for (std::size_t i = 0; i < n_; ++i) y0[i] += 0.5 * dt_ * t0[i];
        add_directional_part(d, 0.5 - theta, y0, t0);
        stabilizing_corrections(y0, a1v, a2v, td, out);
    }

    void step_sc2a(In v1, In v2, Out out) {
        const double theta = spec_.theta;
        const double td = theta * dt_;
        p_.prepare_directional(td);
        const double bh1 = 1.5, bh2 = -0.5;
        const double bc1 = 1.5 - theta, bc2 = -0.5 + theta;
        auto& a1v = w0_;
        auto& a2v = w1_;
        auto& y0 = w2_;
        auto& comb = w3_;
        auto& t0 = w4_;
        auto& t1 = w5_;
        for (std::size_t i = 0; i < n_; ++i) comb[i] = bh1 * v1[i] + bh2 * v2[i];
        p_.apply_mixed(comb, t0);
        p_.apply_jump(comb, t1);
        for (std::size_t i = 0; i < n_; ++i) y0[i] = v1[i] + dt_ * (t0[i] + t1[i]);
        for (std::size_t i = 0; i < n_; ++i) comb[i] = bc1 * v1[i] + bc2 * v2[i];
        add_directional_part(comb, 1.0, y0, t0);
        p_.apply_direction(1, v1, a1v);
        p_.apply_direction(2, v1, a2v);
        stabilizing_corrections(y0, a1v, a2v, td, out);
    }

private:
    // y0 += dt * c * (A1 + A2) d, with `tmp` as scratch.
    void add_directional_part(In d, double c, std::vector<T>& y0, std::vector<T>& tmp) {
        const double f = c * dt_;
        if (f == 0.0) return;
        p_.apply_direction(1, d, tmp);
        for (std::size_t i = 0; i < n_; ++i) y0[i] += f * tmp[i];
        p_.apply_direction(2, d, tmp);
        for (std::size_t i = 0; i < n_; ++i) y0[i] += f * tmp[i];
    }

    // Y_j = Y_{j-1} + td A_j (Y_j - V) for j = 1, 2, given A_j V.
    void stabilizing_corrections(In y0, In a1v, In a2v, double td, Out out) {
        auto& rhs = w7_;
        for (std::size_t i = 0; i < n_; ++i) rhs[i] = y0[i] - td * a1v[i];
        p_.solve_directional(1, rhs, out);
        for (std::size_t i = 0; i < n_; ++i) rhs[i] = out[i] - td * a2v[i];
        p_.solve_directional(2, rhs, out);
    }

    P& p_;
    SchemeSpec spec_;
    double dt_;
    std::size_t n_;
    std::vector<T> w0_, w1_, w2_, w3_, w4_, w5_, w6_, w7_;
};

/// V^{N'} at t = T starting from the cell-averaged payoff.
GridFunction run(const SchemeSpec& spec, PideProblem& problem, const std::function<void(int, int)>& progress = {});

/// V after exactly `steps` steps of size T / steps (startup included).
GridFunction run_steps(const SchemeSpec& spec, PideProblem& problem, int steps,
                       const std::function<void(int, int)>& progress = {});

/// Same as run, from a given initial vector.
GridFunction run(const SchemeSpec& spec, PideProblem& problem, const GridFunction& v0,
                 const std::function<void(int, int)>& progress = {});

/// Amplification of one main step on the scalar test equation: R for one-step
/// schemes, (R1, R0) for two-step schemes (R0 = 0 for one-step schemes).
struct ScalarAmplification {
    std::complex<double> r1;
    std::complex<double> r0;
};
ScalarAmplification scalar_amplification(const SchemeSpec& spec, std::complex<double> z0, std::complex<double> z1,
                                         std::complex<double> z2, std::complex<double> w0);

}  // namespace kou2d
