#include "kou2d/jumpint.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "kou2d/quadrature.hpp"

namespace kou2d {

namespace {

using Accum = long double;

// Below this relative cell width the power-difference form cancels badly; the
// weights are integrated in the scaled variable tau = (s_k - z) / s_k instead.
constexpr double kQuadratureWidth = 0.5;
constexpr int kQuadratureNodes = 16;

void check_eta(const KouParams& p) {
    if (!(p.eta_p1 > 1.0) || !(p.eta_p2 > 1.0)) throw std::invalid_argument("jump coefficients: eta_p must exceed 1");
    if (!(p.eta_q1 > 0.0) || !(p.eta_q2 > 0.0)) throw std::invalid_argument("jump coefficients: eta_q must be positive");
}

// Density prefactors without lambda: q eta_q s^(-eta_q) and p eta_p s^(eta_p).
std::vector<double> psi_factor(const Grid1D& g, double prob, double eta, double sign) {
    std::vector<double> f(g.size(), 0.0);
    for (int i = 1; i <= g.cells(); ++i) f[i] = prob * eta * std::pow(g[i], sign * eta);
    return f;
}

}  // namespace

double zeta_1d(double lo, double hi, double exponent, int a) {
    const double e = a + exponent;
    return (std::pow(hi, e) - std::pow(lo, e)) / e;
}

AxisWeights axis_weights(const Grid1D& g, double exponent) {
    const int m = g.cells();
    AxisWeights w;
    w.w0.assign(static_cast<std::size_t>(m) + 1, 0.0);
    w.w1.assign(static_cast<std::size_t>(m) + 1, 0.0);
    const int first = exponent < 0.0 ? 2 : 1;
    for (int k = first; k <= m; ++k) {
        const double lo = g[k - 1];
        const double hi = g[k];
        const double h = hi - lo;
        const double t = h / hi;
        if (t <= kQuadratureWidth) {
            // z = hi (1 - tau): int (hi - z) phi = hi^(e+1) int_0^t tau (1 - tau)^(e-1) d tau.
            const double scale = std::pow(hi, exponent + 1.0) / h;
            const double i0 = gauss_integrate([&](double tau) { return tau * std::pow(1.0 - tau, exponent - 1.0); },
                                              0.0, t, kQuadratureNodes);
            const double i1 = gauss_integrate(
                [&](double tau) { return (t - tau) * std::pow(1.0 - tau, exponent - 1.0); }, 0.0, t, kQuadratureNodes);
            w.w0[k] = scale * i0;
            w.w1[k] = scale * i1;
        } else {
            const double z0 = zeta_1d(lo, hi, exponent, 0);
            const double z1 = zeta_1d(lo, hi, exponent, 1);
            w.w0[k] = (hi * z0 - z1) / h;
            w.w1[k] = (-lo * z0 + z1) / h;
        }
    }
    return w;
}

JumpCoeffs::JumpCoeffs(const Grid2D& grid, const KouParams& p) : m1_(grid.m1()), m2_(grid.m2()), lambda_(p.lambda) {
    check_eta(p);
    const AxisWeights down1 = axis_weights(grid.g1, p.eta_q1);
    const AxisWeights up1 = axis_weights(grid.g1, -p.eta_p1);
    const AxisWeights down2 = axis_weights(grid.g2, p.eta_q2);
    const AxisWeights up2 = axis_weights(grid.g2, -p.eta_p2);

    const std::vector<double> fd1 = psi_factor(grid.g1, p.q1(), p.eta_q1, -1.0);
    const std::vector<double> fu1 = psi_factor(grid.g1, p.p1, p.eta_p1, 1.0);
    const std::vector<double> fd2 = psi_factor(grid.g2, p.q2(), p.eta_q2, -1.0);
    const std::vector<double> fu2 = psi_factor(grid.g2, p.p2, p.eta_p2, 1.0);

    const AxisWeights* w_first[4] = {&down1, &up1, &down1, &up1};
    const AxisWeights* w_second[4] = {&down2, &down2, &up2, &up2};
    const std::vector<double>* f_first[4] = {&fd1, &fu1, &fd1, &fu1};
    const std::vector<double>* f_second[4] = {&fd2, &fd2, &fu2, &fu2};

    const std::size_t cells = static_cast<std::size_t>(m1_) * static_cast<std::size_t>(m2_);
    const std::size_t points = grid.points();
    for (int nu = 0; nu < 4; ++nu) {
        // The bilinear weights of a cell factor into the two directions:
        // gamma^{ab}_{kl} = w_a(k) w_b(l), since zeta^{ab}_{kl} is a product of 1D integrals.
        const AxisWeights& wa = *w_first[nu];
        const AxisWeights& wb = *w_second[nu];
        auto& gamma = gamma_[nu];
        gamma.resize(4 * cells);
        for (int l = 1; l <= m2_; ++l) {
            for (int k = 1; k <= m1_; ++k) {
                double* g = gamma.data() + 4 * cell(k, l);
                g[0] = wa.w0[k] * wb.w0[l];
                g[1] = wa.w1[k] * wb.w0[l];
                g[2] = wa.w0[k] * wb.w1[l];
                g[3] = wa.w1[k] * wb.w1[l];
            }
        }
        auto& psi = psi_[nu];
        psi.assign(points, 0.0);
        const auto& fa = *f_first[nu];
        const auto& fb = *f_second[nu];
        for (int j = 1; j <= m2_; ++j) {
            const double row = lambda_ * fb[j];
            for (int i = 1; i <= m1_; ++i) psi[point(i, j)] = row * fa[i];
        }
    }

    auto make_axis = [&](const AxisWeights& down, const AxisWeights& up, const std::vector<double>& fd,
                         const std::vector<double>& fu) {
        Axis ax{down, up, fd, fu};
        for (auto& x : ax.psi_down) x *= lambda_;
        for (auto& x : ax.psi_up) x *= lambda_;
        return ax;
    };
    axis1_ = make_axis(down1, up1, fd1, fu1);
    axis2_ = make_axis(down2, up2, fd2, fu2);
}

std::size_t JumpCoeffs::memory_bytes() const {
    std::size_t bytes = 0;
    for (const auto& g : gamma_) bytes += g.size() * sizeof(double);
    for (const auto& p : psi_) bytes += p.size() * sizeof(double);
    return bytes;
}

JumpCoeffs precompute(const Grid2D& grid, const KouParams& params) { return JumpCoeffs(grid, params); }

namespace {

// One-dimensional reduction along an axis; v and out are strided views.
void apply_axis(const JumpCoeffs::Axis& ax, int m, const double* v, std::size_t stride, double* out) {
    // Downward jumps: prefix sums over k <= i.
    Accum run = 0.0L;
    for (int i = 1; i <= m; ++i) {
        run += ax.down.w0[i] * v[(i - 1) * stride] + ax.down.w1[i] * v[i * stride];
        out[i * stride] = static_cast<double>(ax.psi_down[i] * run);
    }
    // Upward jumps: suffix sums over k > i.
    run = 0.0L;
    for (int i = m - 1; i >= 1; --i) {
        const int k = i + 1;
        run += ax.up.w0[k] * v[(k - 1) * stride] + ax.up.w1[k] * v[k * stride];
        out[i * stride] += static_cast<double>(ax.psi_up[i] * run);
    }
}

inline double cell_value(const double* g, const double* lo, const double* hi, int k) {
    return g[0] * lo[k - 1] + g[1] * lo[k] + g[2] * hi[k - 1] + g[3] * hi[k];
}

}  // namespace

void apply_jump(const JumpCoeffs& c, std::span<const double> v, std::span<double> out) {
    const int m1 = c.m1();
    const int m2 = c.m2();
    const std::size_t n1 = static_cast<std::size_t>(m1) + 1;
    const std::size_t n = n1 * (static_cast<std::size_t>(m2) + 1);
    if (v.size() != n || out.size() != n) throw std::invalid_argument("apply_jump: shape mismatch");

    out[0] = c.lambda() * v[0];
    apply_axis(c.axis(1), m1, v.data(), 1, out.data());
    apply_axis(c.axis(2), m2, v.data(), n1, out.data());

    thread_local std::vector<Accum> acc_a;
    thread_local std::vector<Accum> acc_b;
    acc_a.assign(n1, 0.0L);
    acc_b.assign(n1, 0.0L);

    // Rows l <= j: branch 1 (k <= i) and branch 2 (k > i).
    for (int l = 1; l <= m2; ++l) {
        const double* lo = v.data() + (l - 1) * n1;
        const double* hi = v.data() + l * n1;
        const double* g1 = c.cell_gammas(1, 1, l);
        Accum run = 0.0L;
        for (int k = 1; k <= m1; ++k) {
            run += cell_value(g1 + 4 * (k - 1), lo, hi, k);
            acc_a[k] += run;
        }
        const double* g2 = c.cell_gammas(2, 1, l);
        run = 0.0L;
        for (int k = m1; k >= 2; --k) {
            run += cell_value(g2 + 4 * (k - 1), lo, hi, k);
            acc_b[k - 1] += run;
        }
        const double* psi1 = c.psi_row(1, l);
        const double* psi2 = c.psi_row(2, l);
        double* row = out.data() + l * n1;
        for (int i = 1; i <= m1; ++i) row[i] = static_cast<double>(psi1[i] * acc_a[i] + psi2[i] * acc_b[i]);
    }

    // Rows l > j: branch 3 (k <= i) and branch 4 (k > i).
    acc_a.assign(n1, 0.0L);
    acc_b.assign(n1, 0.0L);
    for (int j = m2; j >= 1; --j) {
        const double* psi3 = c.psi_row(3, j);
        const double* psi4 = c.psi_row(4, j);
        double* row = out.data() + j * n1;
        for (int i = 1; i <= m1; ++i) row[i] += static_cast<double>(psi3[i] * acc_a[i] + psi4[i] * acc_b[i]);
        if (j == 1) break;
        const double* lo = v.data() + (j - 1) * n1;
        const double* hi = v.data() + j * n1;
        const double* g3 = c.cell_gammas(3, 1, j);
        Accum run = 0.0L;
        for (int k = 1; k <= m1; ++k) {
            run += cell_value(g3 + 4 * (k - 1), lo, hi, k);
            acc_a[k] += run;
        }
        const double* g4 = c.cell_gammas(4, 1, j);
        run = 0.0L;
        for (int k = m1; k >= 2; --k) {
            run += cell_value(g4 + 4 * (k - 1), lo, hi, k);
            acc_b[k - 1] += run;
        }
    }
}

GridFunction apply_jump(const JumpCoeffs& c, const GridFunction& v) {
    if (v.m1() != c.m1() || v.m2() != c.m2()) throw std::invalid_argument("apply_jump: shape mismatch");
    GridFunction out(v.m1(), v.m2());
    apply_jump(c, v.values(), out.values());
    return out;
}

GridFunction apply_jump_naive(const JumpCoeffs& c, const GridFunction& v) {
    const int m1 = c.m1();
    const int m2 = c.m2();
    if (v.m1() != m1 || v.m2() != m2) throw std::invalid_argument("apply_jump_naive: shape mismatch");
    GridFunction out(m1, m2);
    auto G = [&](int nu, int k, int l) -> Accum {
        return static_cast<Accum>(c.gamma(nu, k, l, 0, 0)) * v(k - 1, l - 1) +
               static_cast<Accum>(c.gamma(nu, k, l, 1, 0)) * v(k, l - 1) +
               static_cast<Accum>(c.gamma(nu, k, l, 0, 1)) * v(k - 1, l) +
               static_cast<Accum>(c.gamma(nu, k, l, 1, 1)) * v(k, l);
    };
    for (int j = 1; j <= m2; ++j) {
        for (int i = 1; i <= m1; ++i) {
            Accum total = 0.0L;
            for (int nu = 1; nu <= 4; ++nu) {
                const bool k_below = nu == 1 || nu == 3;
                const bool l_below = nu == 1 || nu == 2;
                const int k0 = k_below ? 1 : i + 1;
                const int k1 = k_below ? i : m1;
                const int l0 = l_below ? 1 : j + 1;
                const int l1 = l_below ? j : m2;
                Accum sum = 0.0L;
                for (int l = l0; l <= l1; ++l)
                    for (int k = k0; k <= k1; ++k) sum += G(nu, k, l);
                total += c.psi(nu, i, j) * sum;
            }
            out(i, j) = static_cast<double>(total);
        }
    }
    auto axis_naive = [&](const JumpCoeffs::Axis& ax, int m, auto&& value, auto&& store) {
        for (int i = 1; i <= m; ++i) {
            Accum down = 0.0L;
            for (int k = 1; k <= i; ++k) down += ax.down.w0[k] * value(k - 1) + ax.down.w1[k] * value(k);
            Accum up = 0.0L;
            for (int k = i + 1; k <= m; ++k) up += ax.up.w0[k] * value(k - 1) + ax.up.w1[k] * value(k);
            store(i, static_cast<double>(ax.psi_down[i] * down + ax.psi_up[i] * up));
        }
    };
    axis_naive(c.axis(1), m1, [&](int k) { return v(k, 0); }, [&](int i, double x) { out(i, 0) = x; });
    axis_naive(c.axis(2), m2, [&](int k) { return v(0, k); }, [&](int i, double x) { out(0, i) = x; });
    out(0, 0) = c.lambda() * v(0, 0);
    return out;
}

double benchmark_apply_jump(const KouParams& params, int m, int repeats) {
    if (repeats < 1) throw std::invalid_argument("benchmark_apply_jump: repeats must be positive");
    const Grid2D grid = build_grid(m, m, params);
    const JumpCoeffs coeffs(grid, params);
    const GridFunction v = cell_average_payoff(grid, params);
    GridFunction out(grid);
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repeats));
    apply_jump(coeffs, v.values(), out.values());
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        apply_jump(coeffs, v.values(), out.values());
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
    return times[times.size() / 2];
}

}  // namespace kou2d
