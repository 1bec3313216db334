#include <doctest.h>

#include <cmath>
#include <random>

#include "kou2d/jumpint.hpp"
#include "oracles.hpp"

using namespace kou2d;

namespace {

GridFunction random_function(const Grid2D& grid, std::mt19937_64& rng) {
    GridFunction v(grid);
    const auto r = oracle::random_vector(v.size(), rng);
    std::copy(r.begin(), r.end(), v.storage().begin());
    return v;
}

double max_abs(const GridFunction& v) { return oracle::max_abs(v.storage()); }

double max_diff(const GridFunction& a, const GridFunction& b) { return oracle::max_diff(a.storage(), b.storage()); }

// int_lo^hi weight(z) z^(e - 1) dz with the density power split off for accuracy near 0.
double weighted_power(double lo, double hi, double e, const std::function<double(double)>& weight) {
    return oracle::integrate([&](double z) { return weight(z) * std::pow(z, e - 1.0); }, lo, hi, 1e-13);
}

}  // namespace

TEST_CASE("zeta power differences") {
    for (double e : {6.6667, 2.5, -5.0, -3.0465})
        for (int a : {0, 1}) {
            const double lo = 3.0, hi = 7.5;
            const double q = oracle::integrate([&](double z) { return std::pow(z, a + e - 1.0); }, lo, hi, 1e-14);
            CHECK(zeta_1d(lo, hi, e, a) == doctest::Approx(q).epsilon(1e-10));
        }
}

TEST_CASE("one-dimensional interpolation weights") {
    const KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    const Grid1D g = build_mesh(30, p.K, p.S_max, p.K / 10.0);
    for (double e : {p.eta_q1, -p.eta_p1}) {
        const AxisWeights w = axis_weights(g, e);
        for (int k = e < 0.0 ? 2 : 1; k <= g.cells(); ++k) {
            const double lo = g[k - 1], hi = g[k], h = hi - lo;
            const double w0 = weighted_power(lo, hi, e, [&](double z) { return (hi - z) / h; });
            const double w1 = weighted_power(lo, hi, e, [&](double z) { return (z - lo) / h; });
            CHECK(w.w0[k] == doctest::Approx(w0).epsilon(1e-10));
            CHECK(w.w1[k] == doctest::Approx(w1).epsilon(1e-10));
        }
    }
}

TEST_CASE("cell coefficients on a toy grid") {
    KouParams p = parameter_set(ParameterSetLabel::Set2).params;
    const Grid2D grid{Grid1D({0.0, 40.0, 160.0, 1000.0}), Grid1D({0.0, 80.0, 130.0, 1000.0})};
    const JumpCoeffs c = precompute(grid, p);
    const double e1[4] = {p.eta_q1, -p.eta_p1, p.eta_q1, -p.eta_p1};
    const double e2[4] = {p.eta_q2, p.eta_q2, -p.eta_p2, -p.eta_p2};
    for (int nu = 1; nu <= 4; ++nu) {
        for (int l = 1; l <= 3; ++l) {
            for (int k = 1; k <= 3; ++k) {
                if ((nu == 2 || nu == 4) && k == 1) continue;
                if ((nu == 3 || nu == 4) && l == 1) continue;
                const double lo1 = grid.g1[k - 1], hi1 = grid.g1[k], lo2 = grid.g2[l - 1], hi2 = grid.g2[l];
                double sum = 0.0;
                for (int a = 0; a <= 1; ++a)
                    for (int b = 0; b <= 1; ++b) {
                        auto phi1 = [&](double z) { return a == 0 ? (hi1 - z) / (hi1 - lo1) : (z - lo1) / (hi1 - lo1); };
                        auto phi2 = [&](double z) { return b == 0 ? (hi2 - z) / (hi2 - lo2) : (z - lo2) / (hi2 - lo2); };
                        // Two-dimensional nested quadrature of the bilinear weight times the density powers.
                        const double q = oracle::integrate(
                            [&](double z2) {
                                return phi2(z2) * std::pow(z2, e2[nu - 1] - 1.0) * weighted_power(lo1, hi1, e1[nu - 1], phi1);
                            },
                            lo2, hi2, 1e-12);
                        CHECK(c.gamma(nu, k, l, a, b) == doctest::Approx(q).epsilon(1e-9));
                        sum += c.gamma(nu, k, l, a, b);
                    }
                const double zeta00 = zeta_1d(lo1, hi1, e1[nu - 1], 0) * zeta_1d(lo2, hi2, e2[nu - 1], 0);
                CHECK(sum == doctest::Approx(zeta00).epsilon(1e-12));
            }
        }
    }
    p.eta_p2 = 1.0;
    CHECK_THROWS_AS(precompute(grid, p), std::invalid_argument);
}

TEST_CASE("constant function gives the truncated jump mass") {
    const KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    const Grid2D grid = build_grid(40, 48, p);
    const JumpCoeffs c = precompute(grid, p);
    const GridFunction y = apply_jump(c, GridFunction(grid, 1.0));
    const double S = p.S_max;
    auto F1 = [&](double s) { return oracle::kou_cdf(S / s, p.p1, p.eta_p1, p.eta_q1); };
    auto F2 = [&](double s) { return oracle::kou_cdf(S / s, p.p2, p.eta_p2, p.eta_q2); };
    CHECK(y(0, 0) == doctest::Approx(p.lambda).epsilon(1e-14));
    for (int i = 1; i <= grid.m1(); ++i) CHECK(y(i, 0) == doctest::Approx(p.lambda * F1(grid.g1[i])).epsilon(1e-10));
    for (int j = 1; j <= grid.m2(); ++j) CHECK(y(0, j) == doctest::Approx(p.lambda * F2(grid.g2[j])).epsilon(1e-10));
    for (int j = 1; j <= grid.m2(); ++j)
        for (int i = 1; i <= grid.m1(); ++i) {
            CHECK(y(i, j) == doctest::Approx(p.lambda * F1(grid.g1[i]) * F2(grid.g2[j])).epsilon(1e-10));
            CHECK((y(i, j) >= 0.0 && y(i, j) <= p.lambda * (1.0 + 1e-12)));
        }
}

TEST_CASE("fast evaluation equals direct summation") {
    const KouParams p = parameter_set(ParameterSetLabel::Set3).params;
    std::mt19937_64 rng(11);
    for (auto [m1, m2] : {std::pair{8, 8}, std::pair{12, 16}, std::pair{16, 16}}) {
        const Grid2D grid = build_grid(m1, m2, p);
        const JumpCoeffs c = precompute(grid, p);
        for (int t = 0; t < 5; ++t) {
            const GridFunction v = random_function(grid, rng);
            const GridFunction naive = apply_jump_naive(c, v);
            CHECK(max_diff(apply_jump(c, v), naive) <= 1e-12 * max_abs(naive));
        }
    }
}

TEST_CASE("linearity, zero input and zero intensity") {
    KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    const Grid2D grid = build_grid(10, 12, p);
    const JumpCoeffs c = precompute(grid, p);
    std::mt19937_64 rng(5);
    const GridFunction u = random_function(grid, rng), v = random_function(grid, rng);
    GridFunction w(grid);
    const double alpha = 0.7, beta = -2.3;
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = alpha * u[k] + beta * v[k];
    const GridFunction ju = apply_jump(c, u), jv = apply_jump(c, v), jw = apply_jump(c, w);
    GridFunction comb(grid);
    for (std::size_t k = 0; k < w.size(); ++k) comb[k] = alpha * ju[k] + beta * jv[k];
    CHECK(max_diff(jw, comb) <= 1e-13 * max_abs(jw));

    CHECK(max_abs(apply_jump(c, GridFunction(grid))) == 0.0);
    CHECK(max_abs(apply_jump_naive(c, GridFunction(grid))) == 0.0);

    p.lambda = 0.0;
    const JumpCoeffs c0 = precompute(grid, p);
    CHECK(max_abs(apply_jump(c0, u)) == 0.0);
}
