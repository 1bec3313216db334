#include <doctest.h>

#include <cmath>
#include <random>

#include "kou2d/spatial.hpp"
#include "oracles.hpp"

using namespace kou2d;

namespace {

// First- and second-derivative operators written out row by row from the stencil definitions.
oracle::Dense dense_first(const Grid1D& g, bool scaled) {
    const int m = g.cells();
    oracle::Dense d(static_cast<std::size_t>(m) + 1);
    for (int i = 1; i < m; ++i) {
        const double hl = g.width(i), hr = g.width(i + 1);
        const double x = scaled ? g[i] : 1.0;
        d(i, i - 1) = -x * hr / (hl * (hl + hr));
        d(i, i) = x * (hr - hl) / (hl * hr);
        d(i, i + 1) = x * hl / (hr * (hl + hr));
    }
    const double x = scaled ? g[m] : 1.0;
    d(m, m - 1) = -x / g.width(m);
    d(m, m) = x / g.width(m);
    return d;
}

oracle::Dense dense_direction(const Grid1D& g, double sigma, double drift, double reaction) {
    const int m = g.cells();
    oracle::Dense a = dense_first(g, true);
    for (double& x : a.a) x *= drift;
    for (int i = 1; i < m; ++i) {
        const double hl = g.width(i), hr = g.width(i + 1);
        const double c = 0.5 * sigma * sigma * g[i] * g[i];
        a(i, i - 1) += c * 2.0 / (hl * (hl + hr));
        a(i, i) += -c * 2.0 / (hl * hr);
        a(i, i + 1) += c * 2.0 / (hr * (hl + hr));
    }
    for (int i = 0; i <= m; ++i) a(i, i) += reaction;
    return a;
}

struct DenseOps {
    oracle::Dense a1, a2, mixed;
};

DenseOps dense_ops(const Grid2D& grid, const KouParams& p) {
    const double reaction = -0.5 * (p.r + p.lambda);
    const oracle::Dense d1 = dense_direction(grid.g1, p.sigma1, p.r - p.lambda * p.kappa1(), reaction);
    const oracle::Dense d2 = dense_direction(grid.g2, p.sigma2, p.r - p.lambda * p.kappa2(), reaction);
    const auto i1 = oracle::identity(grid.g1.size());
    const auto i2 = oracle::identity(grid.g2.size());
    oracle::Dense mixed = oracle::kron(dense_first(grid.g2, true), dense_first(grid.g1, true));
    for (double& x : mixed.a) x *= p.rho * p.sigma1 * p.sigma2;
    return {oracle::kron(i2, d1), oracle::kron(d2, i1), mixed};
}

std::vector<double> call(const SpatialOperators& ops, void (SpatialOperators::*f)(std::span<const double>, std::span<double>) const,
                         const std::vector<double>& v) {
    std::vector<double> y(v.size());
    (ops.*f)(v, y);
    return y;
}

}  // namespace

TEST_CASE("finite-difference weights") {
    const double h = 0.25;
    const auto w1 = fd_weights_first(h, h);
    CHECK(w1[0] == doctest::Approx(-1.0 / (2 * h)));
    CHECK(w1[1] == doctest::Approx(0.0));
    CHECK(w1[2] == doctest::Approx(1.0 / (2 * h)));
    const auto w2 = fd_weights_second(h, h);
    CHECK(w2[0] == doctest::Approx(1.0 / (h * h)));
    CHECK(w2[1] == doctest::Approx(-2.0 / (h * h)));
    CHECK(w2[2] == doctest::Approx(1.0 / (h * h)));
    for (auto [hl, hr] : {std::pair{0.3, 0.7}, std::pair{2.0, 0.1}, std::pair{1.0, 1.5}}) {
        const double s = 3.0;
        const auto w = fd_weights_second(hl, hr);
        const double u = w[0] * (s - hl) * (s - hl) + w[1] * s * s + w[2] * (s + hr) * (s + hr);
        CHECK(u == doctest::Approx(2.0).epsilon(1e-12));
        const auto d = fd_weights_first(hl, hr);
        const double du = d[0] * (s - hl) * (s - hl) + d[1] * s * s + d[2] * (s + hr) * (s + hr);
        CHECK(du == doctest::Approx(2.0 * s).epsilon(1e-12));
    }
}

TEST_CASE("operators on constants and simple functions") {
    const KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    const Grid2D grid = build_grid(20, 24, p);
    const SpatialOperators ops(grid, p);
    const GridFunction ones(grid, 1.0);
    const GridFunction y = ops.apply_AD(ones);
    for (double x : y.values()) CHECK(x == doctest::Approx(-(p.r + p.lambda)).epsilon(1e-12));

    GridFunction s1(grid), s12(grid);
    for (int j = 0; j <= grid.m2(); ++j)
        for (int i = 0; i <= grid.m1(); ++i) {
            s1(i, j) = grid.g1[i];
            s12(i, j) = grid.g1[i] * grid.g2[j];
        }
    GridFunction mixed(grid);
    ops.apply_mixed(s1.values(), mixed.values());
    for (double x : mixed.values()) CHECK(x == doctest::Approx(0.0).scale(1.0));

    const GridFunction d = ops.apply_AD(s12);
    const double c = p.rho * p.sigma1 * p.sigma2 + (p.r - p.lambda * p.kappa1()) + (p.r - p.lambda * p.kappa2()) -
                     (p.r + p.lambda);
    for (int j = 1; j < grid.m2(); ++j)
        for (int i = 1; i < grid.m1(); ++i)
            CHECK(d(i, j) == doctest::Approx(c * s12(i, j)).epsilon(1e-11).scale(1.0));
}

TEST_CASE("operator actions equal dense Kronecker assembly") {
    const KouParams p = parameter_set(ParameterSetLabel::Set2).params;
    for (auto [m1, m2] : {std::pair{6, 6}, std::pair{7, 9}, std::pair{10, 5}}) {
        const Grid2D grid = build_grid(m1, m2, p);
        const SpatialOperators ops(grid, p);
        const DenseOps dense = dense_ops(grid, p);
        std::mt19937_64 rng(m1 * 31 + m2);
        const auto v = oracle::random_vector(grid.points(), rng);
        const auto e1 = dense.a1 * v;
        const auto e2 = dense.a2 * v;
        const auto em = dense.mixed * v;
        const double tol = 1e-12 * (oracle::max_abs(e1) + oracle::max_abs(e2) + oracle::max_abs(em));
        CHECK(oracle::max_diff(call(ops, &SpatialOperators::apply_a1, v), e1) <= tol);
        CHECK(oracle::max_diff(call(ops, &SpatialOperators::apply_a2, v), e2) <= tol);
        CHECK(oracle::max_diff(call(ops, &SpatialOperators::apply_mixed, v), em) <= tol);
        std::vector<double> sum(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) sum[k] = e1[k] + e2[k] + em[k];
        CHECK(oracle::max_diff(call(ops, &SpatialOperators::apply_AD, v), sum) <= tol);

        const double scale = 0.37;
        const CsrMatrix csr = ops.implicit_matrix(scale);
        REQUIRE(csr.n == v.size());
        double worst = 0.0;
        for (std::size_t r = 0; r < csr.n; ++r) {
            std::vector<double> row(csr.n, 0.0);
            for (std::size_t k = csr.row_ptr[r]; k < csr.row_ptr[r + 1]; ++k) {
                if (k > csr.row_ptr[r]) CHECK(csr.col[k] > csr.col[k - 1]);
                row[csr.col[k]] = csr.val[k];
            }
            for (std::size_t c = 0; c < csr.n; ++c) {
                const double expected = (r == c ? 1.0 : 0.0) -
                                        scale * (dense.a1(r, c) + dense.a2(r, c) + dense.mixed(r, c));
                worst = std::max(worst, std::abs(row[c] - expected));
            }
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("mixed rows vanish on the lower boundaries") {
    const KouParams p = parameter_set(ParameterSetLabel::Set3).params;
    const Grid2D grid = build_grid(12, 12, p);
    const SpatialOperators ops(grid, p);
    std::mt19937_64 rng(3);
    const auto v = oracle::random_vector(grid.points(), rng);
    const auto y = call(ops, &SpatialOperators::apply_mixed, v);
    GridFunction g(grid);
    std::copy(y.begin(), y.end(), g.storage().begin());
    for (int k = 0; k <= 12; ++k) {
        CHECK(g(0, k) == 0.0);
        CHECK(g(k, 0) == 0.0);
    }
}

TEST_CASE("second-order spatial consistency") {
    const KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    const double K = p.K;
    auto exact = [&](double s1, double s2) {
        const double v = std::exp(-(s1 + s2) / K);
        const double d1 = -v / K, d2 = -v / K, dd = v / (K * K);
        return 0.5 * p.sigma1 * p.sigma1 * s1 * s1 * dd + 0.5 * p.sigma2 * p.sigma2 * s2 * s2 * dd +
               p.rho * p.sigma1 * p.sigma2 * s1 * s2 * dd + (p.r - p.lambda * p.kappa1()) * s1 * d1 +
               (p.r - p.lambda * p.kappa2()) * s2 * d2 - (p.r + p.lambda) * v;
    };
    std::vector<double> errors;
    for (int m : {40, 80, 160}) {
        const Grid2D grid = build_grid(m, m, p);
        const SpatialOperators ops(grid, p);
        GridFunction v(grid);
        for (int j = 0; j <= m; ++j)
            for (int i = 0; i <= m; ++i) v(i, j) = std::exp(-(grid.g1[i] + grid.g2[j]) / K);
        const GridFunction d = ops.apply_AD(v);
        double err = 0.0;
        // Fixed points in the uniform region that belong to every grid.
        for (auto [a, b] : {std::pair{m / 8, m / 8}, std::pair{m / 4, m / 8}, std::pair{m / 4, m / 4}})
            err = std::max(err, std::abs(d(a, b) - exact(grid.g1[a], grid.g2[b])));
        errors.push_back(err);
    }
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) CHECK(std::log2(errors[k] / errors[k + 1]) >= 1.9);
}
