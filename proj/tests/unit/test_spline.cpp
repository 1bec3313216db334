#include <doctest.h>

#include <cmath>
#include <random>

#include "kou2d/spline.hpp"

using namespace kou2d;

TEST_CASE("spline reproduces knots, lines, parabolas and cubics") {
    const std::vector<double> x = {0.0, 0.7, 1.1, 2.5, 3.0, 4.2, 6.0};
    auto cubic = [](double t) { return 2.0 - t + 0.5 * t * t - 0.3 * t * t * t; };
    std::vector<double> y;
    for (double t : x) y.push_back(cubic(t));
    const CubicSpline s(x, y);
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(s(x[k]) == doctest::Approx(y[k]).epsilon(1e-14));
    for (double t = 0.0; t <= 6.0; t += 0.137) CHECK(s(t) == doctest::Approx(cubic(t)).epsilon(1e-11).scale(1.0));

    const std::vector<double> x2 = {1.0, 3.0};
    const std::vector<double> y2 = {2.0, 6.0};
    CHECK(CubicSpline(x2, y2)(2.5) == doctest::Approx(5.0));
    const std::vector<double> x3 = {0.0, 1.0, 3.0};
    const std::vector<double> y3 = {1.0, 2.0, 10.0};  // 1 + t^2
    CHECK(CubicSpline(x3, y3)(2.0) == doctest::Approx(5.0));
    CHECK_THROWS(CubicSpline(std::vector<double>{1.0}, std::vector<double>{1.0}));
}

TEST_CASE("tensor-product spline reproduces bicubic data") {
    const KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    const Grid2D grid = build_grid(30, 36, p);
    auto f = [](double a, double b) {
        const double u = a / 100.0, w = b / 100.0;
        return 1.0 + u - 2.0 * w + u * w + 0.5 * u * u * w - u * u * u + 0.25 * u * u * u * w * w * w + w * w * w;
    };
    GridFunction v(grid);
    for (int j = 0; j <= grid.m2(); ++j)
        for (int i = 0; i <= grid.m1(); ++i) v(i, j) = f(grid.g1[i], grid.g2[j]);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 400.0);
    for (int k = 0; k < 50; ++k) {
        const double a = u(rng), b = u(rng);
        CHECK(spline_interpolate(grid, v, a, b) == doctest::Approx(f(a, b)).epsilon(1e-10).scale(1.0));
    }
    CHECK(spline_interpolate(grid, v, grid.g1[7], grid.g2[11]) == doctest::Approx(v(7, 11)).epsilon(1e-14));
}
