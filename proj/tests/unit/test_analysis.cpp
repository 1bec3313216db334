#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "kou2d/analysis.hpp"

using namespace kou2d;

namespace {

GridFunction sample(const Grid2D& grid, double (*f)(double, double)) {
    GridFunction v(grid);
    for (int j = 0; j <= grid.m2(); ++j)
        for (int i = 0; i <= grid.m1(); ++i) v(i, j) = f(grid.g1[i], grid.g2[j]);
    return v;
}

}  // namespace

TEST_CASE("ROI error") {
    const KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    const Grid2D grid = build_grid(40, 40, p);
    const Roi roi = Roi::for_strike(p.K);
    const GridFunction ref = sample(grid, [](double a, double b) { return a * b; });
    CHECK(e_roi(ref, ref, grid, roi) == 0.0);

    GridFunction v = ref;
    int inside_i = -1, outside_i = -1;
    for (int i = 0; i <= grid.m1(); ++i) {
        if (roi.contains(grid.g1[i], grid.g2[i]) && inside_i < 0) inside_i = i;
        if (!roi.contains(grid.g1[i], 100.0) && grid.g1[i] > 150.0 && outside_i < 0) outside_i = i;
    }
    REQUIRE(inside_i >= 0);
    REQUIRE(outside_i >= 0);
    v(outside_i, inside_i) += 50.0;
    CHECK(e_roi(ref, v, grid, roi) == 0.0);
    v(inside_i, inside_i) += 1.0;
    CHECK(e_roi(ref, v, grid, roi) == doctest::Approx(1.0));

    // Brute-force scan of the same region.
    GridFunction w = ref;
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += std::sin(static_cast<double>(k));
    double scan = 0.0;
    for (int j = 0; j <= grid.m2(); ++j)
        for (int i = 0; i <= grid.m1(); ++i) {
            const double s1 = grid.g1[i], s2 = grid.g2[j];
            if (s1 > 50.0 && s1 < 150.0 && s2 > 50.0 && s2 < 150.0) scan = std::max(scan, std::abs(w(i, j) - ref(i, j)));
        }
    CHECK(e_roi(ref, w, grid, roi) == scan);
    CHECK_THROWS_AS(e_roi(ref, w, grid, Roi{1000.0, 1001.0}), std::invalid_argument);
}

TEST_CASE("Greeks are exact on low-degree polynomials") {
    const KouParams p = parameter_set(ParameterSetLabel::Set2).params;
    const Grid2D grid = build_grid(30, 34, p);
    const Greeks lin = greeks(sample(grid, [](double a, double) { return a; }), grid);
    const Greeks bil = greeks(sample(grid, [](double a, double b) { return a * b; }), grid);
    const Greeks quad = greeks(sample(grid, [](double a, double b) { return a * a + 3.0 * b; }), grid);
    for (int j = 1; j < grid.m2(); ++j)
        for (int i = 1; i < grid.m1(); ++i) {
            const double s1 = grid.g1[i], s2 = grid.g2[j];
            CHECK(lin.delta1(i, j) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(lin.gamma11(i, j) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
            CHECK(lin.gamma12(i, j) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
            CHECK(bil.gamma12(i, j) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(bil.delta2(i, j) == doctest::Approx(s1).epsilon(1e-10));
            CHECK(quad.delta1(i, j) == doctest::Approx(2.0 * s1).epsilon(1e-10));
            CHECK(quad.gamma11(i, j) == doctest::Approx(2.0).epsilon(1e-8));
            CHECK(quad.delta2(i, j) == doctest::Approx(3.0).epsilon(1e-10));
            CHECK(quad.gamma22(i, j) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
            (void)s2;
        }
    // One-sided differences still capture the slope of a linear function on the edges.
    for (int j = 0; j <= grid.m2(); ++j) {
        CHECK(lin.delta1(0, j) == doctest::Approx(1.0));
        CHECK(lin.delta1(grid.m1(), j) == doctest::Approx(1.0));
    }
    CHECK(&lin.get(Greek::Gamma12) == &lin.gamma12);
}

TEST_CASE("convergence order of synthetic errors") {
    const std::vector<double> N = {20, 40, 80, 160};
    std::vector<double> e;
    for (double n : N) e.push_back(3.0 * std::pow(n, -2.0));
    CHECK(convergence_order(N, e) == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t k = 0; k < N.size(); ++k) e[k] = 0.7 / N[k];
    CHECK(convergence_order(N, e) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interpolation at grid nodes and outside the domain") {
    const KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    const Grid2D grid = build_grid(20, 20, p);
    const GridFunction v = sample(grid, [](double a, double b) { return std::sin(a / 50.0) * std::cos(b / 70.0); });
    CHECK(interpolate_price(v, grid, grid.g1[5], grid.g2[9]) == doctest::Approx(v(5, 9)).epsilon(1e-13));
    CHECK_THROWS_AS(interpolate_price(v, grid, -1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(interpolate_price(v, grid, 10.0, 2001.0), std::invalid_argument);
}

TEST_CASE("reference solutions and the cache") {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "kou2d-unit-cache";
    std::filesystem::remove_all(dir);
    setenv("KOU2D_CACHE_DIR", dir.c_str(), 1);
    CHECK(cache_directory() == dir);

    const KouParams p = parameter_set(ParameterSetLabel::Set2).params;
    PideProblem problem(p, 16, 16);
    const GridFunction direct = run_steps(make_spec(Scheme::MCS2, 40), problem, 40);
    const GridFunction first = reference_solution(problem, "set2", 40);
    CHECK(first.storage() == direct.storage());
    CHECK(!std::filesystem::is_empty(dir));
    const GridFunction second = reference_solution(problem, "set2", 40);
    CHECK(second.storage() == direct.storage());

    // A different parameter vector must not reuse the cached file.
    KouParams q = p;
    q.sigma1 = 0.25;
    PideProblem other(q, 16, 16);
    const GridFunction third = reference_solution(other, "set2", 40);
    CHECK(third.storage() != direct.storage());

    const GridFunction zero = run(make_spec(Scheme::MCS2, 10), problem, GridFunction(problem.grid()));
    for (double x : zero.values()) CHECK(x == 0.0);
    std::filesystem::remove_all(dir);
    unsetenv("KOU2D_CACHE_DIR");
}

TEST_CASE("convergence study records") {
    const KouParams p = parameter_set(ParameterSetLabel::Set2).params;
    const std::vector<Scheme> schemes = {Scheme::MCS2, Scheme::CNFE};
    const std::vector<int> Ns = {10, 20};
    StudyOptions opts;
    opts.use_cache = false;
    opts.threads = 2;
    const auto recs = convergence_study(p, "set2", 24, schemes, Ns, opts);
    REQUIRE(recs.size() == 4);
    PideProblem problem(p, 24, 24);
    const GridFunction ref = reference_solution(problem, "set2", kReferenceSteps, false);
    for (const auto& r : recs) {
        PideProblem fresh(p, 24, 24);
        const GridFunction v = run(make_spec(r.scheme, r.N), fresh);
        CHECK(r.Nprime == fair_steps(r.scheme, r.N));
        CHECK(r.error == e_roi(ref, v, problem.grid(), Roi::for_strike(p.K)));
        CHECK(r.seconds >= 0.0);
    }
    const auto grecs = greek_error_study(p, "set2", 24, schemes, Ns, opts);
    REQUIRE(grecs.size() == 4);
    for (const auto& r : grecs)
        for (double e : r.errors) CHECK(e > 0.0);
}
