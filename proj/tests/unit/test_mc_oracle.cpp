#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kou2d/mc_oracle.hpp"

using namespace kou2d;

TEST_CASE("deterministic limit") {
    KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    p.lambda = 0.0;
    p.sigma1 = p.sigma2 = 1e-9;
    McConfig cfg;
    cfg.paths = 20000;
    for (auto [s1, s2] : {std::pair{80.0, 90.0}, std::pair{100.0, 100.0}, std::pair{60.0, 120.0}}) {
        const McResult r = mc_price(p, s1, s2, cfg);
        const double g = std::exp(p.r * p.T);
        const double expected = std::exp(-p.r * p.T) * payoff(s1 * g, s2 * g, p.K);
        CHECK(r.price == doctest::Approx(expected).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("simulated jump mean matches kappa") {
    const KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    std::mt19937_64 rng(123);
    const int n = 400000;
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double y = std::exp(sample_log_jump(rng, p.p1, p.eta_p1, p.eta_q1)) - 1.0;
        sum += y;
        sum_sq += y * y;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - p.kappa1()) <= 3.0 * se);
}

TEST_CASE("seeded runs are reproducible and thread independent") {
    const KouParams p = parameter_set(ParameterSetLabel::Set2).params;
    McConfig cfg;
    cfg.paths = 100000;
    cfg.batch = 4096;
    cfg.threads = 1;
    const McResult a = mc_price(p, 100.0, 100.0, cfg);
    cfg.threads = 4;
    const McResult b = mc_price(p, 100.0, 100.0, cfg);
    CHECK(a.price == b.price);
    CHECK(a.std_error == b.std_error);
    cfg.seed = 43;
    CHECK(mc_price(p, 100.0, 100.0, cfg).price != a.price);
}

TEST_CASE("antithetic and plain estimates agree") {
    const KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    McConfig cfg;
    cfg.paths = 200000;
    const McResult plain = mc_price(p, 100.0, 100.0, cfg);
    cfg.antithetic = true;
    cfg.seed = 7;
    const McResult anti = mc_price(p, 100.0, 100.0, cfg);
    CHECK(anti.paths == cfg.paths);
    CHECK(std::abs(plain.price - anti.price) <= 3.0 * std::hypot(plain.std_error, anti.std_error));
}

TEST_CASE("invalid input") {
    const KouParams p = parameter_set(ParameterSetLabel::Set1).params;
    McConfig cfg;
    cfg.paths = 1;
    CHECK_THROWS_AS(mc_price(p, 100.0, 100.0, cfg), std::invalid_argument);
    cfg.paths = 100;
    CHECK_THROWS_AS(mc_price(p, -1.0, 100.0, cfg), std::invalid_argument);
}
