#pragma once

#include <cstdint>
#include <random>

#include "kou2d/model.hpp"

namespace kou2d {

struct McConfig {
    long paths = 1'000'000;
    std::uint64_t seed = 42;
    bool antithetic = false;
    int threads = 0;      // 0: hardware concurrency
    long batch = 1 << 15;  // paths per independently seeded batch
};

struct McResult {
    double price = 0.0;
    double std_error = 0.0;
    long paths = 0;
};

/// One log jump size: +Exp(eta_p) with probability p, -Exp(eta_q) otherwise.
double sample_log_jump(std::mt19937_64& rng, double p, double eta_p, double eta_q);

/// Discounted put-on-the-average price by exact simulation of the terminal
/// log-prices. Results depend only on the config, not on the thread count.
McResult mc_price(const KouParams& params, double s1, double s2, const McConfig& cfg);

}  // namespace kou2d
