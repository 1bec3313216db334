#include "kou2d/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace kou2d {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct BatchSum {
    double sum = 0.0;
    double sum_sq = 0.0;
    long samples = 0;
};

}  // namespace

double sample_log_jump(std::mt19937_64& rng, double p, double eta_p, double eta_q) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < p) return std::exponential_distribution<double>(eta_p)(rng);
    return -std::exponential_distribution<double>(eta_q)(rng);
}

McResult mc_price(const KouParams& prm, double s1, double s2, const McConfig& cfg) {
    prm.validate();
    if (!(s1 > 0.0) || !(s2 > 0.0)) throw std::invalid_argument("mc_price: spots must be positive");
    if (cfg.paths < 2) throw std::invalid_argument("mc_price: need at least two paths");
    if (cfg.batch < 1) throw std::invalid_argument("mc_price: batch must be positive");

    const double T = prm.T;
    const double sqrt_t = std::sqrt(T);
    const double drift1 = std::log(s1) + (prm.r - 0.5 * prm.sigma1 * prm.sigma1 - prm.lambda * prm.kappa1()) * T;
    const double drift2 = std::log(s2) + (prm.r - 0.5 * prm.sigma2 * prm.sigma2 - prm.lambda * prm.kappa2()) * T;
    const double rho_c = std::sqrt(1.0 - prm.rho * prm.rho);
    const double discount = std::exp(-prm.r * T);

    // An antithetic pair counts as one sample of the averaged payoff.
    const long per_path = cfg.antithetic ? 2 : 1;
    const long samples = cfg.paths / per_path;
    const long batches = (samples + cfg.batch - 1) / cfg.batch;
    std::vector<BatchSum> sums(static_cast<std::size_t>(batches));

    auto run_batch = [&](long b) {
        std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(b))));
        std::normal_distribution<double> normal;
        std::poisson_distribution<long> poisson(prm.lambda * T);
        const long count = std::min(cfg.batch, samples - b * cfg.batch);
        BatchSum s;
        for (long k = 0; k < count; ++k) {
            const double z1 = normal(rng);
            const double z2 = prm.rho * z1 + rho_c * normal(rng);
            double j1 = 0.0, j2 = 0.0;
            const long jumps = prm.lambda > 0.0 ? poisson(rng) : 0;
            for (long n = 0; n < jumps; ++n) {
                j1 += sample_log_jump(rng, prm.p1, prm.eta_p1, prm.eta_q1);
                j2 += sample_log_jump(rng, prm.p2, prm.eta_p2, prm.eta_q2);
            }
            const double x1 = drift1 + j1;
            const double x2 = drift2 + j2;
            const double g1 = prm.sigma1 * sqrt_t * z1;
            const double g2 = prm.sigma2 * sqrt_t * z2;
            double value = payoff(std::exp(x1 + g1), std::exp(x2 + g2), prm.K);
            if (cfg.antithetic) value = 0.5 * (value + payoff(std::exp(x1 - g1), std::exp(x2 - g2), prm.K));
            s.sum += value;
            s.sum_sq += value * value;
        }
        s.samples = count;
        sums[static_cast<std::size_t>(b)] = s;
    };

    std::atomic<long> next{0};
    auto worker = [&]() {
        for (long b = next++; b < batches; b = next++) run_batch(b);
    };
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = static_cast<int>(std::clamp<long>(threads, 1, std::max<long>(batches, 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    double sum = 0.0, sum_sq = 0.0;
    long n = 0;
    for (const BatchSum& s : sums) {
        sum += s.sum;
        sum_sq += s.sum_sq;
        n += s.samples;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
    return {discount * mean, discount * std::sqrt(var / n), n * per_path};
}

}  // namespace kou2d
