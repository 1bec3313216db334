#include "kou2d/stability.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace kou2d {

namespace {

constexpr double kSlack = 1.0 + 1e-12;

cplx checked_inverse(cplx d, const char* who) {
    if (d == cplx(0.0, 0.0)) throw std::domain_error(std::string(who) + ": pole");
    return 1.0 / d;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Sampler {
public:
    Sampler(const SamplerConfig& cfg, std::uint64_t index) : cfg_(cfg), rng_(splitmix64(cfg.seed ^ splitmix64(index))) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }

    // Complex number in the closed left half-plane.
    cplx left_half() { return std::polar(log_uniform(cfg_.z_min, cfg_.z_max), uniform(0.5, 1.5) * std::numbers::pi); }
    double negative_real() { return -log_uniform(cfg_.z_min, cfg_.z_max); }
    cplx w0() { return std::polar(log_uniform(cfg_.w0_min, cfg_.w0_max), uniform(0.0, 2.0) * std::numbers::pi); }

private:
    const SamplerConfig& cfg_;
    std::mt19937_64 rng_;
};

EigQuadruple draw(TheoremPart part, Sampler& s, double gamma) {
    EigQuadruple q{};
    switch (part) {
        case TheoremPart::T1a:
        case TheoremPart::T1b:
        case TheoremPart::T1c:
        case TheoremPart::T1d:
            // Only w = z0 + z1 + z2 enters the IMEX functions; carry it in z0.
            q.z0 = s.left_half();
            break;
        case TheoremPart::T2a:
        case TheoremPart::T3a: {
            const double z1 = s.negative_real();
            const double z2 = s.negative_real();
            const double bound = 2.0 * gamma * std::sqrt(z1 * z2);
            q.z1 = z1;
            q.z2 = z2;
            q.z0 = s.uniform(-bound, bound);
            break;
        }
        case TheoremPart::T2b:
        case TheoremPart::T3b: {
            q.z1 = s.left_half();
            q.z2 = s.left_half();
            const double bound = 2.0 * gamma * std::sqrt(q.z1.real() * q.z2.real());
            q.z0 = std::polar(bound * s.uniform(0.0, 1.0), s.uniform(0.0, 2.0) * std::numbers::pi);
            break;
        }
    }
    q.w0 = s.w0();
    return q;
}

}  // namespace

Mat2 to_matrix(const Companion2& c) { return {c.r1, c.r0, 1.0, 0.0}; }

Mat2 multiply(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

double max_norm(const Mat2& a) { return std::max(std::abs(a[0]) + std::abs(a[1]), std::abs(a[2]) + std::abs(a[3])); }

cplx stab_cnfe(cplx w, cplx w0) { return (1.0 + 0.5 * w + w0) * checked_inverse(1.0 - 0.5 * w, "stab_cnfe"); }

cplx stab_cnfi(cplx w, cplx w0, int l) {
    if (l < 1) throw std::invalid_argument("stab_cnfi: l must be at least 1");
    const cplx inv = checked_inverse(1.0 - 0.5 * w, "stab_cnfi");
    const cplx a = 0.5 * w0 * inv;
    const cplx b = (1.0 + 0.5 * w + 0.5 * w0) * inv;
    cplx sum = 0.0;
    cplx ak = 1.0;
    for (int k = 0; k < l; ++k) {
        sum += ak * b;
        ak *= a;
    }
    return ak + sum;
}

cplx stab_ietr(cplx w, cplx w0) {
    return (1.0 + 0.5 * w + w0 + 0.5 * (w + w0) * w0) * checked_inverse(1.0 - 0.5 * w, "stab_ietr");
}

Companion2 stab_cnab(cplx w, cplx w0) {
    const cplx inv = checked_inverse(1.0 - 0.5 * w, "stab_cnab");
    return {(1.0 + 0.5 * w + 1.5 * w0) * inv, -0.5 * w0 * inv};
}

cplx stab_mcs(const EigQuadruple& q, double theta) {
    const cplx p = (1.0 - theta * q.z1) * (1.0 - theta * q.z2);
    const cplx ip = checked_inverse(p, "stab_mcs");
    const cplx s = q.w() + q.w0;
    return 1.0 + s * ip + theta * (q.z0 + q.w0) * s * ip * ip + (0.5 - theta) * s * s * ip * ip;
}

Companion2 stab_mcs2(const EigQuadruple& q, double theta) {
    const cplx p = (1.0 - theta * q.z1) * (1.0 - theta * q.z2);
    const cplx ip = checked_inverse(p, "stab_mcs2");
    const cplx f = ip + theta * q.z0 * ip * ip + (0.5 - theta) * q.w() * ip * ip;
    return {1.0 + (q.w() + 1.5 * q.w0) * f, -0.5 * q.w0 * f};
}

Companion2 stab_sc2a(const EigQuadruple& q, double theta) {
    const cplx p = (1.0 - theta * q.z1) * (1.0 - theta * q.z2);
    const cplx ip = checked_inverse(p, "stab_sc2a");
    const double bh1 = 1.5, bh2 = -0.5;
    const double bc1 = 1.5 - theta, bc2 = -0.5 + theta;
    const cplx explicit_part = q.z0 + q.w0;
    const cplx split_part = q.z1 + q.z2;
    return {1.0 + ip * (bh1 * explicit_part + bc1 * split_part), ip * (bh2 * explicit_part + bc2 * split_part)};
}

bool check_condition(const EigQuadruple& q, double gamma) {
    const double a = q.z1.real();
    const double b = q.z2.real();
    if (a > 0.0 || b > 0.0) return false;
    return std::abs(q.z0) <= 2.0 * gamma * std::sqrt(a * b);
}

const std::array<TheoremPart, 8>& all_theorem_parts() {
    static const std::array<TheoremPart, 8> parts = {TheoremPart::T1a, TheoremPart::T1b, TheoremPart::T1c,
                                                     TheoremPart::T1d, TheoremPart::T2a, TheoremPart::T2b,
                                                     TheoremPart::T3a, TheoremPart::T3b};
    return parts;
}

std::string to_string(TheoremPart part) {
    switch (part) {
        case TheoremPart::T1a: return "1a";
        case TheoremPart::T1b: return "1b";
        case TheoremPart::T1c: return "1c";
        case TheoremPart::T1d: return "1d";
        case TheoremPart::T2a: return "2a";
        case TheoremPart::T2b: return "2b";
        case TheoremPart::T3a: return "3a";
        case TheoremPart::T3b: return "3b";
    }
    return "?";
}

std::string scheme_of(TheoremPart part) {
    switch (part) {
        case TheoremPart::T1a: return "CNFE";
        case TheoremPart::T1b: return "CNFI";
        case TheoremPart::T1c: return "IETR";
        case TheoremPart::T1d: return "CNAB";
        case TheoremPart::T2a:
        case TheoremPart::T2b: return "MCS";
        case TheoremPart::T3a:
        case TheoremPart::T3b: return "MCS2";
    }
    return "?";
}

std::vector<EigQuadruple> sample_quadruples(TheoremPart part, const SamplerConfig& cfg) {
    if (cfg.samples < 1) throw std::invalid_argument("sampler: samples must be positive");
    if (!(cfg.z_min > 0.0) || !(cfg.z_max >= cfg.z_min)) throw std::invalid_argument("sampler: bad z range");
    if (!(cfg.w0_min > 0.0) || !(cfg.w0_max >= cfg.w0_min)) throw std::invalid_argument("sampler: bad w0 range");
    std::vector<EigQuadruple> out;
    out.reserve(static_cast<std::size_t>(cfg.samples));
    for (int k = 0; k < cfg.samples; ++k) {
        Sampler s(cfg, static_cast<std::uint64_t>(k));
        out.push_back(draw(part, s, cfg.gamma));
    }
    return out;
}

BoundReport verify_bounds(TheoremPart part, const SamplerConfig& cfg, int n_max, double theta) {
    if (n_max < 1) throw std::invalid_argument("verify_bounds: n_max must be positive");
    const bool part_b = part == TheoremPart::T2b || part == TheoremPart::T3b;
    if (!(theta > 0.0)) theta = part_b ? 0.5 : 1.0 / 3.0;
    BoundReport report;
    report.part = part;
    report.theta = theta;
    report.samples = cfg.samples;
    report.n_max = n_max;
    const double c_adi = std::max(1.0 / theta, 2.0);

    for (const EigQuadruple& q : sample_quadruples(part, cfg)) {
        const double a0 = std::abs(q.w0);
        double rate = 0.0;  // bound is exp(rate * n)
        bool scalar = true;
        cplx r = 0.0;
        Companion2 c{};
        switch (part) {
            case TheoremPart::T1a: r = stab_cnfe(q.z0, q.w0); rate = a0; break;
            case TheoremPart::T1b: {
                // t_n = n dt and T = n_max dt, so |lambda0| T = n_max |w0|.
                double cl = 0.0, term = 1.0;
                for (int k = 0; k < cfg.l; ++k) {
                    cl += term;
                    term *= 0.5 * n_max * a0;
                }
                r = stab_cnfi(q.z0, q.w0, cfg.l);
                rate = cl * a0;
                break;
            }
            case TheoremPart::T1c: r = stab_ietr(q.z0, q.w0); rate = a0; break;
            case TheoremPart::T1d: c = stab_cnab(q.z0, q.w0); scalar = false; rate = 2.0 * a0; break;
            case TheoremPart::T2a:
            case TheoremPart::T2b: r = stab_mcs(q, theta); rate = c_adi * a0; break;
            case TheoremPart::T3a:
            case TheoremPart::T3b: c = stab_mcs2(q, theta); scalar = false; rate = 2.0 * c_adi * a0; break;
        }
        cplx rn = 1.0;
        const Mat2 cm = to_matrix(c);
        Mat2 cn = {1.0, 0.0, 0.0, 1.0};
        bool violated = false;
        for (int n = 1; n <= n_max; ++n) {
            double value;
            if (scalar) {
                rn *= r;
                value = std::abs(rn);
            } else {
                cn = multiply(cn, cm);
                value = max_norm(cn);
            }
            const double ratio = value / std::exp(rate * n);
            report.max_ratio = std::max(report.max_ratio, ratio);
            if (!(ratio <= kSlack)) violated = true;
        }
        if (violated) {
            ++report.violations;
            if (!report.first_violation) report.first_violation = q;
        }
    }
    return report;
}

}  // namespace kou2d
