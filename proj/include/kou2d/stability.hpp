#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kou2d {

using cplx = std::complex<double>;

/// Scaled eigenvalues z_j = mu_j dt of A^(M), A1, A2 and w0 = lambda0 dt of A^(J).
struct EigQuadruple {
    cplx z0;
    cplx z1;
    cplx z2;
    cplx w0;

    cplx w() const { return z0 + z1 + z2; }
};

/// Companion matrix ((R1, R0), (1, 0)) of a two-step recurrence.
struct Companion2 {
    cplx r1;
    cplx r0;
};

using Mat2 = std::array<cplx, 4>;  // row major

Mat2 to_matrix(const Companion2& c);
Mat2 multiply(const Mat2& a, const Mat2& b);
/// Maximum absolute row sum.
double max_norm(const Mat2& a);

cplx stab_cnfe(cplx w, cplx w0);
cplx stab_cnfi(cplx w, cplx w0, int l);
cplx stab_ietr(cplx w, cplx w0);
Companion2 stab_cnab(cplx w, cplx w0);
cplx stab_mcs(const EigQuadruple& q, double theta);
Companion2 stab_mcs2(const EigQuadruple& q, double theta);
Companion2 stab_sc2a(const EigQuadruple& q, double theta);

/// |z0| <= 2 gamma sqrt(Re z1 Re z2) with Re z1, Re z2 <= 0.
bool check_condition(const EigQuadruple& q, double gamma = 1.0);

enum class TheoremPart { T1a, T1b, T1c, T1d, T2a, T2b, T3a, T3b };

const std::array<TheoremPart, 8>& all_theorem_parts();
std::string to_string(TheoremPart part);
/// Scheme whose bound the part states.
std::string scheme_of(TheoremPart part);

struct SamplerConfig {
    int samples = 10000;
    double z_min = 1e-3;  // magnitudes are log-uniform in [z_min, z_max]
    double z_max = 1e3;
    double w0_min = 1e-4;
    double w0_max = 0.1;
    double gamma = 1.0;
    int l = 2;
    std::uint64_t seed = 20240601;
};

struct BoundReport {
    TheoremPart part;
    double theta = 0.0;
    int samples = 0;
    int n_max = 0;
    double max_ratio = 0.0;  // max over samples and n of |R^n| / bound
    long violations = 0;
    std::optional<EigQuadruple> first_violation;

    bool passed() const { return violations == 0; }
};

/// Draws `cfg.samples` quadruples satisfying the hypothesis of `part` and checks
/// the exponential bound for n = 1..n_max. `theta` <= 0 selects 1/3 for parts
/// (a) and 1/2 for parts (b).
BoundReport verify_bounds(TheoremPart part, const SamplerConfig& cfg, int n_max, double theta = 0.0);

/// Sampled quadruples for the hypothesis of `part` (exposed for tests).
std::vector<EigQuadruple> sample_quadruples(TheoremPart part, const SamplerConfig& cfg);

}  // namespace kou2d
