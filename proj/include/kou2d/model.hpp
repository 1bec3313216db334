#pragma once

#include <string>
#include <string_view>

namespace kou2d {

/// Market and model parameters of the two-asset Kou jump-diffusion model.
///
/// Jumps arrive contemporaneously in both assets at rate `lambda`; the log
/// jump sizes are independent double-exponential per asset. `p1`/`p2` are the
/// probabilities of an upward jump, the downward probabilities are 1 - p.
struct KouParams {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double r = 0.0;
    double rho = 0.0;
    double lambda = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double eta_p1 = 0.0;
    double eta_q1 = 0.0;
    double eta_p2 = 0.0;
    double eta_q2 = 0.0;
    double K = 0.0;
    double T = 0.0;
    double S_max = 0.0;

    double q1() const { return 1.0 - p1; }
    double q2() const { return 1.0 - p2; }
    double kappa1() const;
    double kappa2() const;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

enum class ParameterSetLabel { Set1, Set2, Set3 };

struct ParameterSet {
    ParameterSetLabel label;
    KouParams params;
};

/// The three reference parameter sets (S_max = 20K, 10K, 30K respectively).
ParameterSet parameter_set(ParameterSetLabel label);

/// Accepts "set1", "1", "Set1" (case-insensitive).
ParameterSet parameter_set(std::string_view label);

std::string to_string(ParameterSetLabel label);

/// Expected relative jump size E[Y - 1] of one asset.
double kappa(double p, double eta_p, double eta_q);

/// Marginal density of the relative jump size Y = e^X of one asset.
double marginal_density(double y, double p, double eta_p, double eta_q);

/// Marginal CDF P(Y <= y) of the relative jump size of one asset.
double marginal_cdf(double y, double p, double eta_p, double eta_q);

/// Joint density f(y1, y2) of the two relative jump sizes.
/// The y_i = 1 boundary belongs to the y_i >= 1 branches.
double density(double y1, double y2, const KouParams& params);

/// Put-on-the-average payoff max(0, K - (s1 + s2) / 2).
double payoff(double s1, double s2, double K);

}  // namespace kou2d
