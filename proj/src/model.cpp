#include "kou2d/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace kou2d {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("KouParams: ") + what);
}

}  // namespace

double kappa(double p, double eta_p, double eta_q) {
    if (!(eta_p > 1.0)) throw std::invalid_argument("kappa: eta_p must exceed 1");
    if (!(eta_q > 0.0)) throw std::invalid_argument("kappa: eta_q must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("kappa: p must lie in [0, 1]");
    return p * eta_p / (eta_p - 1.0) + (1.0 - p) * eta_q / (eta_q + 1.0) - 1.0;
}

double KouParams::kappa1() const { return kappa(p1, eta_p1, eta_q1); }
double KouParams::kappa2() const { return kappa(p2, eta_p2, eta_q2); }

void KouParams::validate() const {
    require(sigma1 > 0.0, "sigma1 must be positive");
    require(sigma2 > 0.0, "sigma2 must be positive");
    require(rho >= -1.0 && rho <= 1.0, "rho must lie in [-1, 1]");
    require(lambda >= 0.0, "lambda must be nonnegative");
    require(p1 >= 0.0 && p1 <= 1.0, "p1 must lie in [0, 1]");
    require(p2 >= 0.0 && p2 <= 1.0, "p2 must lie in [0, 1]");
    require(eta_p1 > 1.0, "eta_p1 must exceed 1");
    require(eta_p2 > 1.0, "eta_p2 must exceed 1");
    require(eta_q1 > 0.0, "eta_q1 must be positive");
    require(eta_q2 > 0.0, "eta_q2 must be positive");
    require(K > 0.0, "K must be positive");
    require(T > 0.0, "T must be positive");
    require(S_max > 2.0 * K, "S_max must exceed 2K");
    require(std::isfinite(r), "r must be finite");
}

ParameterSet parameter_set(ParameterSetLabel label) {
    KouParams k;
    switch (label) {
        case ParameterSetLabel::Set1:
            k = {.sigma1 = 0.12, .sigma2 = 0.15, .r = 0.05, .rho = 0.30, .lambda = 0.50,
                 .p1 = 0.40, .p2 = 0.60,
                 .eta_p1 = 1.0 / 0.20, .eta_q1 = 1.0 / 0.15,
                 .eta_p2 = 1.0 / 0.18, .eta_q2 = 1.0 / 0.14,
                 .K = 100.0, .T = 1.0, .S_max = 2000.0};
            break;
        case ParameterSetLabel::Set2:
            k = {.sigma1 = 0.15, .sigma2 = 0.20, .r = 0.05, .rho = 0.50, .lambda = 0.20,
                 .p1 = 0.3445, .p2 = 0.50,
                 .eta_p1 = 3.0465, .eta_q1 = 3.0775, .eta_p2 = 3.0, .eta_q2 = 2.0,
                 .K = 100.0, .T = 0.2, .S_max = 1000.0};
            break;
        case ParameterSetLabel::Set3:
            k = {.sigma1 = 0.20, .sigma2 = 0.30, .r = 0.05, .rho = 0.70, .lambda = 8.0,
                 .p1 = 0.60, .p2 = 0.65,
                 .eta_p1 = 5.0, .eta_q1 = 4.0, .eta_p2 = 4.0, .eta_q2 = 3.0,
                 .K = 100.0, .T = 1.0, .S_max = 3000.0};
            break;
    }
    return {label, k};
}

ParameterSet parameter_set(std::string_view label) {
    std::string s;
    for (char c : label) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s.rfind("set", 0) == 0) s.erase(0, 3);
    if (s == "1") return parameter_set(ParameterSetLabel::Set1);
    if (s == "2") return parameter_set(ParameterSetLabel::Set2);
    if (s == "3") return parameter_set(ParameterSetLabel::Set3);
    throw std::invalid_argument("unknown parameter set '" + std::string(label) + "'");
}

std::string to_string(ParameterSetLabel label) {
    switch (label) {
        case ParameterSetLabel::Set1: return "set1";
        case ParameterSetLabel::Set2: return "set2";
        case ParameterSetLabel::Set3: return "set3";
    }
    return "unknown";
}

double marginal_density(double y, double p, double eta_p, double eta_q) {
    if (!(y > 0.0)) throw std::invalid_argument("marginal_density: y must be positive");
    if (y >= 1.0) return p * eta_p * std::pow(y, -eta_p - 1.0);
    return (1.0 - p) * eta_q * std::pow(y, eta_q - 1.0);
}

double marginal_cdf(double y, double p, double eta_p, double eta_q) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0 - p * std::pow(y, -eta_p);
    return (1.0 - p) * std::pow(y, eta_q);
}

double density(double y1, double y2, const KouParams& k) {
    if (!(y1 > 0.0) || !(y2 > 0.0)) throw std::invalid_argument("density: y1 and y2 must be positive");
    const double q1 = k.q1();
    const double q2 = k.q2();
    const bool up1 = y1 >= 1.0;
    const bool up2 = y2 >= 1.0;
    if (!up1 && !up2)
        return q1 * q2 * k.eta_q1 * k.eta_q2 * std::pow(y1, k.eta_q1 - 1.0) * std::pow(y2, k.eta_q2 - 1.0);
    if (up1 && !up2)
        return k.p1 * q2 * k.eta_p1 * k.eta_q2 * std::pow(y1, -k.eta_p1 - 1.0) * std::pow(y2, k.eta_q2 - 1.0);
    if (!up1 && up2)
        return q1 * k.p2 * k.eta_q1 * k.eta_p2 * std::pow(y1, k.eta_q1 - 1.0) * std::pow(y2, -k.eta_p2 - 1.0);
    return k.p1 * k.p2 * k.eta_p1 * k.eta_p2 * std::pow(y1, -k.eta_p1 - 1.0) * std::pow(y2, -k.eta_p2 - 1.0);
}

double payoff(double s1, double s2, double K) { return std::max(0.0, K - 0.5 * (s1 + s2)); }

}  // namespace kou2d
