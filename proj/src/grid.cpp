#include "kou2d/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace kou2d {

Grid1D::Grid1D(std::vector<double> points) : s_(std::move(points)) {
    if (s_.size() < 3) throw std::invalid_argument("Grid1D: need at least two cells");
    for (std::size_t i = 1; i < s_.size(); ++i)
        if (!(s_[i] > s_[i - 1])) throw std::invalid_argument("Grid1D: points must be strictly increasing");
}

double Grid1D::lower_mid(int l) const {
    if (l == 0) return -0.5 * (s_[0] + s_[1]);
    return 0.5 * (s_[l - 1] + s_[l]);
}

double Grid1D::upper_mid(int l) const {
    if (l == cells()) return s_.back();
    return 0.5 * (s_[l] + s_[l + 1]);
}

MeshMap::MeshMap(double K_, double S_max_, double d_) : K(K_), S_max(S_max_), d(d_) {
    if (!(d > 0.0)) throw std::invalid_argument("build_mesh: d must be positive");
    if (!(K > 0.0)) throw std::invalid_argument("build_mesh: K must be positive");
    xi_int = 2.0 * K / d;
    const double arg = S_max / d - xi_int;
    if (!(arg > 0.0)) throw std::invalid_argument("build_mesh: S_max must exceed 2K");
    xi_max = xi_int + std::asinh(arg);
}

double MeshMap::operator()(double xi) const {
    if (xi <= xi_int) return d * xi;
    return 2.0 * K + d * std::sinh(xi - xi_int);
}

Grid1D build_mesh(int m, double K, double S_max, double d) {
    if (m < 2) throw std::invalid_argument("build_mesh: m must be at least 2");
    const MeshMap map(K, S_max, d);
    const double dxi = map.xi_max / m;
    std::vector<double> s(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) s[i] = map(i * dxi);
    s[0] = 0.0;
    s[m] = S_max;
    return Grid1D(std::move(s));
}

Grid2D build_grid(int m1, int m2, const KouParams& params, double d) {
    const double stretch = d > 0.0 ? d : params.K / 10.0;
    return {build_mesh(m1, params.K, params.S_max, stretch), build_mesh(m2, params.K, params.S_max, stretch)};
}

namespace {

// Third antiderivative of t -> max(t, 0).
double ramp3(double t) { return t > 0.0 ? t * t * t / 6.0 : 0.0; }

}  // namespace

double payoff_integral(double a1, double b1, double a2, double b2, double K) {
    // d^2/ds1 ds2 of ramp3(2K - s1 - s2) is max(0, 2K - s1 - s2), twice the payoff.
    const double L = 2.0 * K;
    const double sum = ramp3(L - b1 - b2) - ramp3(L - a1 - b2) - ramp3(L - b1 - a2) + ramp3(L - a1 - a2);
    return 0.5 * sum;
}

GridFunction cell_average_payoff(const Grid2D& grid, const KouParams& params) {
    const double K = params.K;
    const double kink = 2.0 * K;
    GridFunction v(grid);
    for (int j = 0; j <= grid.m2(); ++j) {
        const double lo2 = grid.g2.lower_mid(j);
        const double hi2 = grid.g2.upper_mid(j);
        for (int i = 0; i <= grid.m1(); ++i) {
            const double lo1 = grid.g1.lower_mid(i);
            const double hi1 = grid.g1.upper_mid(i);
            if (lo1 + lo2 < kink && hi1 + hi2 > kink) {
                v(i, j) = payoff_integral(lo1, hi1, lo2, hi2, K) / ((hi1 - lo1) * (hi2 - lo2));
            } else {
                v(i, j) = payoff(grid.g1[i], grid.g2[j], K);
            }
        }
    }
    return v;
}

}  // namespace kou2d
