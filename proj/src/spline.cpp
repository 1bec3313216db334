#include "kou2d/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace kou2d {

namespace {

// Thomas algorithm on a small dense-band system; a[0] and c[n-1] are ignored.
void solve_tridiagonal(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c, std::vector<double>& d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    d[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

}  // namespace

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("CubicSpline: need at least two knots and matching values");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("CubicSpline: knots must be increasing");
    if (n == 2) return;
    if (n == 3) {
        const double d0 = (y_[1] - y_[0]) / (x_[1] - x_[0]);
        const double d1 = (y_[2] - y_[1]) / (x_[2] - x_[1]);
        std::fill(m_.begin(), m_.end(), 2.0 * (d1 - d0) / (x_[2] - x_[0]));
        return;
    }
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
    // Unknowns M_1 .. M_{n-2}; M_0 and M_{n-1} follow from continuity of the
    // third derivative at x_1 and x_{n-2}.
    const std::size_t k = n - 2;
    std::vector<double> a(k), b(k), c(k), d(k);
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t i = r + 1;
        a[r] = h[i - 1];
        b[r] = 2.0 * (h[i - 1] + h[i]);
        c[r] = h[i];
        d[r] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    // M_0 = ((h0 + h1) M_1 - h0 M_2) / h1
    b[0] += h[0] * (h[0] + h[1]) / h[1];
    c[0] -= h[0] * h[0] / h[1];
    // M_{n-1} = ((h_{n-2} + h_{n-3}) M_{n-2} - h_{n-2} M_{n-3}) / h_{n-3}
    const double hl = h[n - 2];
    const double hp = h[n - 3];
    b[k - 1] += hl * (hl + hp) / hp;
    a[k - 1] -= hl * hl / hp;
    solve_tridiagonal(a, b, c, d);
    for (std::size_t r = 0; r < k; ++r) m_[r + 1] = d[r];
    m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
    m_[n - 1] = ((hl + hp) * m_[n - 2] - hl * m_[n - 3]) / hp;
}

double CubicSpline::operator()(double t) const {
    const std::size_t n = x_.size();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
    i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double spline_interpolate(const Grid2D& grid, const GridFunction& v, double s1, double s2) {
    if (v.m1() != grid.m1() || v.m2() != grid.m2()) throw std::invalid_argument("spline_interpolate: shape mismatch");
    const auto x1 = grid.g1.points();
    const std::size_t n1 = x1.size();
    std::vector<double> along(grid.g2.size());
    for (int j = 0; j <= grid.m2(); ++j) {
        const auto line = v.values().subspan(static_cast<std::size_t>(j) * n1, n1);
        along[static_cast<std::size_t>(j)] = CubicSpline(x1, line)(s1);
    }
    return CubicSpline(grid.g2.points(), along)(s2);
}

}  // namespace kou2d
