#include "kou2d/spatial.hpp"

#include <limits>
#include <stdexcept>

namespace kou2d {

namespace {

void check_widths(double h_left, double h_right) {
    if (!(h_left > 0.0) || !(h_right > 0.0)) throw std::invalid_argument("fd weights: widths must be positive");
}

void check_shape(std::size_t expected, std::span<const double> v, std::span<double> y) {
    if (v.size() != expected || y.size() != expected) throw std::invalid_argument("spatial operator: shape mismatch");
}

}  // namespace

StencilWeights fd_weights_first(double hl, double hr) {
    check_widths(hl, hr);
    return {-hr / (hl * (hl + hr)), (hr - hl) / (hl * hr), hl / (hr * (hl + hr))};
}

StencilWeights fd_weights_second(double hl, double hr) {
    check_widths(hl, hr);
    return {2.0 / (hl * (hl + hr)), -2.0 / (hl * hr), 2.0 / (hr * (hl + hr))};
}

void TriDiagOp::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    if (x.size() != n || y.size() != n) throw std::invalid_argument("TriDiagOp::apply: shape mismatch");
    if (n == 1) {
        y[0] = diag[0] * x[0];
        return;
    }
    y[0] = diag[0] * x[0] + upper[0] * x[1];
    for (std::size_t i = 1; i + 1 < n; ++i) y[i] = lower[i] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
    y[n - 1] = lower[n - 1] * x[n - 2] + diag[n - 1] * x[n - 1];
}

namespace {

template <bool Accumulate>
inline void store(double& out, double value) {
    if constexpr (Accumulate)
        out += value;
    else
        out = value;
}

template <bool Accumulate>
void apply_rows(const TriDiagOp& op, std::size_t n1, std::size_t n2, const double* v, double* y) {
    const double* lo = op.lower.data();
    const double* di = op.diag.data();
    const double* up = op.upper.data();
    for (std::size_t j = 0; j < n2; ++j) {
        const double* x = v + j * n1;
        double* out = y + j * n1;
        store<Accumulate>(out[0], di[0] * x[0] + up[0] * x[1]);
        for (std::size_t i = 1; i + 1 < n1; ++i) store<Accumulate>(out[i], lo[i] * x[i - 1] + di[i] * x[i] + up[i] * x[i + 1]);
        store<Accumulate>(out[n1 - 1], lo[n1 - 1] * x[n1 - 2] + di[n1 - 1] * x[n1 - 1]);
    }
}

// Combines three rows: out = wl * rl + wc * rc + wu * ru.
template <bool Accumulate>
void combine_rows(std::size_t n, double wl, const double* rl, double wc, const double* rc, double wu, const double* ru,
                  double* out) {
    for (std::size_t i = 0; i < n; ++i) store<Accumulate>(out[i], wl * rl[i] + wc * rc[i] + wu * ru[i]);
}

template <bool Accumulate>
void apply_columns(const TriDiagOp& op, std::size_t n1, std::size_t n2, const double* v, double* y) {
    for (std::size_t j = 0; j < n2; ++j) {
        const double* xc = v + j * n1;
        const double* xl = j > 0 ? xc - n1 : xc;
        const double* xu = j + 1 < n2 ? xc + n1 : xc;
        const double wl = j > 0 ? op.lower[j] : 0.0;
        const double wu = j + 1 < n2 ? op.upper[j] : 0.0;
        combine_rows<Accumulate>(n1, wl, xl, op.diag[j], xc, wu, xu, y + j * n1);
    }
}

}  // namespace

void apply_along(const TriDiagOp& op, Direction dir, int m1, int m2, std::span<const double> v, std::span<double> y,
                 bool accumulate) {
    const std::size_t n1 = static_cast<std::size_t>(m1) + 1;
    const std::size_t n2 = static_cast<std::size_t>(m2) + 1;
    check_shape(n1 * n2, v, y);
    if (op.size() != (dir == Direction::S1 ? n1 : n2)) throw std::invalid_argument("apply_along: operator size mismatch");
    if (dir == Direction::S1) {
        if (accumulate)
            apply_rows<true>(op, n1, n2, v.data(), y.data());
        else
            apply_rows<false>(op, n1, n2, v.data(), y.data());
    } else {
        if (accumulate)
            apply_columns<true>(op, n1, n2, v.data(), y.data());
        else
            apply_columns<false>(op, n1, n2, v.data(), y.data());
    }
}

TriDiagOp first_derivative_scaled(const Grid1D& g) {
    const int m = g.cells();
    TriDiagOp op(static_cast<std::size_t>(m) + 1);
    for (int i = 1; i < m; ++i) {
        const auto w = fd_weights_first(g.width(i), g.width(i + 1));
        op.lower[i] = g[i] * w[0];
        op.diag[i] = g[i] * w[1];
        op.upper[i] = g[i] * w[2];
    }
    const double hm = g.width(m);
    op.lower[m] = -g[m] / hm;
    op.diag[m] = g[m] / hm;
    return op;
}

void MixedOp::apply(int m1, int m2, std::span<const double> v, std::span<double> y, bool accumulate) const {
    const std::size_t n1 = static_cast<std::size_t>(m1) + 1;
    const std::size_t n2 = static_cast<std::size_t>(m2) + 1;
    check_shape(n1 * n2, v, y);
    if (b1.size() != n1 || b2.size() != n2) throw std::invalid_argument("MixedOp::apply: operator size mismatch");
    // Rolling window of (I (x) b1) v over rows j-1, j, j+1.
    thread_local std::vector<double> rows;
    rows.resize(3 * n1);
    auto row_of = [&](std::size_t j) { return rows.data() + (j % 3) * n1; };
    auto transform_row = [&](std::size_t j) { b1.apply(v.subspan(j * n1, n1), std::span<double>(row_of(j), n1)); };
    transform_row(0);
    for (std::size_t j = 0; j < n2; ++j) {
        if (j + 1 < n2) transform_row(j + 1);
        const double wl = j > 0 ? coeff * b2.lower[j] : 0.0;
        const double wc = coeff * b2.diag[j];
        const double wu = j + 1 < n2 ? coeff * b2.upper[j] : 0.0;
        const double* rc = row_of(j);
        const double* rl = j > 0 ? row_of(j - 1) : rc;
        const double* ru = j + 1 < n2 ? row_of(j + 1) : rc;
        if (accumulate)
            combine_rows<true>(n1, wl, rl, wc, rc, wu, ru, y.data() + j * n1);
        else
            combine_rows<false>(n1, wl, rl, wc, rc, wu, ru, y.data() + j * n1);
    }
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n || y.size() != n) throw std::invalid_argument("CsrMatrix::multiply: shape mismatch");
    for (std::size_t r = 0; r < n; ++r) {
        double acc = 0.0;
        for (std::uint32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
        y[r] = acc;
    }
}

namespace {

TriDiagOp direction_operator(const Grid1D& g, double sigma, double drift, double reaction_half) {
    const int m = g.cells();
    TriDiagOp op(static_cast<std::size_t>(m) + 1);
    op.diag[0] = -reaction_half;
    for (int i = 1; i < m; ++i) {
        const double hl = g.width(i);
        const double hr = g.width(i + 1);
        const auto w1 = fd_weights_first(hl, hr);
        const auto w2 = fd_weights_second(hl, hr);
        const double diff = 0.5 * sigma * sigma * g[i] * g[i];
        const double conv = drift * g[i];
        op.lower[i] = diff * w2[0] + conv * w1[0];
        op.diag[i] = diff * w2[1] + conv * w1[1] - reaction_half;
        op.upper[i] = diff * w2[2] + conv * w1[2];
    }
    // Linear boundary condition: no diffusion, backward first derivative.
    const double conv = drift * g[m] / g.width(m);
    op.lower[m] = -conv;
    op.diag[m] = conv - reaction_half;
    return op;
}

}  // namespace

SpatialOperators::SpatialOperators(const Grid2D& grid, const KouParams& p) : m1_(grid.m1()), m2_(grid.m2()) {
    p.validate();
    const double half_reaction = 0.5 * (p.r + p.lambda);
    a1_ = direction_operator(grid.g1, p.sigma1, p.r - p.lambda * p.kappa1(), half_reaction);
    a2_ = direction_operator(grid.g2, p.sigma2, p.r - p.lambda * p.kappa2(), half_reaction);
    mixed_.coeff = p.rho * p.sigma1 * p.sigma2;
    mixed_.b1 = first_derivative_scaled(grid.g1);
    mixed_.b2 = first_derivative_scaled(grid.g2);
}

void SpatialOperators::apply_a1(std::span<const double> v, std::span<double> y) const {
    apply_along(a1_, Direction::S1, m1_, m2_, v, y);
}

void SpatialOperators::apply_a2(std::span<const double> v, std::span<double> y) const {
    apply_along(a2_, Direction::S2, m1_, m2_, v, y);
}

void SpatialOperators::apply_direction(Direction dir, std::span<const double> v, std::span<double> y) const {
    apply_along(direction(dir), dir, m1_, m2_, v, y);
}

void SpatialOperators::apply_mixed(std::span<const double> v, std::span<double> y) const {
    mixed_.apply(m1_, m2_, v, y);
}

void SpatialOperators::apply_AD(std::span<const double> v, std::span<double> y) const {
    mixed_.apply(m1_, m2_, v, y);
    apply_along(a1_, Direction::S1, m1_, m2_, v, y, true);
    apply_along(a2_, Direction::S2, m1_, m2_, v, y, true);
}

GridFunction SpatialOperators::apply_AD(const GridFunction& v) const {
    if (v.m1() != m1_ || v.m2() != m2_) throw std::invalid_argument("apply_AD: shape mismatch");
    GridFunction y(m1_, m2_);
    apply_AD(v.values(), y.values());
    return y;
}

CsrMatrix SpatialOperators::implicit_matrix(double scale) const {
    const std::size_t n1 = static_cast<std::size_t>(m1_) + 1;
    const std::size_t n2 = static_cast<std::size_t>(m2_) + 1;
    CsrMatrix a;
    a.n = n1 * n2;
    if (9 * a.n > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("implicit_matrix: grid too large");
    a.row_ptr.reserve(a.n + 1);
    a.col.reserve(9 * a.n);
    a.val.reserve(9 * a.n);
    a.row_ptr.push_back(0);
    auto band = [](const TriDiagOp& op, std::size_t i, int d) {
        if (d < 0) return op.lower[i];
        if (d > 0) return op.upper[i];
        return op.diag[i];
    };
    for (std::size_t j = 0; j < n2; ++j) {
        for (std::size_t i = 0; i < n1; ++i) {
            for (int dj = -1; dj <= 1; ++dj) {
                if ((dj < 0 && j == 0) || (dj > 0 && j + 1 == n2)) continue;
                for (int di = -1; di <= 1; ++di) {
                    if ((di < 0 && i == 0) || (di > 0 && i + 1 == n1)) continue;
                    double a_val = mixed_.coeff * band(mixed_.b2, j, dj) * band(mixed_.b1, i, di);
                    if (dj == 0) a_val += band(a1_, i, di);
                    if (di == 0) a_val += band(a2_, j, dj);
                    const bool diagonal = di == 0 && dj == 0;
                    const double entry = (diagonal ? 1.0 : 0.0) - scale * a_val;
                    if (!diagonal && entry == 0.0) continue;
                    a.col.push_back(static_cast<std::uint32_t>((j + static_cast<std::size_t>(dj)) * n1 + i + static_cast<std::size_t>(di)));
                    a.val.push_back(entry);
                }
            }
            a.row_ptr.push_back(static_cast<std::uint32_t>(a.col.size()));
        }
    }
    return a;
}

}  // namespace kou2d
