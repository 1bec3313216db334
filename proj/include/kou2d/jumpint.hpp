#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "kou2d/grid.hpp"
#include "kou2d/model.hpp"

namespace kou2d {

/// Linear-interpolation weights of one mesh direction against one branch of the
/// jump density: for cell k = [s_{k-1}, s_k],
///   w0[k] = int (s_k - z) phi(z) dz / h_k,  w1[k] = int (z - s_{k-1}) phi(z) dz / h_k,
/// with phi(z) = z^(eta - 1) (downward branch) or z^(-eta - 1) (upward branch).
/// Index 0 is unused; for the upward branch cell 1 is never referenced and left zero.
struct AxisWeights {
    std::vector<double> w0;
    std::vector<double> w1;
};

/// Power-difference closed form (hi^(a+e) - lo^(a+e)) / (a + e), the integral of
/// z^(a+e-1) over [lo, hi]; `exponent` e is eta_q or -eta_p.
double zeta_1d(double lo, double hi, double exponent, int a);

/// Everything the integral evaluation needs that depends only on grid and parameters.
///
/// Branch nu = 1..4 corresponds to (down, down), (up, down), (down, up), (up, up)
/// jumps of (asset 1, asset 2).
class JumpCoeffs {
public:
    JumpCoeffs(const Grid2D& grid, const KouParams& params);

    int m1() const { return m1_; }
    int m2() const { return m2_; }
    double lambda() const { return lambda_; }

    /// gamma_{nu,kl}^{ab} for 1 <= k <= m1, 1 <= l <= m2, a, b in {0, 1}.
    double gamma(int nu, int k, int l, int a, int b) const {
        return gamma_[nu - 1][cell(k, l) * 4 + static_cast<std::size_t>(a + 2 * b)];
    }
    /// All four gammas of cell (k, l) in order 00, 10, 01, 11.
    const double* cell_gammas(int nu, int k, int l) const { return gamma_[nu - 1].data() + cell(k, l) * 4; }

    /// psi_nu at grid point (i, j), 1 <= i <= m1, 1 <= j <= m2 (includes lambda).
    double psi(int nu, int i, int j) const { return psi_[nu - 1][point(i, j)]; }
    const double* psi_row(int nu, int j) const { return psi_[nu - 1].data() + point(0, j); }

    /// One-dimensional data for the axes s2 = 0 (dir 1) and s1 = 0 (dir 2).
    /// `down`/`up` weights and psi factors lambda q eta_q s^(-eta_q), lambda p eta_p s^(eta_p).
    struct Axis {
        AxisWeights down;
        AxisWeights up;
        std::vector<double> psi_down;
        std::vector<double> psi_up;
    };
    const Axis& axis(int dir) const { return dir == 1 ? axis1_ : axis2_; }

    std::size_t memory_bytes() const;

private:
    std::size_t cell(int k, int l) const {
        return static_cast<std::size_t>(k - 1) + static_cast<std::size_t>(l - 1) * static_cast<std::size_t>(m1_);
    }
    std::size_t point(int i, int j) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(m1_ + 1);
    }

    int m1_;
    int m2_;
    double lambda_;
    std::array<std::vector<double>, 4> gamma_;
    std::array<std::vector<double>, 4> psi_;
    Axis axis1_;
    Axis axis2_;
};

/// Interpolation weights for one direction; `exponent` is eta_q (down) or -eta_p (up).
AxisWeights axis_weights(const Grid1D& g, double exponent);

/// Precomputes all coefficients; rejects eta_p1 <= 1 or eta_p2 <= 1.
JumpCoeffs precompute(const Grid2D& grid, const KouParams& params);

/// (A^(J) v) on the full grid by running double cumulative sums, O(m1 m2).
void apply_jump(const JumpCoeffs& c, std::span<const double> v, std::span<double> out);
GridFunction apply_jump(const JumpCoeffs& c, const GridFunction& v);

/// Same result by direct summation over all cells for every grid point, O((m1 m2)^2).
GridFunction apply_jump_naive(const JumpCoeffs& c, const GridFunction& v);

/// Median wall time in seconds of apply_jump on an m x m grid.
double benchmark_apply_jump(const KouParams& params, int m, int repeats);

}  // namespace kou2d
