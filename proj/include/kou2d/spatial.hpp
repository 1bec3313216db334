#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kou2d/grid.hpp"
#include "kou2d/model.hpp"

namespace kou2d {

/// Three-point weights (w_{-1}, w_0, w_1) on a nonuniform stencil.
using StencilWeights = std::array<double, 3>;

/// Second-order central first-derivative weights for widths h_i = s_i - s_{i-1}
/// and h_{i+1} = s_{i+1} - s_i.
StencilWeights fd_weights_first(double h_left, double h_right);

/// Second-order central second-derivative weights.
StencilWeights fd_weights_second(double h_left, double h_right);

enum class Direction { S1 = 1, S2 = 2 };

/// Tridiagonal (m+1) x (m+1) band matrix acting along one grid direction.
struct TriDiagOp {
    std::vector<double> lower;  // lower[0] unused (0)
    std::vector<double> diag;
    std::vector<double> upper;  // upper[m] unused (0)

    TriDiagOp() = default;
    explicit TriDiagOp(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
    std::size_t size() const { return diag.size(); }

    /// y = op x for a single line.
    void apply(std::span<const double> x, std::span<double> y) const;
};

/// Applies `op` to every grid line along `dir`: y = (I (x) op) v or (op (x) I) v.
/// With `accumulate` the result is added to y instead.
void apply_along(const TriDiagOp& op, Direction dir, int m1, int m2, std::span<const double> v, std::span<double> y,
                 bool accumulate = false);

/// First-derivative operator X D^(1) along one direction: central in the interior,
/// two-point backward at i = m, zero at i = 0.
TriDiagOp first_derivative_scaled(const Grid1D& g);

/// The mixed term rho sigma1 sigma2 (X2 D2) (x) (X1 D1), kept factored.
struct MixedOp {
    double coeff = 0.0;
    TriDiagOp b1;  // X1 D1^(1)
    TriDiagOp b2;  // X2 D2^(1)

    /// y = A^(M) v (or y += A^(M) v with `accumulate`).
    void apply(int m1, int m2, std::span<const double> v, std::span<double> y, bool accumulate = false) const;
};

/// Compressed sparse row matrix with column indices sorted within each row.
struct CsrMatrix {
    std::size_t n = 0;
    std::vector<std::uint32_t> row_ptr;
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    void multiply(std::span<const double> x, std::span<double> y) const;
};

/// A^(D) = A^(M) + A1 + A2 on a fixed grid.
class SpatialOperators {
public:
    SpatialOperators(const Grid2D& grid, const KouParams& params);

    int m1() const { return m1_; }
    int m2() const { return m2_; }
    std::size_t size() const { return static_cast<std::size_t>(m1_ + 1) * static_cast<std::size_t>(m2_ + 1); }

    const TriDiagOp& a1() const { return a1_; }
    const TriDiagOp& a2() const { return a2_; }
    const TriDiagOp& direction(Direction dir) const { return dir == Direction::S1 ? a1_ : a2_; }
    const MixedOp& mixed() const { return mixed_; }

    void apply_a1(std::span<const double> v, std::span<double> y) const;
    void apply_a2(std::span<const double> v, std::span<double> y) const;
    void apply_direction(Direction dir, std::span<const double> v, std::span<double> y) const;
    void apply_mixed(std::span<const double> v, std::span<double> y) const;

    /// Matrix-free A^(D) v as the sum of the three actions.
    void apply_AD(std::span<const double> v, std::span<double> y) const;
    GridFunction apply_AD(const GridFunction& v) const;

    /// Sparse rows of I - scale * A^(D) (nine-point pattern, diagonal always stored).
    CsrMatrix implicit_matrix(double scale) const;

private:
    int m1_;
    int m2_;
    TriDiagOp a1_;
    TriDiagOp a2_;
    MixedOp mixed_;
};

}  // namespace kou2d
