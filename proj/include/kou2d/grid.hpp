#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kou2d/model.hpp"

namespace kou2d {

/// Nonuniform mesh 0 = s_0 < ... < s_m = S_max, uniform on [0, 2K] and
/// sinh-stretched beyond.
class Grid1D {
public:
    Grid1D() = default;
    explicit Grid1D(std::vector<double> points);

    int cells() const { return static_cast<int>(s_.size()) - 1; }
    std::size_t size() const { return s_.size(); }
    double operator[](int i) const { return s_[static_cast<std::size_t>(i)]; }
    std::span<const double> points() const { return s_; }

    /// h_i = s_i - s_{i-1}, valid for 1 <= i <= m.
    double width(int i) const { return s_[i] - s_[i - 1]; }

    /// Cell-averaging interval [s_{l-1/2}, s_{l+1/2}] around node l, with
    /// s_{-1/2} = -s_{1/2} and s_{m+1/2} = S_max.
    double lower_mid(int l) const;
    double upper_mid(int l) const;
    double mid_width(int l) const { return upper_mid(l) - lower_mid(l); }

private:
    std::vector<double> s_;
};

/// Stretching map parameters; `xi_int` = 2K/d, `xi_max` as in the mesh construction.
struct MeshMap {
    double K;
    double S_max;
    double d;
    double xi_int;
    double xi_max;

    MeshMap(double K, double S_max, double d);
    double operator()(double xi) const;
};

/// Builds the m-cell mesh; rejects m < 2, d <= 0 and S_max/d <= 2K/d.
Grid1D build_mesh(int m, double K, double S_max, double d);

/// Tensor product of two meshes sharing K and S_max.
struct Grid2D {
    Grid1D g1;
    Grid1D g2;

    int m1() const { return g1.cells(); }
    int m2() const { return g2.cells(); }
    std::size_t points() const { return g1.size() * g2.size(); }
};

/// Both meshes with default stretch d = K/10 unless `d` > 0 is supplied.
Grid2D build_grid(int m1, int m2, const KouParams& params, double d = 0.0);

/// One value per grid point, first asset index fastest: index(i, j) = i + j (m1 + 1).
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(int m1, int m2, double value = 0.0)
        : m1_(m1), m2_(m2), v_(static_cast<std::size_t>(m1 + 1) * static_cast<std::size_t>(m2 + 1), value) {}
    explicit GridFunction(const Grid2D& grid, double value = 0.0) : GridFunction(grid.m1(), grid.m2(), value) {}

    int m1() const { return m1_; }
    int m2() const { return m2_; }
    std::size_t size() const { return v_.size(); }

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(m1_ + 1);
    }
    double& operator()(int i, int j) { return v_[index(i, j)]; }
    double operator()(int i, int j) const { return v_[index(i, j)]; }
    double& operator[](std::size_t n) { return v_[n]; }
    double operator[](std::size_t n) const { return v_[n]; }

    std::span<double> values() { return v_; }
    std::span<const double> values() const { return v_; }
    std::vector<double>& storage() { return v_; }
    const std::vector<double>& storage() const { return v_; }

    bool same_shape(const GridFunction& other) const { return m1_ == other.m1_ && m2_ == other.m2_; }

private:
    int m1_ = 0;
    int m2_ = 0;
    std::vector<double> v_;
};

/// Integral of max(0, K - (s1 + s2)/2) over [a1, b1] x [a2, b2], exact.
double payoff_integral(double a1, double b1, double a2, double b2, double K);

/// Initial vector: pointwise payoff, replaced by the exact cell average on
/// every cell that straddles the kink s1 + s2 = 2K.
GridFunction cell_average_payoff(const Grid2D& grid, const KouParams& params);

}  // namespace kou2d
