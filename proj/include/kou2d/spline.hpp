#pragma once

#include <span>
#include <vector>

#include "kou2d/grid.hpp"

namespace kou2d {

/// Interpolating cubic spline with not-a-knot end conditions, so that cubic
/// data are reproduced exactly. Two knots give the line, three the parabola.
class CubicSpline {
public:
    CubicSpline(std::span<const double> x, std::span<const double> y);

    /// Value at t; outside the knot range the end pieces are extended.
    double operator()(double t) const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at the knots
};

/// Tensor-product spline through the grid values: splines along s1 on every
/// grid line, then one spline along s2 through the results.
double spline_interpolate(const Grid2D& grid, const GridFunction& v, double s1, double s2);

}  // namespace kou2d
