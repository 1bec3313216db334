#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "kou2d/grid.hpp"
#include "kou2d/jumpint.hpp"
#include "kou2d/linsolve.hpp"
#include "kou2d/model.hpp"
#include "kou2d/spatial.hpp"

namespace kou2d {

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 1000;
};

/// Work counters accumulated over the lifetime of a problem.
struct SolverCounters {
    long cn_solves = 0;
    long cn_iterations = 0;
    double cn_max_residual = 0.0;
    long tri_solves = 0;
    long jump_evaluations = 0;
};

/// The semidiscrete two-asset PIDE on a fixed grid: operators, integral
/// coefficients and the factorizations required by the time steppers.
class PideProblem {
public:
    using value_type = double;

    PideProblem(const KouParams& params, int m1, int m2, SolverOptions options = {}, double d = 0.0);

    const KouParams& params() const { return params_; }
    const Grid2D& grid() const { return grid_; }
    const SpatialOperators& operators() const { return ops_; }
    const JumpCoeffs& jumps() const { return jumps_; }
    const SolverOptions& options() const { return options_; }
    const SolverCounters& counters() const { return counters_; }
    std::size_t size() const { return grid_.points(); }

    /// Cell-averaged payoff on the grid.
    GridFunction initial_values() const;

    void apply_mixed(std::span<const double> v, std::span<double> out) const;
    void apply_direction(int dir, std::span<const double> v, std::span<double> out) const;
    void apply_diffusion(std::span<const double> v, std::span<double> out) const;
    void apply_jump(std::span<const double> v, std::span<double> out);

    /// Factors I - scale A_1 and I - scale A_2; factors are kept per scale.
    void prepare_directional(double scale);
    /// (I - scale A_dir) out = rhs for the most recently prepared scale.
    void solve_directional(int dir, std::span<const double> rhs, std::span<double> out);

    /// Assembles I - scale A^(D) and its ILU(0) preconditioner.
    void prepare_implicit(double scale);
    /// (I - scale A^(D)) x = rhs with x holding the starting vector on entry.
    void solve_implicit(std::span<const double> rhs, std::span<double> x);

private:
    struct DirectionalFactors {
        double scale;
        TriFactor f1;
        TriFactor f2;
    };

    KouParams params_;
    Grid2D grid_;
    SpatialOperators ops_;
    JumpCoeffs jumps_;
    SolverOptions options_;
    SolverCounters counters_;
    std::vector<DirectionalFactors> directional_;
    std::ptrdiff_t active_ = -1;
    double implicit_scale_ = -1.0;
    std::unique_ptr<CNSystem> implicit_;
};

}  // namespace kou2d
