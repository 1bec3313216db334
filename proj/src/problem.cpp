#include "kou2d/problem.hpp"

#include <algorithm>

namespace kou2d {

namespace {

Grid2D checked_grid(const KouParams& params, int m1, int m2, double d) {
    params.validate();
    return build_grid(m1, m2, params, d);
}

}  // namespace

PideProblem::PideProblem(const KouParams& params, int m1, int m2, SolverOptions options, double d)
    : params_(params),
      grid_(checked_grid(params, m1, m2, d)),
      ops_(grid_, params_),
      jumps_(grid_, params_),
      options_(options) {
    if (!(options_.tol > 0.0)) throw std::invalid_argument("SolverOptions: tol must be positive");
    if (options_.max_iter < 1) throw std::invalid_argument("SolverOptions: max_iter must be positive");
}

GridFunction PideProblem::initial_values() const { return cell_average_payoff(grid_, params_); }

void PideProblem::apply_mixed(std::span<const double> v, std::span<double> out) const { ops_.apply_mixed(v, out); }

void PideProblem::apply_direction(int dir, std::span<const double> v, std::span<double> out) const {
    ops_.apply_direction(static_cast<Direction>(dir), v, out);
}

void PideProblem::apply_diffusion(std::span<const double> v, std::span<double> out) const { ops_.apply_AD(v, out); }

void PideProblem::apply_jump(std::span<const double> v, std::span<double> out) {
    ++counters_.jump_evaluations;
    kou2d::apply_jump(jumps_, v, out);
}

void PideProblem::prepare_directional(double scale) {
    auto it = std::find_if(directional_.begin(), directional_.end(),
                           [scale](const DirectionalFactors& f) { return f.scale == scale; });
    if (it == directional_.end()) {
        directional_.push_back({scale, tri_factor(ops_.a1(), scale), tri_factor(ops_.a2(), scale)});
        it = directional_.end() - 1;
    }
    active_ = it - directional_.begin();
}

void PideProblem::solve_directional(int dir, std::span<const double> rhs, std::span<double> out) {
    if (active_ < 0) throw std::logic_error("solve_directional: no factors prepared");
    const DirectionalFactors& factors = directional_[static_cast<std::size_t>(active_)];
    const TriFactor& f = dir == 1 ? factors.f1 : factors.f2;
    tri_solve_all(f, static_cast<Direction>(dir), grid_.m1(), grid_.m2(), rhs, out);
    ++counters_.tri_solves;
}

void PideProblem::prepare_implicit(double scale) {
    if (implicit_ && implicit_scale_ == scale) return;
    implicit_ = std::make_unique<CNSystem>(ops_.implicit_matrix(scale), options_.tol, options_.max_iter);
    implicit_scale_ = scale;
}

void PideProblem::solve_implicit(std::span<const double> rhs, std::span<double> x) {
    if (!implicit_) throw std::logic_error("solve_implicit: system not prepared");
    const SolveStats stats = cn_solve(*implicit_, rhs, x);
    ++counters_.cn_solves;
    counters_.cn_iterations += stats.iterations;
    counters_.cn_max_residual = std::max(counters_.cn_max_residual, stats.residual);
}

}  // namespace kou2d
