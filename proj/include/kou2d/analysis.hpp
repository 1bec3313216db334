#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kou2d/grid.hpp"
#include "kou2d/problem.hpp"
#include "kou2d/steppers.hpp"

namespace kou2d {

/// Open square (lo, hi)^2 in asset-price space; the region of interest is (K/2, 3K/2)^2.
struct Roi {
    double lo;
    double hi;

    static Roi for_strike(double K) { return {0.5 * K, 1.5 * K}; }
    bool contains(double s1, double s2) const { return s1 > lo && s1 < hi && s2 > lo && s2 < hi; }
};

/// max |v_ref - v| over grid points strictly inside the ROI; throws if none.
double e_roi(const GridFunction& v_ref, const GridFunction& v, const Grid2D& grid, const Roi& roi);

enum class Greek { Delta1, Delta2, Gamma11, Gamma22, Gamma12 };
const std::array<Greek, 5>& all_greeks();
std::string to_string(Greek g);

/// Finite-difference Greeks on the grid: central three-point formulas inside,
/// first-order one-sided differences on the outer grid lines.
struct Greeks {
    GridFunction delta1;
    GridFunction delta2;
    GridFunction gamma11;
    GridFunction gamma22;
    GridFunction gamma12;

    const GridFunction& get(Greek g) const;
};

Greeks greeks(const GridFunction& v, const Grid2D& grid);

/// Directory for cached reference solutions: $KOU2D_CACHE_DIR if set, else
/// a kou2d-cache folder under the system temporary directory.
std::filesystem::path cache_directory();

inline constexpr int kReferenceSteps = 3000;

/// MCS2 solution with `steps` time steps; read from and written to the cache
/// when `use_cache` is set. `label` names the parameter set in the cache file.
GridFunction reference_solution(PideProblem& problem, const std::string& label, int steps = kReferenceSteps,
                                bool use_cache = true);

struct ConvergenceRecord {
    Scheme scheme;
    int m;
    int N;
    int Nprime;
    double error;
    double seconds;
};

struct GreekErrorRecord {
    Scheme scheme;
    int m;
    int N;
    int Nprime;
    std::array<double, 5> errors;  // in the order of all_greeks()
    double seconds;
};

struct StudyOptions {
    int threads = 0;  // 0: hardware concurrency
    SolverOptions solver;
    bool use_cache = true;
};

/// E^ROI for every (scheme, N) pair on an m x m grid against the MCS2 reference.
std::vector<ConvergenceRecord> convergence_study(const KouParams& params, const std::string& label, int m,
                                                 std::span<const Scheme> schemes, std::span<const int> Ns,
                                                 const StudyOptions& options = {});

/// The same on the five Greek surfaces.
std::vector<GreekErrorRecord> greek_error_study(const KouParams& params, const std::string& label, int m,
                                                std::span<const Scheme> schemes, std::span<const int> Ns,
                                                const StudyOptions& options = {});

/// Least-squares slope p of log(error) = c - p log(N).
double convergence_order(std::span<const double> N, std::span<const double> errors);

/// Tensor-product cubic spline value at (s1, s2) in [0, S_max]^2.
double interpolate_price(const GridFunction& v, const Grid2D& grid, double s1, double s2);

}  // namespace kou2d
