#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kou2d/grid.hpp"
#include "kou2d/spatial.hpp"

namespace kou2d {

/// Raised when a linear solve cannot deliver the requested accuracy.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// LU factors of the tridiagonal matrix I - scale * op (no pivoting).
struct TriFactor {
    double scale = 0.0;
    std::vector<double> mult;      // subdiagonal multipliers l_i, mult[0] unused
    std::vector<double> inv_diag;  // 1 / u_i
    std::vector<double> upper;     // superdiagonal of U (= of the matrix)

    std::size_t size() const { return inv_diag.size(); }

    /// Solves one line in place.
    void solve(std::span<double> x) const;
};

/// Factors I - scale * op; throws SolverError on a pivot smaller than 1e-300 in magnitude.
TriFactor tri_factor(const TriDiagOp& op, double scale);

/// Solves (I - scale * op) x = rhs on every grid line along `dir`.
void tri_solve_all(const TriFactor& f, Direction dir, int m1, int m2, std::span<const double> rhs, std::span<double> out);
GridFunction tri_solve_all(const TriFactor& f, const GridFunction& rhs, Direction dir);

/// Incomplete LU factorization without fill on the pattern of a CSR matrix.
/// L has unit diagonal; both factors are stored row-wise without the diagonal.
struct Ilu0 {
    std::vector<std::uint32_t> l_ptr, l_col;
    std::vector<double> l_val;
    std::vector<std::uint32_t> u_ptr, u_col;
    std::vector<double> u_val;
    std::vector<double> inv_diag;

    std::size_t size() const { return inv_diag.size(); }
    /// x = (LU)^{-1} r.
    void apply(std::span<const double> r, std::span<double> x) const;
};

Ilu0 ilu0(const CsrMatrix& a);

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;  // relative 2-norm of b - A x
};

/// The Crank-Nicolson system I - 1/2 dt A^(D) together with its preconditioner.
struct CNSystem {
    CsrMatrix matrix;
    Ilu0 precond;
    double tol = 1e-10;
    int max_iter = 1000;

    CNSystem() = default;
    CNSystem(CsrMatrix m, double tol = 1e-10, int max_iter = 1000);
};

/// Preconditioned BiCGSTAB; `x` holds the starting vector on entry and the
/// solution on exit. Throws SolverError if the tolerance is not met within max_iter.
SolveStats cn_solve(const CNSystem& sys, std::span<const double> rhs, std::span<double> x);

}  // namespace kou2d
