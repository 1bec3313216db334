#include "kou2d/linsolve.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace kou2d {

namespace {

constexpr double kTinyPivot = 1e-300;

double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

TriFactor tri_factor(const TriDiagOp& op, double scale) {
    if (!(scale >= 0.0)) throw std::invalid_argument("tri_factor: scale must be nonnegative");
    const std::size_t n = op.size();
    TriFactor f;
    f.scale = scale;
    f.mult.assign(n, 0.0);
    f.inv_diag.assign(n, 0.0);
    f.upper.assign(n, 0.0);
    double u_prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = 1.0 - scale * op.diag[i];
        double u = b;
        if (i > 0) {
            const double a = -scale * op.lower[i];
            f.mult[i] = a / u_prev;
            u -= f.mult[i] * f.upper[i - 1];
        }
        if (std::abs(u) < kTinyPivot) throw SolverError("tri_factor: zero pivot", u, static_cast<int>(i));
        f.inv_diag[i] = 1.0 / u;
        f.upper[i] = i + 1 < n ? -scale * op.upper[i] : 0.0;
        u_prev = u;
    }
    return f;
}

void TriFactor::solve(std::span<double> x) const {
    const std::size_t n = size();
    if (x.size() != n) throw std::invalid_argument("TriFactor::solve: shape mismatch");
    for (std::size_t i = 1; i < n; ++i) x[i] -= mult[i] * x[i - 1];
    x[n - 1] *= inv_diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - upper[i] * x[i + 1]) * inv_diag[i];
}

void tri_solve_all(const TriFactor& f, Direction dir, int m1, int m2, std::span<const double> rhs, std::span<double> out) {
    const std::size_t n1 = static_cast<std::size_t>(m1) + 1;
    const std::size_t n2 = static_cast<std::size_t>(m2) + 1;
    if (rhs.size() != n1 * n2 || out.size() != n1 * n2) throw std::invalid_argument("tri_solve_all: shape mismatch");
    if (f.size() != (dir == Direction::S1 ? n1 : n2)) throw std::invalid_argument("tri_solve_all: factor size mismatch");
    if (out.data() != rhs.data()) std::copy(rhs.begin(), rhs.end(), out.begin());
    if (dir == Direction::S1) {
        for (std::size_t j = 0; j < n2; ++j) f.solve(out.subspan(j * n1, n1));
        return;
    }
    // Lines along s2 are strided; sweep whole rows at once.
    double* x = out.data();
    for (std::size_t j = 1; j < n2; ++j) {
        const double l = f.mult[j];
        double* row = x + j * n1;
        const double* prev = row - n1;
        for (std::size_t i = 0; i < n1; ++i) row[i] -= l * prev[i];
    }
    {
        double* row = x + (n2 - 1) * n1;
        const double d = f.inv_diag[n2 - 1];
        for (std::size_t i = 0; i < n1; ++i) row[i] *= d;
    }
    for (std::size_t j = n2 - 1; j-- > 0;) {
        const double c = f.upper[j];
        const double d = f.inv_diag[j];
        double* row = x + j * n1;
        const double* next = row + n1;
        for (std::size_t i = 0; i < n1; ++i) row[i] = (row[i] - c * next[i]) * d;
    }
}

GridFunction tri_solve_all(const TriFactor& f, const GridFunction& rhs, Direction dir) {
    GridFunction out(rhs.m1(), rhs.m2());
    tri_solve_all(f, dir, rhs.m1(), rhs.m2(), rhs.values(), out.values());
    return out;
}

Ilu0 ilu0(const CsrMatrix& a) {
    if (a.val.size() > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("ilu0: matrix too large");
    std::vector<double> val = a.val;
    std::vector<std::size_t> diag_pos(a.n, 0);
    for (std::size_t r = 0; r < a.n; ++r) {
        std::size_t k = a.row_ptr[r];
        while (k < a.row_ptr[r + 1] && a.col[k] < r) ++k;
        if (k == a.row_ptr[r + 1] || a.col[k] != r) throw std::invalid_argument("ilu0: missing diagonal entry");
        diag_pos[r] = k;
    }
    // IKJ variant restricted to the existing pattern.
    std::vector<std::ptrdiff_t> where(a.n, -1);
    for (std::size_t i = 0; i < a.n; ++i) {
        const std::size_t begin = a.row_ptr[i];
        const std::size_t end = a.row_ptr[i + 1];
        for (std::size_t p = begin; p < end; ++p) where[a.col[p]] = static_cast<std::ptrdiff_t>(p);
        for (std::size_t p = begin; p < end && a.col[p] < i; ++p) {
            const std::size_t k = a.col[p];
            const double pivot = val[diag_pos[k]];
            if (std::abs(pivot) < kTinyPivot) throw SolverError("ilu0: zero pivot", pivot, static_cast<int>(k));
            const double lik = val[p] / pivot;
            val[p] = lik;
            for (std::size_t q = diag_pos[k] + 1; q < a.row_ptr[k + 1]; ++q) {
                const std::ptrdiff_t t = where[a.col[q]];
                if (t >= 0) val[static_cast<std::size_t>(t)] -= lik * val[q];
            }
        }
        for (std::size_t p = begin; p < end; ++p) where[a.col[p]] = -1;
        if (std::abs(val[diag_pos[i]]) < kTinyPivot)
            throw SolverError("ilu0: zero pivot", val[diag_pos[i]], static_cast<int>(i));
    }

    Ilu0 f;
    f.l_ptr.reserve(a.n + 1);
    f.u_ptr.reserve(a.n + 1);
    f.inv_diag.resize(a.n);
    f.l_ptr.push_back(0);
    f.u_ptr.push_back(0);
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::size_t p = a.row_ptr[i]; p < diag_pos[i]; ++p) {
            f.l_col.push_back(static_cast<std::uint32_t>(a.col[p]));
            f.l_val.push_back(val[p]);
        }
        for (std::size_t p = diag_pos[i] + 1; p < a.row_ptr[i + 1]; ++p) {
            f.u_col.push_back(static_cast<std::uint32_t>(a.col[p]));
            f.u_val.push_back(val[p]);
        }
        f.l_ptr.push_back(static_cast<std::uint32_t>(f.l_col.size()));
        f.u_ptr.push_back(static_cast<std::uint32_t>(f.u_col.size()));
        f.inv_diag[i] = 1.0 / val[diag_pos[i]];
    }
    return f;
}

void Ilu0::apply(std::span<const double> r, std::span<double> x) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = r[i];
        for (std::uint32_t p = l_ptr[i]; p < l_ptr[i + 1]; ++p) s -= l_val[p] * x[l_col[p]];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::uint32_t p = u_ptr[i]; p < u_ptr[i + 1]; ++p) s -= u_val[p] * x[u_col[p]];
        x[i] = s * inv_diag[i];
    }
}

CNSystem::CNSystem(CsrMatrix m, double tol_, int max_iter_)
    : matrix(std::move(m)), precond(ilu0(matrix)), tol(tol_), max_iter(max_iter_) {
    if (!(tol > 0.0)) throw std::invalid_argument("CNSystem: tolerance must be positive");
    if (max_iter < 1) throw std::invalid_argument("CNSystem: max_iter must be positive");
}

SolveStats cn_solve(const CNSystem& sys, std::span<const double> b, std::span<double> x) {
    const CsrMatrix& a = sys.matrix;
    const std::size_t n = a.n;
    if (b.size() != n || x.size() != n) throw std::invalid_argument("cn_solve: shape mismatch");

    SolveStats stats;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return stats;
    }

    thread_local std::vector<double> r, rhat, p, v, s, t, phat, shat;
    // Every work vector is written before it is read.
    for (auto* w : {&r, &rhat, &p, &v, &s, &t, &phat, &shat}) w->resize(n);

    auto residual = [&]() {
        a.multiply(x, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        return norm2(r) / bnorm;
    };

    double rel = residual();
    int iter = 0;
    // The recursively updated residual can drift from the true one; restart
    // from the current iterate whenever the true residual is still too large.
    while (rel > sys.tol && iter < sys.max_iter) {
        rhat = r;
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        while (iter < sys.max_iter) {
            ++iter;
            const double rho_new = dot(rhat, r);
            if (rho_new == 0.0 || omega == 0.0) break;
            const double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
            sys.precond.apply(p, phat);
            a.multiply(phat, v);
            const double rv = dot(rhat, v);
            if (rv == 0.0) break;
            alpha = rho / rv;
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = r[i] - alpha * v[i];
                ss += s[i] * s[i];
            }
            if (std::sqrt(ss) / bnorm <= sys.tol) {
                for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
                break;
            }
            sys.precond.apply(s, shat);
            a.multiply(shat, t);
            const double tt = dot(t, t);
            omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
            double rr = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * phat[i] + omega * shat[i];
                r[i] = s[i] - omega * t[i];
                rr += r[i] * r[i];
            }
            if (std::sqrt(rr) / bnorm <= sys.tol) break;
        }
        const double before = rel;
        rel = residual();
        if (!(rel < before) && rel > sys.tol) break;
    }
    stats.iterations = iter;
    stats.residual = rel;
    if (!(rel <= sys.tol))
        throw SolverError("cn_solve: BiCGSTAB did not reach tolerance (relative residual " + std::to_string(rel) + ")", rel,
                          iter);
    return stats;
}

}  // namespace kou2d
