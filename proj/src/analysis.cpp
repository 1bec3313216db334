#include "kou2d/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "kou2d/spline.hpp"

namespace kou2d {

double e_roi(const GridFunction& v_ref, const GridFunction& v, const Grid2D& grid, const Roi& roi) {
    if (!v_ref.same_shape(v) || v.m1() != grid.m1() || v.m2() != grid.m2())
        throw std::invalid_argument("e_roi: shape mismatch");
    double err = 0.0;
    bool any = false;
    for (int j = 0; j <= grid.m2(); ++j) {
        for (int i = 0; i <= grid.m1(); ++i) {
            if (!roi.contains(grid.g1[i], grid.g2[j])) continue;
            any = true;
            err = std::max(err, std::abs(v_ref(i, j) - v(i, j)));
        }
    }
    if (!any) throw std::invalid_argument("e_roi: no grid point inside the region of interest");
    return err;
}

const std::array<Greek, 5>& all_greeks() {
    static const std::array<Greek, 5> g = {Greek::Delta1, Greek::Delta2, Greek::Gamma11, Greek::Gamma22,
                                           Greek::Gamma12};
    return g;
}

std::string to_string(Greek g) {
    switch (g) {
        case Greek::Delta1: return "Delta1";
        case Greek::Delta2: return "Delta2";
        case Greek::Gamma11: return "Gamma11";
        case Greek::Gamma22: return "Gamma22";
        case Greek::Gamma12: return "Gamma12";
    }
    return "?";
}

const GridFunction& Greeks::get(Greek g) const {
    switch (g) {
        case Greek::Delta1: return delta1;
        case Greek::Delta2: return delta2;
        case Greek::Gamma11: return gamma11;
        case Greek::Gamma22: return gamma22;
        case Greek::Gamma12: return gamma12;
    }
    return delta1;
}

namespace {

// Three-point stencil of node i: value = sum w[k] * x[first + k].
struct LineStencil {
    int first;
    StencilWeights w;
};

std::vector<LineStencil> first_derivative_stencils(const Grid1D& g) {
    const int m = g.cells();
    std::vector<LineStencil> st(static_cast<std::size_t>(m) + 1);
    st[0] = {0, {-1.0 / g.width(1), 1.0 / g.width(1), 0.0}};
    for (int i = 1; i < m; ++i) st[i] = {i - 1, fd_weights_first(g.width(i), g.width(i + 1))};
    st[m] = {m - 2, {0.0, -1.0 / g.width(m), 1.0 / g.width(m)}};
    return st;
}

std::vector<LineStencil> second_derivative_stencils(const Grid1D& g) {
    const int m = g.cells();
    std::vector<LineStencil> st(static_cast<std::size_t>(m) + 1);
    for (int i = 1; i < m; ++i) st[i] = {i - 1, fd_weights_second(g.width(i), g.width(i + 1))};
    st[0] = {0, st[1].w};
    st[m] = {m - 2, st[m - 1].w};
    return st;
}

GridFunction apply_stencils(const std::vector<LineStencil>& st, Direction dir, const GridFunction& v) {
    GridFunction out(v.m1(), v.m2());
    for (int j = 0; j <= v.m2(); ++j) {
        for (int i = 0; i <= v.m1(); ++i) {
            const LineStencil& s = st[static_cast<std::size_t>(dir == Direction::S1 ? i : j)];
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) {
                if (s.w[k] == 0.0) continue;
                acc += s.w[k] * (dir == Direction::S1 ? v(s.first + k, j) : v(i, s.first + k));
            }
            out(i, j) = acc;
        }
    }
    return out;
}

}  // namespace

Greeks greeks(const GridFunction& v, const Grid2D& grid) {
    if (v.m1() != grid.m1() || v.m2() != grid.m2()) throw std::invalid_argument("greeks: shape mismatch");
    if (grid.m1() < 2 || grid.m2() < 2) throw std::invalid_argument("greeks: need at least two cells per direction");
    const auto d1 = first_derivative_stencils(grid.g1);
    const auto d2 = first_derivative_stencils(grid.g2);
    Greeks g;
    g.delta1 = apply_stencils(d1, Direction::S1, v);
    g.delta2 = apply_stencils(d2, Direction::S2, v);
    g.gamma11 = apply_stencils(second_derivative_stencils(grid.g1), Direction::S1, v);
    g.gamma22 = apply_stencils(second_derivative_stencils(grid.g2), Direction::S2, v);
    g.gamma12 = apply_stencils(d2, Direction::S2, g.delta1);
    return g;
}

std::filesystem::path cache_directory() {
    if (const char* dir = std::getenv("KOU2D_CACHE_DIR"); dir && *dir) return dir;
    return std::filesystem::temp_directory_path() / "kou2d-cache";
}

namespace {

constexpr char kMagic[8] = {'K', 'O', 'U', '2', 'D', 'R', 'E', 'F'};

struct CacheHeader {
    char magic[8];
    std::int32_t m1;
    std::int32_t m2;
    std::int32_t steps;
    std::int32_t reserved;
    char set[16];
    char scheme[8];
    double params[14];
};

std::array<double, 14> param_array(const KouParams& p) {
    return {p.sigma1, p.sigma2, p.r,      p.rho,    p.lambda, p.p1, p.p2,
            p.eta_p1, p.eta_q1, p.eta_p2, p.eta_q2, p.K,      p.T,  p.S_max};
}

CacheHeader make_header(const PideProblem& problem, const std::string& label, int steps) {
    CacheHeader h{};
    std::memcpy(h.magic, kMagic, sizeof kMagic);
    h.m1 = problem.grid().m1();
    h.m2 = problem.grid().m2();
    h.steps = steps;
    std::strncpy(h.set, label.c_str(), sizeof h.set - 1);
    std::strncpy(h.scheme, "MCS2", sizeof h.scheme - 1);
    const auto pa = param_array(problem.params());
    std::copy(pa.begin(), pa.end(), h.params);
    return h;
}

std::filesystem::path cache_file(const CacheHeader& h) {
    // FNV-1a over the header distinguishes parameter overrides under the same label.
    std::uint64_t hash = 1469598103934665603ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(&h);
    for (std::size_t k = 0; k < sizeof h; ++k) hash = (hash ^ bytes[k]) * 1099511628211ULL;
    std::ostringstream name;
    name << "ref_" << h.set << '_' << h.m1 << 'x' << h.m2 << '_' << h.steps << '_' << std::hex << hash << ".bin";
    return cache_directory() / name.str();
}

bool read_cache(const std::filesystem::path& path, const CacheHeader& expected, GridFunction& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    CacheHeader h{};
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in || std::memcmp(&h, &expected, sizeof h) != 0) return false;
    GridFunction v(expected.m1, expected.m2);
    in.read(reinterpret_cast<char*>(v.storage().data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) return false;
    out = std::move(v);
    return true;
}

void write_cache(const std::filesystem::path& path, const CacheHeader& h, const GridFunction& v) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) return;
    std::ostringstream suffix;
    suffix << ".tmp" << std::this_thread::get_id();
    const auto tmp = path.string() + suffix.str();
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) return;
        out.write(reinterpret_cast<const char*>(&h), sizeof h);
        out.write(reinterpret_cast<const char*>(v.storage().data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
        if (!out) return;
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
}

}  // namespace

GridFunction reference_solution(PideProblem& problem, const std::string& label, int steps, bool use_cache) {
    const CacheHeader header = make_header(problem, label, steps);
    const auto path = cache_file(header);
    GridFunction v;
    if (use_cache && read_cache(path, header, v)) return v;
    v = run_steps(make_spec(Scheme::MCS2, 1), problem, steps);
    if (use_cache) write_cache(path, header, v);
    return v;
}

namespace {

struct Job {
    Scheme scheme;
    int N;
};

int worker_count(int requested, std::size_t jobs) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    n = std::max(1, n);
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(jobs, 1)));
}

// Runs every (scheme, N) job on its own worker-local problem and hands the
// solution to `consume(job index, V, seconds)`.
template <typename Consume>
void run_jobs(const KouParams& params, int m, const std::vector<Job>& jobs, const StudyOptions& options,
              Consume&& consume) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        try {
            PideProblem problem(params, m, m, options.solver);
            for (std::size_t k = next++; k < jobs.size(); k = next++) {
                const SchemeSpec spec = make_spec(jobs[k].scheme, jobs[k].N);
                const auto t0 = std::chrono::steady_clock::now();
                const GridFunction v = run(spec, problem);
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                consume(k, v, secs);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = jobs.size();
        }
    };
    const int n = worker_count(options.threads, jobs.size());
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<Job> make_jobs(std::span<const Scheme> schemes, std::span<const int> Ns) {
    std::vector<Job> jobs;
    for (Scheme s : schemes)
        for (int N : Ns) {
            if (N < 1) throw std::invalid_argument("study: N must be positive");
            jobs.push_back({s, N});
        }
    return jobs;
}

}  // namespace

std::vector<ConvergenceRecord> convergence_study(const KouParams& params, const std::string& label, int m,
                                                 std::span<const Scheme> schemes, std::span<const int> Ns,
                                                 const StudyOptions& options) {
    const std::vector<Job> jobs = make_jobs(schemes, Ns);
    PideProblem ref_problem(params, m, m, options.solver);
    const GridFunction ref = reference_solution(ref_problem, label, kReferenceSteps, options.use_cache);
    const Roi roi = Roi::for_strike(params.K);
    std::vector<ConvergenceRecord> records(jobs.size());
    run_jobs(params, m, jobs, options, [&](std::size_t k, const GridFunction& v, double secs) {
        records[k] = {jobs[k].scheme, m, jobs[k].N, fair_steps(jobs[k].scheme, jobs[k].N),
                      e_roi(ref, v, ref_problem.grid(), roi), secs};
    });
    return records;
}

std::vector<GreekErrorRecord> greek_error_study(const KouParams& params, const std::string& label, int m,
                                                std::span<const Scheme> schemes, std::span<const int> Ns,
                                                const StudyOptions& options) {
    const std::vector<Job> jobs = make_jobs(schemes, Ns);
    PideProblem ref_problem(params, m, m, options.solver);
    const Grid2D& grid = ref_problem.grid();
    const Greeks ref = greeks(reference_solution(ref_problem, label, kReferenceSteps, options.use_cache), grid);
    const Roi roi = Roi::for_strike(params.K);
    std::vector<GreekErrorRecord> records(jobs.size());
    run_jobs(params, m, jobs, options, [&](std::size_t k, const GridFunction& v, double secs) {
        const Greeks g = greeks(v, grid);
        GreekErrorRecord rec{jobs[k].scheme, m, jobs[k].N, fair_steps(jobs[k].scheme, jobs[k].N), {}, secs};
        for (std::size_t q = 0; q < all_greeks().size(); ++q)
            rec.errors[q] = e_roi(ref.get(all_greeks()[q]), g.get(all_greeks()[q]), grid, roi);
        records[k] = rec;
    });
    return records;
}

double convergence_order(std::span<const double> N, std::span<const double> errors) {
    if (N.size() != errors.size() || N.size() < 2) throw std::invalid_argument("convergence_order: need two or more points");
    const double n = static_cast<double>(N.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < N.size(); ++k) {
        if (!(N[k] > 0.0) || !(errors[k] > 0.0)) throw std::invalid_argument("convergence_order: values must be positive");
        const double x = std::log(N[k]);
        const double y = std::log(errors[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("convergence_order: N values must differ");
    return -(n * sxy - sx * sy) / denom;
}

double interpolate_price(const GridFunction& v, const Grid2D& grid, double s1, double s2) {
    const double s1_max = grid.g1[grid.m1()];
    const double s2_max = grid.g2[grid.m2()];
    if (!(s1 >= 0.0 && s1 <= s1_max && s2 >= 0.0 && s2 <= s2_max))
        throw std::invalid_argument("interpolate_price: spot outside the computational domain");
    return spline_interpolate(grid, v, s1, s2);
}

}  // namespace kou2d
