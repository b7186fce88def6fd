#pragma once

// Periodic and antiperiodic eigenvalue ladder, eigenfunctions, the lambda = 1
// eigenspace, N-turn eigenvalues and the quarter-turn doubling check.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "grid.hpp"
#include "plane.hpp"
#include "sturm.hpp"

namespace cycloid {

enum class PeriodType { Periodic, Antiperiodic };

inline const char* to_string(PeriodType t) { return t == PeriodType::Periodic ? "periodic" : "antiperiodic"; }

struct EigenRecord {
    int k = 0;
    int branch = 1;
    double lambda = 0.0;
    PeriodType ptype = PeriodType::Periodic;
    bool double_flag = false;
    Samples h;   // on the 2pi grid
    Samples hw;  // h'/bq on the same grid
};

struct SpectrumOptions {
    double tol = 1e-9;        // eigenvalue bracket width
    double ode_tol = 1e-12;   // integrator tolerance
    double cap = 0.0;         // search ceiling; 0 selects 4 (k_max+1)^2 max(bp bq)
    unsigned threads = 0;     // 0 uses the hardware concurrency
};

/// Weighted inner product: trapezoid value of the integral of h1 h2 bp.
inline double weighted_dot(const PlaneField& f, const Samples& a, const Samples& b)
{
    double s = 0.0;
    for (std::size_t j = 0; j < f.n; ++j) s += a[j] * b[j] * f.bp[j];
    return s * f.step();
}

namespace detail {

inline void scale(Samples& v, double s)
{
    for (double& x : v) x *= s;
}

inline void axpy(Samples& y, double a, const Samples& x)
{
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += a * x[j];
}

// Positive largest-magnitude sample and unit weighted norm.
inline void normalize(const PlaneField& f, EigenRecord& r)
{
    const auto it = std::max_element(r.h.begin(), r.h.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    double s = 1.0 / std::sqrt(weighted_dot(f, r.h, r.h));
    if (it != r.h.end() && *it < 0.0) s = -s;
    scale(r.h, s);
    scale(r.hw, s);
}

inline void orthonormalize_pair(const PlaneField& f, EigenRecord& a, EigenRecord& b)
{
    normalize(f, a);
    const double c = weighted_dot(f, b.h, a.h);
    axpy(b.h, -c, a.h);
    axpy(b.hw, -c, a.hw);
    normalize(f, b);
}

inline double search_cap(const PlaneField& f, int k_max, const SpectrumOptions& opt)
{
    if (opt.cap > 0.0) return opt.cap;
    double m = 0.0;
    for (std::size_t j = 0; j < f.n; ++j)
        if (!f.is_singular(j)) m = std::max(m, f.bp[j] * f.bq[j]);
    return 4.0 * (k_max + 1.0) * (k_max + 1.0) * m;
}

// Bisection for an increasing g with g(lo) < 0; hi expands geometrically.
inline double bisect_increasing(const std::function<double(double)>& g, double lo, double hi_start, double cap, double tol,
                                const std::string& what)
{
    double hi = hi_start;
    while (g(hi) < 0.0) {
        if (hi >= cap) throw Error(ErrorKind::BracketFailure, what + ": no crossing below " + std::to_string(cap));
        lo = hi;
        hi = std::min(2.0 * hi, cap);
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Samples (h, w) started from `init` at the nodes of `turns` full periods.
inline std::pair<Samples, Samples> sample_solution(const PlaneField& f, double lambda, StateVector init, double span,
                                                   std::size_t count, double tol, StateVector* end = nullptr)
{
    std::vector<double> times(count);
    for (std::size_t j = 0; j < count; ++j) times[j] = f.t_offset() + static_cast<double>(j) * f.step();
    const Trajectory tr = integrate(f, lambda, init, f.t_offset(), f.t_offset() + span, tol, times);
    Samples h(count), w(count);
    for (std::size_t j = 0; j < count; ++j) {
        h[j] = tr.samples[j].h;
        w[j] = tr.samples[j].w;
    }
    if (end) *end = tr.end;
    return {h, w};
}

// Eigenfunction from a half-period solution, extended with sign (-1)^k.
inline EigenRecord eigen_from_direction(const PlaneField& f, int k, int branch, double lambda, double beta0, double tol)
{
    const std::size_t half = f.n / 2;
    auto [h, w] = sample_solution(f, lambda, {std::cos(beta0), -std::sin(beta0)}, pi, half, tol);
    EigenRecord r;
    r.k = k;
    r.branch = branch;
    r.lambda = lambda;
    r.ptype = k % 2 == 0 ? PeriodType::Periodic : PeriodType::Antiperiodic;
    r.h.resize(f.n);
    r.hw.resize(f.n);
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < half; ++j) {
        r.h[j] = h[j];
        r.hw[j] = w[j];
        r.h[j + half] = sign * h[j];
        r.hw[j + half] = sign * w[j];
    }
    return r;
}

} // namespace detail

/// The lambda = 1 eigenspace in closed form: r_i = [e_i, q].
struct LambdaOneEigenspace {
    Samples r1, r2;      // [e1, q], [e2, q]
    Samples rw1, rw2;    // r'/bq = [e_i, q']/bq = -[e_i, p]
    double antiperiodicity = 0.0;
    /// Integral of r p' over one half period; nonzero means the cycloid is open.
    Vec2 half_period_gap1, half_period_gap2;
};

inline LambdaOneEigenspace lambda_one_eigenspace(const PlaneField& f)
{
    LambdaOneEigenspace e;
    const std::size_t n = f.n, half = n / 2;
    e.r1.resize(n); e.r2.resize(n); e.rw1.resize(n); e.rw2.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        e.r1[j] = f.q[j].y;
        e.r2[j] = -f.q[j].x;
        e.rw1[j] = -f.p[j].y;
        e.rw2[j] = f.p[j].x;
    }
    for (std::size_t j = 0; j < half; ++j)
        e.antiperiodicity = std::max({e.antiperiodicity, std::abs(e.r1[j] + e.r1[j + half]), std::abs(e.r2[j] + e.r2[j + half])});
    // Half-period integral by the periodic rule applied to r p' on [t0, t0+pi]:
    // r p' is pi-periodic, so the full-period sum halves exactly.
    for (std::size_t j = 0; j < n; ++j) {
        e.half_period_gap1 += f.dp[j] * (0.5 * e.r1[j] * f.step());
        e.half_period_gap2 += f.dp[j] * (0.5 * e.r2[j] * f.step());
    }
    return e;
}

// ------------------------------------------------------------------ ladder

class Ladder {
public:
    std::vector<EigenRecord> records;
    double tol = 0.0;

    const EigenRecord& get(int k, int branch) const
    {
        for (const auto& r : records)
            if (r.k == k && r.branch == branch) return r;
        throw Error(ErrorKind::LadderTooShort, "no eigenvalue for k = " + std::to_string(k));
    }
    int k_max() const
    {
        int m = 0;
        for (const auto& r : records) m = std::max(m, r.k);
        return m;
    }
};

namespace detail {

struct PairResult {
    double l1 = 0.0, l2 = 0.0;
    double beta1 = 0.0, beta2 = 0.0;
};

inline PairResult ladder_pair(const PlaneField& f, int k, double cap, const SpectrumOptions& opt)
{
    const double target = k * pi;
    auto theta_max = [&](double l) { return turning_range(half_turn(f, l, opt.ode_tol)).max - target; };
    auto theta_min = [&](double l) { return turning_range(half_turn(f, l, opt.ode_tol)).min - target; };
    const std::string what = "k = " + std::to_string(k);
    PairResult pr;
    // At lambda = 1 the half-period map is -Id and all directions turn by pi.
    pr.l1 = bisect_increasing(theta_max, 1.0, 2.0, cap, opt.tol, what);
    pr.l2 = bisect_increasing(theta_min, pr.l1 - opt.tol, std::max(pr.l1 + opt.tol, 2.0), cap, opt.tol, what);
    pr.l2 = std::max(pr.l2, pr.l1);
    pr.beta1 = turning_range(half_turn(f, pr.l1, opt.ode_tol)).beta_max;
    pr.beta2 = turning_range(half_turn(f, pr.l2, opt.ode_tol)).beta_min;
    return pr;
}

} // namespace detail

inline Ladder find_ladder(const PlaneField& f, int k_max, const SpectrumOptions& opt = {})
{
    if (k_max < 2) throw Error(ErrorKind::BadRequest, "k_max must be >= 2");
    Ladder lad;
    lad.tol = opt.tol;
    const std::size_t n = f.n;

    EigenRecord r0;
    r0.k = 0;
    r0.lambda = 0.0;
    r0.h.assign(n, 1.0);
    r0.hw.assign(n, 0.0);
    r0.double_flag = false;
    detail::normalize(f, r0);
    lad.records.push_back(r0);

    const auto one = lambda_one_eigenspace(f);
    EigenRecord a, b;
    a.k = b.k = 1;
    a.branch = 1;
    b.branch = 2;
    a.lambda = b.lambda = 1.0;
    a.ptype = b.ptype = PeriodType::Antiperiodic;
    a.double_flag = b.double_flag = true;
    a.h = one.r1; a.hw = one.rw1;
    b.h = one.r2; b.hw = one.rw2;
    detail::orthonormalize_pair(f, a, b);
    lad.records.push_back(a);
    lad.records.push_back(b);

    const double cap = detail::search_cap(f, k_max, opt);
    std::vector<detail::PairResult> pairs(static_cast<std::size_t>(k_max + 1));
    unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(k_max - 1));
    if (threads <= 1) {
        for (int k = 2; k <= k_max; ++k) pairs[k] = detail::ladder_pair(f, k, cap, opt);
    } else {
        std::vector<std::future<void>> jobs;
        std::atomic<int> next{2};
        for (unsigned t = 0; t < threads; ++t)
            jobs.push_back(std::async(std::launch::async, [&]() {
                for (int k = next++; k <= k_max; k = next++) pairs[k] = detail::ladder_pair(f, k, cap, opt);
            }));
        for (auto& j : jobs) j.get();
    }

    for (int k = 2; k <= k_max; ++k) {
        const auto& pr = pairs[k];
        const bool dbl = std::abs(pr.l2 - pr.l1) < 10.0 * opt.tol;
        EigenRecord e1, e2;
        if (dbl) {
            const double mid = 0.5 * (pr.l1 + pr.l2);
            e1 = detail::eigen_from_direction(f, k, 1, mid, 0.0, opt.ode_tol);
            e2 = detail::eigen_from_direction(f, k, 2, mid, pi / 2.0, opt.ode_tol);
            e1.lambda = pr.l1;
            e2.lambda = pr.l2;
            detail::orthonormalize_pair(f, e1, e2);
        } else {
            e1 = detail::eigen_from_direction(f, k, 1, pr.l1, pr.beta1, opt.ode_tol);
            e2 = detail::eigen_from_direction(f, k, 2, pr.l2, pr.beta2, opt.ode_tol);
            detail::normalize(f, e1);
            detail::normalize(f, e2);
        }
        e1.double_flag = e2.double_flag = dbl;
        lad.records.push_back(std::move(e1));
        lad.records.push_back(std::move(e2));
    }
    return lad;
}

/// Zero count of an eigenfunction (cyclic sign changes on the grid).
inline std::size_t zero_count(const Samples& h) { return sign_changes(h).size(); }

// --------------------------------------------------------------- N-turn

enum class CycloidKind { Epicycloid, Hypocycloid };

inline const char* to_string(CycloidKind k) { return k == CycloidKind::Epicycloid ? "epicycloid" : "hypocycloid"; }

struct NTurnRecord {
    int N = 2;
    int k = 1;          // rotation number k/N of the half-period map, in units of pi
    int branch = 1;
    double lambda = 0.0;
    CycloidKind kind = CycloidKind::Epicycloid;
    Samples h, hw;      // on the 2 pi N grid (N n nodes)
    StateVector start, end;
    /// max |A(lambda, 2pi)^N - Id| entrywise.
    double closure_residual = 0.0;
};

struct NTurnOptions {
    double tol = 1e-10;
    double ode_tol = 1e-12;
    int hypo_k_max = 0;   // largest hypocycloid k; 0 skips hypocycloids
    double cap = 1e4;
};

inline std::vector<NTurnRecord> find_n_turn(const PlaneField& f, int N, const NTurnOptions& opt = {})
{
    if (N < 2) throw Error(ErrorKind::BadRequest, "N must be >= 2");
    std::vector<std::pair<int, double>> found;
    auto rot = [&](double l) { return rotation_number(half_turn(f, l, opt.ode_tol)); };
    for (int k = 1; k < N; ++k) {
        const double target = pi * k / N;
        double lo = 0.0, hi = 1.0;
        while (hi - lo > opt.tol) {
            const double mid = 0.5 * (lo + hi);
            if (rot(mid) < target) lo = mid;
            else hi = mid;
        }
        found.emplace_back(k, 0.5 * (lo + hi));
    }
    for (int k = N + 1; k <= opt.hypo_k_max; ++k) {
        if (std::gcd(k, N) != 1) continue;
        const double target = pi * k / N;
        const double l = detail::bisect_increasing([&](double x) { return rot(x) - target; }, 1.0, 2.0, opt.cap, opt.tol,
                                                   "N-turn k = " + std::to_string(k));
        found.emplace_back(k, l);
    }

    std::vector<NTurnRecord> out;
    const std::size_t count = f.n * static_cast<std::size_t>(N);
    for (const auto& [k, l] : found) {
        const Monodromy A = monodromy(f, l, opt.ode_tol);
        Monodromy P = A;
        for (int i = 1; i < 2 * N; ++i) P = P * A;
        const double res = std::max({std::abs(P.a11 - 1.0), std::abs(P.a12), std::abs(P.a21), std::abs(P.a22 - 1.0)});
        for (int branch = 1; branch <= 2; ++branch) {
            NTurnRecord r;
            r.N = N;
            r.k = k;
            r.branch = branch;
            r.lambda = l;
            r.kind = l < 1.0 ? CycloidKind::Epicycloid : CycloidKind::Hypocycloid;
            r.start = branch == 1 ? StateVector{1.0, 0.0} : StateVector{0.0, 1.0};
            auto [h, w] = detail::sample_solution(f, l, r.start, two_pi * N, count, opt.ode_tol, &r.end);
            r.h = std::move(h);
            r.hw = std::move(w);
            r.closure_residual = res;
            out.push_back(std::move(r));
        }
    }
    return out;
}

// ------------------------------------------------------------ doubling

struct DoublingEntry {
    int k = 0;
    double gap = 0.0;
    double minus_id_residual = 0.0;  // max |A(lambda_k, pi) + Id|
    bool pass = false;
};

struct DoublingReport {
    bool applicable = false;   // family is quarter-turn symmetric
    std::vector<DoublingEntry> entries;
    bool pass = true;
};

inline DoublingReport symmetry_doubling_check(const PlaneField& f, const Ladder& lad, double tol = 1e-6)
{
    DoublingReport rep;
    rep.applicable = quarter_turn_symmetric(f.model);
    for (int k = 3; k <= lad.k_max(); k += 2) {
        const double l1 = lad.get(k, 1).lambda, l2 = lad.get(k, 2).lambda;
        DoublingEntry e;
        e.k = k;
        e.gap = std::abs(l2 - l1);
        const Monodromy A = monodromy(f, 0.5 * (l1 + l2));
        e.minus_id_residual = std::max({std::abs(A.a11 + 1.0), std::abs(A.a12), std::abs(A.a21), std::abs(A.a22 + 1.0)});
        e.pass = e.gap < tol && e.minus_id_residual < tol;
        if (rep.applicable) rep.pass = rep.pass && e.pass;
        rep.entries.push_back(e);
    }
    return rep;
}

} // namespace cycloid
