#pragma once

// Weighted inner-product space: Gram checks, decomposition into constants,
// even and odd eigen-directions, involute iteration, Sturm-Hurwitz counts and
// the vertex suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <thread>
#include <vector>

#include "geometry.hpp"
#include "grid.hpp"
#include "plane.hpp"
#include "spectrum.hpp"

namespace cycloid {

inline double inner_product(const PlaneField& f, const Samples& a, const Samples& b) { return weighted_dot(f, a, b); }

inline double weighted_norm(const PlaneField& f, const Samples& a) { return std::sqrt(inner_product(f, a, a)); }

/// Constant direction followed by every ladder eigenfunction with k >= `k_min`.
inline std::vector<const EigenRecord*> basis_records(const Ladder& lad, int k_min = 0, int k_max = -1)
{
    std::vector<const EigenRecord*> out;
    for (const auto& r : lad.records)
        if (r.k >= k_min && (k_max < 0 || r.k <= k_max)) out.push_back(&r);
    return out;
}

inline std::vector<std::vector<double>> gram_matrix(const PlaneField& f, const std::vector<const Samples*>& v)
{
    std::vector<std::vector<double>> g(v.size(), std::vector<double>(v.size()));
    for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = a; b < v.size(); ++b) g[a][b] = g[b][a] = inner_product(f, *v[a], *v[b]);
    return g;
}

struct Coefficient {
    int k = 0;
    int branch = 1;
    double value = 0.0;
};

struct SpectralDecomposition {
    double c0 = 0.0;
    std::vector<Coefficient> translation_coeffs;  // k = 1
    std::vector<Coefficient> even_coeffs;         // k even >= 2
    std::vector<Coefficient> odd_coeffs;          // k odd >= 3
    double residual = 0.0;
    double norm_squared = 0.0;

    double coefficient_energy() const
    {
        double s = c0 * c0;
        for (const auto* v : {&translation_coeffs, &even_coeffs, &odd_coeffs})
            for (const auto& c : *v) s += c.value * c.value;
        return s;
    }
};

/// Projects onto the ladder basis. A positive `tol` raises LadderTooShort when
/// the reconstruction residual exceeds it.
inline SpectralDecomposition decompose(const PlaneField& f, const Samples& h, const Ladder& lad, double tol = 0.0)
{
    SpectralDecomposition d;
    d.norm_squared = inner_product(f, h, h);
    Samples rec(f.n, 0.0);
    for (const auto& r : lad.records) {
        const double c = inner_product(f, h, r.h);
        detail::axpy(rec, c, r.h);
        if (r.k == 0) d.c0 = c;
        else if (r.k == 1) d.translation_coeffs.push_back({r.k, r.branch, c});
        else if (r.k % 2 == 0) d.even_coeffs.push_back({r.k, r.branch, c});
        else d.odd_coeffs.push_back({r.k, r.branch, c});
    }
    for (std::size_t j = 0; j < f.n; ++j) d.residual = std::max(d.residual, std::abs(h[j] - rec[j]));
    if (tol > 0.0 && d.residual > tol)
        throw Error(ErrorKind::LadderTooShort, "decomposition residual " + std::to_string(d.residual));
    return d;
}

// ------------------------------------------------------------ involutes

struct InvoluteReport {
    std::vector<double> norms;    // ||S^n h||, n = 0..iters
    std::vector<double> ratios;   // ||S^(n+1) h|| / ||S^n h||
    bool monotone_after_two = true;
    bool geometric = false;       // ratios settle below one
    double limit_ratio = 0.0;
    double expected_ratio = 0.0;  // 1/lambda of the lowest eigenvalue present
    double alignment = 0.0;       // |projection onto that eigenspace| / ||S^n h||
};

inline InvoluteReport involute_iteration(const PlaneField& f, const Samples& h, int iters, const Ladder* lad = nullptr)
{
    InvoluteReport rep;
    Samples g = h;
    rep.norms.push_back(weighted_norm(f, g));
    for (int i = 0; i < iters; ++i) {
        g = involute_operator(f, g);
        // S grows the k <= 1 directions fastest; strip the round-off that lands there.
        if (lad)
            for (const auto& r : lad->records)
                if (r.k <= 1) detail::axpy(g, -inner_product(f, g, r.h), r.h);
        rep.norms.push_back(weighted_norm(f, g));
    }
    for (std::size_t i = 0; i + 1 < rep.norms.size(); ++i) rep.ratios.push_back(rep.norms[i + 1] / rep.norms[i]);
    for (std::size_t i = 2; i + 1 < rep.norms.size(); ++i)
        if (!(rep.norms[i + 1] < rep.norms[i])) rep.monotone_after_two = false;
    if (!rep.ratios.empty()) {
        rep.limit_ratio = rep.ratios.back();
        rep.geometric = rep.limit_ratio < 1.0 && rep.monotone_after_two;
    }

    if (lad) {
        const double scale = std::max(rep.norms.front(), 1e-300);
        double lowest = std::numeric_limits<double>::infinity();
        for (const auto& r : lad->records) {
            if (r.k < 2) continue;
            if (std::abs(inner_product(f, h, r.h)) > 1e-8 * scale) lowest = std::min(lowest, r.lambda);
        }
        if (std::isfinite(lowest)) {
            rep.expected_ratio = 1.0 / lowest;
            double proj = 0.0;
            for (const auto& r : lad->records)
                if (r.k >= 2 && std::abs(r.lambda - lowest) < 10.0 * lad->tol + 1e-9) {
                    const double c = inner_product(f, g, r.h);
                    proj += c * c;
                }
            rep.alignment = std::sqrt(proj) / rep.norms.back();
        }
    }
    return rep;
}

// -------------------------------------------------------- Sturm-Hurwitz

struct SturmHurwitzReport {
    std::size_t count = 0;
    std::size_t bound = 0;
    bool holds = false;
};

inline SturmHurwitzReport sturm_hurwitz_count(const PlaneField& f, const Samples& h, int k0, const Ladder& lad,
                                              double tol = 1e-8)
{
    for (const auto& r : lad.records) {
        if (r.k >= k0) continue;
        const double c = inner_product(f, h, r.h);
        if (std::abs(c) > tol)
            throw Error(ErrorKind::PreconditionViolated,
                        "coefficient " + std::to_string(c) + " at k = " + std::to_string(r.k));
    }
    SturmHurwitzReport rep;
    rep.count = sign_changes(h).size();
    rep.bound = 2 * static_cast<std::size_t>(k0);
    rep.holds = rep.count >= rep.bound;
    return rep;
}

// ---------------------------------------------------------- vertex suites

struct VertexTrial {
    std::uint64_t seed = 0;
    std::size_t vertices = 0;
    std::size_t cusps = 0;
    bool convex = true;
    double width_deviation = 0.0;       // constant-width suite only
    double evolute_width = 0.0;         // max |h_delta(t) + h_delta(t+pi)| of the evolute
};

struct VertexSuiteReport {
    std::size_t bound = 4;
    std::vector<VertexTrial> trials;
    std::size_t min_count = 0;
    std::size_t max_count = 0;
    std::vector<std::size_t> histogram;   // histogram[v] = trials with v vertices
    bool pass = true;
};

namespace detail {

inline std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Random combination of eigen-directions with variance k^-4, with r lifted so
// that min r = 1 by the constant term.
inline VertexTrial vertex_trial(const PlaneField& f, const Ladder& lad, std::uint64_t seed, bool odd_only)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n = f.n;
    Samples h(n, 0.0), hw(n, 0.0), r(n, 0.0), rw(n, 0.0);
    for (const auto& e : lad.records) {
        if (e.k < 2 || (odd_only && e.k % 2 == 0)) continue;
        const double a = gauss(rng) / (double(e.k) * double(e.k));
        axpy(h, a, e.h);
        axpy(hw, a, e.hw);
        axpy(r, a * (1.0 - e.lambda), e.h);
        axpy(rw, a * (1.0 - e.lambda), e.hw);
    }
    const double lift = 1.0 + std::max(0.0, -*std::min_element(r.begin(), r.end()));
    for (std::size_t j = 0; j < n; ++j) {
        h[j] += lift;
        r[j] += lift;
    }
    VertexTrial t;
    t.seed = seed;
    t.vertices = sign_changes(rw).size();
    t.cusps = sign_changes(r).size();
    t.convex = *std::min_element(r.begin(), r.end()) > 0.0;
    if (odd_only) {
        const Samples w = width_function(f, h);
        const double m = mean(w);
        for (double x : w) t.width_deviation = std::max(t.width_deviation, std::abs(x - m));
        Samples hd(n);
        for (std::size_t j = 0; j < n; ++j) hd[j] = -hw[j];
        t.evolute_width = max_abs(width_function(f, hd));
    }
    return t;
}

inline VertexSuiteReport run_vertex_suite(const PlaneField& f, const Ladder& lad, int trials, std::uint64_t seed,
                                          bool odd_only, std::size_t bound)
{
    VertexSuiteReport rep;
    rep.bound = bound;
    rep.trials.resize(static_cast<std::size_t>(std::max(trials, 0)));
    const unsigned threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8u));
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < threads; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w]() {
            for (std::size_t i = w; i < rep.trials.size(); i += threads)
                rep.trials[i] = vertex_trial(f, lad, splitmix(seed ^ splitmix(i)), odd_only);
        }));
    for (auto& j : jobs) j.get();
    if (rep.trials.empty()) return rep;
    rep.min_count = rep.max_count = rep.trials.front().vertices;
    for (const auto& t : rep.trials) {
        rep.min_count = std::min(rep.min_count, t.vertices);
        rep.max_count = std::max(rep.max_count, t.vertices);
        if (rep.histogram.size() <= t.vertices) rep.histogram.resize(t.vertices + 1, 0);
        ++rep.histogram[t.vertices];
        if (t.vertices < bound) rep.pass = false;
        if (odd_only && t.width_deviation >= 1e-7) rep.pass = false;
    }
    return rep;
}

} // namespace detail

inline VertexSuiteReport four_vertex_suite(const PlaneField& f, const Ladder& lad, int trials, std::uint64_t seed)
{
    return detail::run_vertex_suite(f, lad, trials, seed, false, 4);
}

inline VertexSuiteReport six_vertex_suite(const PlaneField& f, const Ladder& lad, int trials, std::uint64_t seed)
{
    return detail::run_vertex_suite(f, lad, trials, seed, true, 6);
}

} // namespace cycloid
