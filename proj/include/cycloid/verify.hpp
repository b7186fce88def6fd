#pragma once

// Named invariant suites shared by the command line tool and the acceptance
// runner. Each check records the measured value next to its bound.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "geometry.hpp"
#include "plane.hpp"
#include "spectrum.hpp"
#include "sturm.hpp"

namespace cycloid {

struct CheckResult {
    std::string suite;
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct VerifyOptions {
    int k_max = 7;
    int trials = 50;
    std::uint64_t seed = 1;
    SpectrumOptions spectrum;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    std::vector<VertexSuiteReport> vertex_suites;
    bool pass = true;

    void add(std::string suite, std::string name, double value, double bound, bool pass_flag)
    {
        checks.push_back({std::move(suite), std::move(name), value, bound, pass_flag});
        pass = pass && pass_flag;
    }
    /// Check of the form value < bound.
    void below(const std::string& suite, const std::string& name, double value, double bound)
    {
        add(suite, name, value, bound, value < bound);
    }
};

/// Largest entrywise deviation of the Gram matrix of the ladder from identity.
inline double gram_deviation(const PlaneField& f, const Ladder& lad, int k_max)
{
    std::vector<const Samples*> v;
    for (const auto* r : basis_records(lad, 0, k_max))
        if (r->k != 1) v.push_back(&r->h);
    const auto g = gram_matrix(f, v);
    double worst = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = 0; b < g.size(); ++b) worst = std::max(worst, std::abs(g[a][b] - (a == b ? 1.0 : 0.0)));
    return worst;
}

inline void verify_plane(const PlaneField& f, VerifyReport& rep)
{
    const PlaneDiagnostics d = validate_plane(f, 1e-8);
    for (const auto& c : d.checks) {
        const bool enforced = c.name != "spectral_consistency" || f.singular_nodes.empty();
        rep.add("plane", c.name, c.residual, d.tol, c.pass || !enforced);
    }
}

inline void verify_spectrum(const PlaneField& f, const Ladder& lad, const VerifyOptions& opt, VerifyReport& rep)
{
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> uni(0.0, 100.0);
    double det_err = 0.0;
    for (int i = 0; i < 20; ++i) det_err = std::max(det_err, std::abs(monodromy(f, uni(rng)).det() - 1.0));
    rep.below("spectrum", "det_invariant", det_err, 1e-9);

    // lambda_{k-1}^2 < lambda_k^1 <= lambda_k^2 < lambda_{k+1}^1; the k = 1
    // pair is the double eigenvalue 1.
    const int km = lad.k_max();
    double margin = std::numeric_limits<double>::infinity();
    bool ordered = true;
    for (int k = 2; k <= km; ++k) {
        const double lo = lad.get(k - 1, 2).lambda, l1 = lad.get(k, 1).lambda, l2 = lad.get(k, 2).lambda;
        ordered = ordered && lo < l1 && l1 <= l2;
        margin = std::min(margin, l1 - lo);
    }
    rep.add("spectrum", "interlacing", margin, 0.0, ordered);

    // Three samples inside every gap between consecutive pairs must be elliptic.
    std::size_t bad = 0;
    for (int k = 1; k < km; ++k) {
        const double a = lad.get(k, 2).lambda, b = lad.get(k + 1, 1).lambda;
        for (double s : {0.25, 0.5, 0.75})
            if (classify(monodromy(f, a + s * (b - a))).tag != MonodromyTag::EllipticM0) ++bad;
    }
    rep.add("spectrum", "gap_elliptic_failures", double(bad), 0.0, bad == 0);

    std::size_t zero_miss = 0;
    for (const auto& r : lad.records)
        if (r.k >= 1 && zero_count(r.h) != static_cast<std::size_t>(2 * r.k)) ++zero_miss;
    rep.add("spectrum", "zero_count_mismatches", double(zero_miss), 0.0, zero_miss == 0);

    rep.below("spectrum", "orthonormality", gram_deviation(f, lad, km), 1e-6);

    if (quarter_turn_symmetric(f.model)) {
        const DoublingReport d = symmetry_doubling_check(f, lad);
        double worst = 0.0;
        for (const auto& e : d.entries) worst = std::max({worst, e.gap, e.minus_id_residual});
        rep.below("spectrum", "odd_k_doubling", worst, 1e-6);
    }
}

inline void verify_geometry(const PlaneField& f, const Ladder& lad, VerifyReport& rep)
{
    std::size_t cusp_miss = 0, orient_bad = 0;
    double closure = 0.0;
    for (int k = 2; k <= std::min(6, lad.k_max()); ++k)
        for (int b = 1; b <= 2; ++b) {
            const auto& e = lad.get(k, b);
            const CurveData c = eigen_curve(f, e);
            if (c.cusp_nodes.size() != static_cast<std::size_t>(2 * k)) ++cusp_miss;
            closure = std::max(closure, closure_gap(f, c));
            if (!orientation_sign(f, c, e.lambda).consistent) ++orient_bad;
        }
    rep.add("geometry", "cusp_count_mismatches", double(cusp_miss), 0.0, cusp_miss == 0);
    rep.below("geometry", "eigen_closure", closure, 1e-6);
    rep.add("geometry", "orientation_violations", double(orient_bad), 0.0, orient_bad == 0);

    const auto one = lambda_one_eigenspace(f);
    const CurveData open = curve_from_radius(f, one.r1, {}, f.t_offset());
    const double gap = norm(open.drift) / diameter(open.points);
    rep.add("geometry", "lambda1_open_gap", gap, 1e-3, gap >= 1e-3);
}

inline void verify_analysis(const PlaneField& f, const Ladder& lad, const VerifyOptions& opt, VerifyReport& rep)
{
    rep.below("analysis", "orthonormality", gram_deviation(f, lad, lad.k_max()), 1e-6);

    std::size_t sharp_miss = 0;
    for (int k0 = 2; k0 <= lad.k_max(); ++k0)
        if (sturm_hurwitz_count(f, lad.get(k0, 1).h, k0, lad).count != static_cast<std::size_t>(2 * k0)) ++sharp_miss;
    rep.add("analysis", "sturm_hurwitz_sharpness_misses", double(sharp_miss), 0.0, sharp_miss == 0);

    Samples h = lad.get(2, 1).h;
    detail::axpy(h, 1.0, lad.get(3, 1).h);
    const InvoluteReport inv = involute_iteration(f, h, 12, &lad);
    rep.below("analysis", "involute_ratio_error", std::abs(inv.limit_ratio * lad.get(2, 1).lambda - 1.0), 1e-2);

    auto four = four_vertex_suite(f, lad, opt.trials, opt.seed);
    auto six = six_vertex_suite(f, lad, opt.trials, opt.seed);
    rep.add("analysis", "four_vertex_min", double(four.min_count), 4.0, four.pass);
    rep.add("analysis", "six_vertex_min", double(six.min_count), 6.0, six.pass);
    double width = 0.0;
    for (const auto& t : six.trials) width = std::max(width, t.width_deviation);
    rep.below("analysis", "constant_width_deviation", width, 1e-7);
    rep.vertex_suites.push_back(std::move(four));
    rep.vertex_suites.push_back(std::move(six));
}

/// Runs one suite ("plane", "spectrum", "geometry", "analysis") or "all".
inline VerifyReport run_verify(const PlaneField& f, const std::string& suite, const VerifyOptions& opt)
{
    if (suite != "all" && suite != "plane" && suite != "spectrum" && suite != "geometry" && suite != "analysis")
        throw Error(ErrorKind::BadRequest, "unknown suite '" + suite + "'");
    VerifyReport rep;
    if (suite == "all" || suite == "plane") verify_plane(f, rep);
    if (suite == "plane") return rep;
    const Ladder lad = find_ladder(f, std::max(opt.k_max, 3), opt.spectrum);
    if (suite == "all" || suite == "spectrum") verify_spectrum(f, lad, opt, rep);
    if (suite == "all" || suite == "geometry") verify_geometry(f, lad, rep);
    if (suite == "all" || suite == "analysis") verify_analysis(f, lad, opt, rep);
    return rep;
}

} // namespace cycloid
