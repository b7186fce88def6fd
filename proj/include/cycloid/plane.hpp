#pragma once

// Normed planes: unit circle p, dual circle q and the bracket fields
// bp = [p,p'], bq = [q,q'] sampled on a staggered periodic grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "grid.hpp"

namespace cycloid {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------- models

struct Euclidean {};

struct LpBall {
    double p = 2.0;
};

struct Ellipse {
    double a = 1.0;
    double b = 1.0;
};

struct FourierTerm {
    int k = 2;
    double a = 0.0;
    double b = 0.0;
};

/// Support function H = a0 + sum (a_k cos k t + b_k sin k t), even k only.
struct FourierSupport {
    double a0 = 1.0;
    std::vector<FourierTerm> terms;
};

using Family = std::variant<Euclidean, LpBall, Ellipse, FourierSupport>;

struct PlaneModel {
    Family family;
    std::string label;
};

/// Families invariant under a quarter-turn, for which odd-k eigenvalues double.
inline bool quarter_turn_symmetric(const PlaneModel& m)
{
    if (std::holds_alternative<Euclidean>(m.family)) return true;
    if (std::holds_alternative<LpBall>(m.family)) return true;
    if (const auto* f = std::get_if<FourierSupport>(&m.family)) {
        return std::all_of(f->terms.begin(), f->terms.end(), [](const FourierTerm& t) {
            return t.k % 4 == 0 || (t.a == 0.0 && t.b == 0.0);
        });
    }
    return false;
}

// ---------------------------------------------------------------- charts

/// Everything the geometry needs at one parameter value.
struct ChartPoint {
    Vec2 p, dp, q, dq, ddq;
    double bp = 0.0;
    double bq = 0.0;
};

struct Brackets {
    double bp = 0.0;
    double bq = 0.0;
};

namespace detail {

inline Vec2 unit(double t) { return {std::cos(t), std::sin(t)}; }
inline Vec2 unit_perp(double t) { return {-std::sin(t), std::cos(t)}; }

// Gauge g(t) = (|cos t|^P + |sin t|^P)^(1/P) and its first three derivatives.
struct Gauge {
    double g, g1, g2, g3;
};

inline Gauge lp_gauge(double P, double t)
{
    const double c = std::cos(t), s = std::sin(t);
    const double ac = std::abs(c), as = std::abs(s);
    const double cp = std::pow(ac, P), sp = std::pow(as, P);
    const double cpm2 = std::pow(ac, P - 2.0), spm2 = std::pow(as, P - 2.0);
    const double g = std::pow(cp + sp, 1.0 / P);

    const double e = s * c * (spm2 - cpm2);
    const double e1 = (P - 1.0) * (spm2 * c * c + cpm2 * s * s) - (sp + cp);
    // |x|^(P-4) x is written as sgn(x)|x|^(P-3) to stay finite for P >= 3.
    const double ss = std::copysign(std::pow(as, P - 3.0), s);
    const double cs = std::copysign(std::pow(ac, P - 3.0), c);
    const double e2 = (P - 1.0) * ((P - 2.0) * ss * c * c * c - 2.0 * spm2 * s * c
                                   - (P - 2.0) * cs * s * s * s + 2.0 * cpm2 * s * c)
                      - P * s * c * (spm2 - cpm2);

    const double a = std::pow(g, 1.0 - P);
    const double g1 = a * e;
    const double a1 = (1.0 - P) * std::pow(g, -P) * g1;
    const double g2 = a1 * e + a * e1;
    const double a2 = (1.0 - P) * (-P * std::pow(g, -P - 1.0) * g1 * g1 + std::pow(g, -P) * g2);
    const double g3 = a2 * e + 2.0 * a1 * e1 + a * e2;
    return {g, g1, g2, g3};
}

// Support-function construction from H, H', H'' at angle t.
inline ChartPoint from_support(double t, double H, double H1, double H2)
{
    const Vec2 u = unit(t), up = unit_perp(t);
    ChartPoint cp;
    cp.p = H * u + H1 * up;
    cp.dp = (H + H2) * up;
    cp.bp = H * (H + H2);
    cp.q = up * (1.0 / H);
    cp.dq = cp.p * (-1.0 / (H * H));
    cp.ddq = cp.dp * (-1.0 / (H * H)) + cp.p * (2.0 * H1 / (H * H * H));
    cp.bq = 1.0 / (H * H);
    return cp;
}

// Gauge construction p = u/N for a norm N given with its derivatives.
inline ChartPoint from_gauge(double t, const Gauge& N)
{
    const Vec2 u = unit(t), up = unit_perp(t);
    const double k = N.g + N.g2;
    ChartPoint cp;
    cp.p = u * (1.0 / N.g);
    cp.dp = up * (1.0 / N.g) - u * (N.g1 / (N.g * N.g));
    cp.bp = 1.0 / (N.g * N.g);
    cp.q = N.g * up - N.g1 * u;
    cp.dq = -k * u;
    cp.ddq = -(N.g1 + N.g3) * u - k * up;
    cp.bq = N.g * k;
    return cp;
}

} // namespace detail

/// Evaluates the plane's fields at any parameter value. For L_p the parameter
/// is a polar angle sigma reparameterized by sigma = tau - alpha sin(4 tau)/4,
/// which concentrates nodes near the axes where the unit circle is only
/// finitely smooth.
class Chart {
public:
    static constexpr double lp_cluster = 0.9;

    explicit Chart(Family family) : family_(std::move(family))
    {
        if (const auto* lp = std::get_if<LpBall>(&family_)) p_ = lp->p;
    }

    const Family& family() const { return family_; }
    bool clustered() const { return std::holds_alternative<LpBall>(family_); }

    /// Angle sigma of the underlying polar chart and its first two derivatives.
    static void cluster_map(double tau, double& s, double& s1, double& s2)
    {
        s = tau - lp_cluster * std::sin(4.0 * tau) / 4.0;
        s1 = 1.0 - lp_cluster * std::cos(4.0 * tau);
        s2 = 4.0 * lp_cluster * std::sin(4.0 * tau);
    }

    /// Parameter values in [0, 2pi) where the coefficients are not smooth.
    std::vector<double> breakpoints() const
    {
        if (clustered()) return {0.0, pi / 2.0, pi, 1.5 * pi};
        return {};
    }

    ChartPoint at(double tau) const
    {
        return std::visit([&](const auto& f) { return eval(f, tau); }, family_);
    }

    Brackets brackets(double tau) const
    {
        return std::visit([&](const auto& f) { return eval_brackets(f, tau); }, family_);
    }

private:
    ChartPoint eval(const Euclidean&, double t) const
    {
        ChartPoint cp;
        cp.p = detail::unit(t);
        cp.dp = detail::unit_perp(t);
        cp.q = cp.dp;
        cp.dq = -cp.p;
        cp.ddq = -cp.q;
        cp.bp = 1.0;
        cp.bq = 1.0;
        return cp;
    }

    ChartPoint eval(const Ellipse& e, double t) const
    {
        const double c = std::cos(t), s = std::sin(t);
        ChartPoint cp;
        cp.p = {e.a * c, e.b * s};
        cp.dp = {-e.a * s, e.b * c};
        cp.bp = e.a * e.b;
        cp.q = {-s / e.b, c / e.a};
        cp.dq = {-c / e.b, -s / e.a};
        cp.ddq = {s / e.b, -c / e.a};
        cp.bq = 1.0 / (e.a * e.b);
        return cp;
    }

    ChartPoint eval(const FourierSupport& f, double t) const
    {
        double H = f.a0, H1 = 0.0, H2 = 0.0;
        for (const auto& term : f.terms) {
            const double k = term.k;
            const double c = std::cos(k * t), s = std::sin(k * t);
            H += term.a * c + term.b * s;
            H1 += k * (-term.a * s + term.b * c);
            H2 += -k * k * (term.a * c + term.b * s);
        }
        return detail::from_support(t, H, H1, H2);
    }

    ChartPoint eval(const LpBall&, double tau) const
    {
        double s, s1, s2;
        cluster_map(tau, s, s1, s2);
        ChartPoint cp;
        if (p_ >= 2.0) {
            cp = detail::from_gauge(s, detail::lp_gauge(p_, s));
        } else {
            const auto H = detail::lp_gauge(p_ / (p_ - 1.0), s);
            cp = detail::from_support(s, H.g, H.g1, H.g2);
        }
        // Chain rule to the clustered parameter.
        cp.ddq = cp.ddq * (s1 * s1) + cp.dq * s2;
        cp.dp *= s1;
        cp.dq *= s1;
        cp.bp *= s1;
        cp.bq *= s1;
        return cp;
    }

    Brackets eval_brackets(const Euclidean&, double) const { return {1.0, 1.0}; }

    Brackets eval_brackets(const Ellipse& e, double) const { return {e.a * e.b, 1.0 / (e.a * e.b)}; }

    Brackets eval_brackets(const FourierSupport& f, double t) const
    {
        double H = f.a0, H2 = 0.0;
        for (const auto& term : f.terms) {
            const double k = term.k;
            const double v = term.a * std::cos(k * t) + term.b * std::sin(k * t);
            H += v;
            H2 -= k * k * v;
        }
        return {H * (H + H2), 1.0 / (H * H)};
    }

    Brackets eval_brackets(const LpBall& lp, double tau) const
    {
        const ChartPoint cp = eval(lp, tau);
        return {cp.bp, cp.bq};
    }

    Family family_;
    double p_ = 2.0;
};

// --------------------------------------------------------- signed-power chart

/// Closed forms of the L_p circle in the signed-power parameter
/// t -> (sgn cos t |cos t|^(2/p), sgn sin t |sin t|^(2/p)), valid off the axes.
namespace lp_chart {

inline double conjugate(double p) { return p / (p - 1.0); }

inline Vec2 point(double p, double t)
{
    const double c = std::cos(t), s = std::sin(t);
    return {std::copysign(std::pow(std::abs(c), 2.0 / p), c), std::copysign(std::pow(std::abs(s), 2.0 / p), s)};
}

/// Dual point q with [p, q] = 1: the conjugate circle turned by a quarter.
inline Vec2 dual_point(double p, double t)
{
    const Vec2 v = point(conjugate(p), t);
    return {-v.y, v.x};
}

inline double bp(double p, double t)
{
    return (2.0 / p) * std::pow(std::abs(std::cos(t) * std::sin(t)), 2.0 / p - 1.0);
}

inline double bq(double p, double t) { return bp(conjugate(p), t); }

/// Polar angle of point(p, t).
inline double polar_angle(double p, double t)
{
    const Vec2 v = point(p, t);
    return std::atan2(v.y, v.x);
}

/// dt/dsigma for the polar angle sigma away from the axes.
inline double dt_dsigma(double p, double sigma)
{
    // tan t = sgn * |tan sigma|^(p/2) quadrant by quadrant.
    const double ts = std::abs(std::tan(sigma));
    const double sec2 = 1.0 / (std::cos(sigma) * std::cos(sigma));
    return (p / 2.0) * std::pow(ts, p / 2.0 - 1.0) * sec2 / (1.0 + std::pow(ts, p));
}

} // namespace lp_chart

// ---------------------------------------------------------------- field

struct PlaneField {
    PlaneModel model;
    std::shared_ptr<const Chart> chart;
    std::size_t n = 0;
    Samples grid;
    std::vector<Vec2> p, dp, q, dq, ddq;
    Samples bp, bq;
    std::vector<std::size_t> singular_nodes;

    double step() const { return two_pi / static_cast<double>(n); }
    /// Parameter of node 0; the grid is staggered by half a step.
    double t_offset() const { return pi / static_cast<double>(n); }
    bool is_singular(std::size_t j) const
    {
        return std::binary_search(singular_nodes.begin(), singular_nodes.end(), j % n);
    }
};

namespace detail {

inline void check_model(const PlaneModel& m)
{
    if (const auto* lp = std::get_if<LpBall>(&m.family)) {
        if (!(lp->p > 1.0) || !std::isfinite(lp->p))
            throw Error(ErrorKind::InvalidModel, "lp exponent must be finite and > 1");
    } else if (const auto* e = std::get_if<Ellipse>(&m.family)) {
        if (!(e->a > 0.0) || !(e->b > 0.0) || !std::isfinite(e->a) || !std::isfinite(e->b))
            throw Error(ErrorKind::InvalidModel, "ellipse semi-axes must be positive");
    } else if (const auto* f = std::get_if<FourierSupport>(&m.family)) {
        for (const auto& t : f->terms)
            if (t.k < 2 || t.k % 2 != 0)
                throw Error(ErrorKind::InvalidModel, "fourier terms must have even k >= 2");
    }
}

} // namespace detail

inline PlaneField build_plane(const PlaneModel& model, std::size_t n = 2048)
{
    if (n < 64 || !is_power_of_two(n))
        throw Error(ErrorKind::BadRequest, "grid size must be a power of two >= 64");
    detail::check_model(model);

    PlaneModel m = model;
    if (const auto* lp = std::get_if<LpBall>(&m.family); lp && lp->p == 2.0) m.family = Euclidean{};

    if (const auto* f = std::get_if<FourierSupport>(&m.family)) {
        // Positivity and quadratic convexity on a grid four times finer.
        const std::size_t nv = 4 * n;
        for (std::size_t j = 0; j < nv; ++j) {
            const double t = two_pi * static_cast<double>(j) / static_cast<double>(nv);
            double H = f->a0, H2 = 0.0;
            for (const auto& term : f->terms) {
                const double k = term.k;
                const double v = term.a * std::cos(k * t) + term.b * std::sin(k * t);
                H += v;
                H2 -= k * k * v;
            }
            if (!(H > 0.0)) throw Error(ErrorKind::InvalidModel, "support function not positive");
            if (!(H + H2 > 0.0)) throw Error(ErrorKind::InvalidModel, "support function not quadratically convex");
        }
    }

    PlaneField f;
    f.model = m;
    f.chart = std::make_shared<const Chart>(m.family);
    f.n = n;
    f.grid.resize(n);
    f.p.resize(n); f.dp.resize(n); f.q.resize(n); f.dq.resize(n); f.ddq.resize(n);
    f.bp.resize(n); f.bq.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = (static_cast<double>(j) + 0.5) * f.step();
        f.grid[j] = t;
        const ChartPoint cp = f.chart->at(t);
        f.p[j] = cp.p; f.dp[j] = cp.dp; f.q[j] = cp.q; f.dq[j] = cp.dq; f.ddq[j] = cp.ddq;
        f.bp[j] = cp.bp; f.bq[j] = cp.bq;
    }
    if (f.chart->clustered()) {
        // Axes sit midway between nodes j0-1 and j0.
        for (int a = 0; a < 4; ++a) {
            const std::size_t j0 = static_cast<std::size_t>(a) * n / 4;
            f.singular_nodes.push_back(j0);
            f.singular_nodes.push_back((j0 + n - 1) % n);
        }
        std::sort(f.singular_nodes.begin(), f.singular_nodes.end());
    }

    double duality = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (f.is_singular(j)) continue;
        duality = std::max(duality, std::abs(bracket(f.p[j], f.q[j]) - 1.0));
        if (!(f.bp[j] > 0.0) || !(f.bq[j] > 0.0) || !std::isfinite(f.bp[j]) || !std::isfinite(f.bq[j]))
            throw Error(ErrorKind::GridTooCoarse, "bracket fields not positive at a regular node");
    }
    if (duality > 1e-8) throw Error(ErrorKind::GridTooCoarse, "duality residual " + std::to_string(duality));
    return f;
}

/// Field values on a grid of `turns` periods, tiled from the 2pi samples.
inline Samples tile(const Samples& v, std::size_t turns)
{
    Samples out;
    out.reserve(v.size() * turns);
    for (std::size_t t = 0; t < turns; ++t) out.insert(out.end(), v.begin(), v.end());
    return out;
}

// ---------------------------------------------------------------- diagnostics

struct PlaneCheck {
    std::string name;
    double residual = 0.0;
    bool pass = false;
};

struct PlaneDiagnostics {
    double tol = 0.0;
    std::vector<PlaneCheck> checks;
    bool pass = true;
};

inline PlaneDiagnostics validate_plane(const PlaneField& f, double tol)
{
    const std::size_t n = f.n;
    const std::size_t half = n / 2;
    double duality = 0.0, symmetry = 0.0, identity = 0.0, recon = 0.0, spectral = 0.0, positive = 0.0;

    Samples dqx(n), dqy(n);
    for (std::size_t j = 0; j < n; ++j) { dqx[j] = f.dq[j].x; dqy[j] = f.dq[j].y; }
    const Samples ddqx = spectral_derivative(dqx), ddqy = spectral_derivative(dqy);

    for (std::size_t j = 0; j < n; ++j) {
        if (f.is_singular(j)) continue;
        const std::size_t k = (j + half) % n;
        duality = std::max(duality, std::abs(bracket(f.p[j], f.q[j]) - 1.0));
        symmetry = std::max({symmetry, norm(f.p[k] + f.p[j]), norm(f.q[k] + f.q[j]),
                             std::abs(f.bp[k] - f.bp[j]), std::abs(f.bq[k] - f.bq[j])});
        const double lhs = f.bp[j] * f.bq[j] * f.bq[j];
        identity = std::max(identity, std::abs(lhs - bracket(f.dq[j], f.ddq[j])));
        recon = std::max(recon, norm(f.p[j] + f.dq[j] * (1.0 / f.bq[j])));
        spectral = std::max(spectral, norm(Vec2{ddqx[j], ddqy[j]} - f.ddq[j]));
        if (!(f.bp[j] > 0.0) || !(f.bq[j] > 0.0)) positive = 1.0;
    }

    PlaneDiagnostics d;
    d.tol = tol;
    auto add = [&](std::string name, double r, bool enforce = true) {
        PlaneCheck c{std::move(name), r, r <= tol};
        if (enforce) d.pass = d.pass && c.pass;
        d.checks.push_back(std::move(c));
    };
    add("duality", duality);
    add("symmetry", symmetry);
    add("bracket_identity", identity);
    add("reconstruction", recon);
    add("positivity", positive);
    // Spectral differentiation converges slowly across the L_p axes, so it is
    // reported there but not enforced.
    add("spectral_consistency", spectral, f.singular_nodes.empty());

    if (const auto* lp = std::get_if<LpBall>(&f.model.family)) {
        // bp*bq scales with the square of the parameter speed; against the
        // signed-power parameter it is the constant 4/(p q*).
        const double P = lp->p;
        const double target = 4.0 / (P * lp_chart::conjugate(P));
        // Below p = 2 the sampling angle is the polar angle of the dual circle.
        const double chart_p = P >= 2.0 ? P : lp_chart::conjugate(P);
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (f.is_singular(j)) continue;
            double s, s1, s2;
            Chart::cluster_map(f.grid[j], s, s1, s2);
            const double dt = lp_chart::dt_dsigma(chart_p, s) * s1;
            worst = std::max(worst, std::abs(f.bp[j] * f.bq[j] / (dt * dt) - target));
        }
        add("lp_bracket_product", worst);
    }
    return d;
}

} // namespace cycloid
