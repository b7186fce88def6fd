#pragma once

// Curves from support functions or curvature radii, evolutes in the primal
// and dual planes, cusps, vertices, orientation and width.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "grid.hpp"
#include "plane.hpp"
#include "spectrum.hpp"

namespace cycloid {

/// Which plane a curve's support function is measured in. Evolutes of primal
/// curves are dual curves and vice versa.
enum class Role { Primal, Dual };

struct CurveData {
    Role role = Role::Primal;
    std::size_t turns = 1;
    Samples t;           // parameter values of the samples
    Samples h, hw;       // support function and its derivative over the b_q-role bracket
    Samples r, rw;       // curvature radius and r' over the same bracket
    std::vector<Vec2> points;
    std::vector<double> cusps;      // parameters where r changes sign
    std::vector<double> vertices;   // parameters where r' changes sign
    std::vector<std::size_t> cusp_nodes, vertex_nodes;
    Vec2 drift;          // gamma(t0 + 2 pi turns) - gamma(t0)

    std::size_t size() const { return h.size(); }
    double period() const { return two_pi * static_cast<double>(turns); }
};

namespace detail {

inline std::size_t turns_for(const PlaneField& f, std::size_t m)
{
    if (m == 0 || m % f.n != 0) throw Error(ErrorKind::BadRequest, "samples must cover whole turns of the grid");
    return m / f.n;
}

// Bracket playing the role of b_q (normal speed) and b_p for a curve's plane.
inline const Samples& bq_role(const PlaneField& f, Role r) { return r == Role::Primal ? f.bq : f.bp; }
inline const Samples& bp_role(const PlaneField& f, Role r) { return r == Role::Primal ? f.bp : f.bq; }

inline Samples node_params(const PlaneField& f, std::size_t m)
{
    Samples t(m);
    for (std::size_t j = 0; j < m; ++j) t[j] = f.t_offset() + static_cast<double>(j) * f.step();
    return t;
}

inline void detect_features(CurveData& c)
{
    c.cusp_nodes = sign_changes(c.r);
    c.vertex_nodes = sign_changes(c.rw);
    c.cusps.clear();
    c.vertices.clear();
    for (std::size_t j : c.cusp_nodes) c.cusps.push_back(crossing_parameter(c.r, c.t, j, c.period()));
    for (std::size_t j : c.vertex_nodes) c.vertices.push_back(crossing_parameter(c.rw, c.t, j, c.period()));
}

inline void reconstruct(const PlaneField& f, CurveData& c)
{
    const std::size_t m = c.size();
    c.points.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = j % f.n;
        // Primal: gamma = h p + hw q. Dual: the support is taken against p, so
        // delta = hw p - h q.
        c.points[j] = c.role == Role::Primal ? c.h[j] * f.p[i] + c.hw[j] * f.q[i] : c.hw[j] * f.p[i] - c.h[j] * f.q[i];
    }
}

inline Samples divide(const Samples& a, const Samples& b_tiled)
{
    Samples out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] / b_tiled[j % b_tiled.size()];
    return out;
}

} // namespace detail

/// Curve from a support function. When `hw` is empty, h'/bq is obtained by
/// spectral differentiation; r = h + (hw)'/bp.
inline CurveData curve_from_support(const PlaneField& f, const Samples& h, const Samples& hw = {}, Role role = Role::Primal)
{
    CurveData c;
    c.role = role;
    c.turns = detail::turns_for(f, h.size());
    c.t = detail::node_params(f, h.size());
    c.h = h;
    const double L = c.period();
    const Samples& bq = detail::bq_role(f, role);
    const Samples& bp = detail::bp_role(f, role);
    c.hw = hw.empty() ? detail::divide(spectral_derivative(h, L), bq) : hw;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (!std::isfinite(c.hw[j]) && !f.is_singular(j % f.n))
            throw Error(ErrorKind::SingularSupport, "h'/bq not finite at node " + std::to_string(j));
    const Samples dhw = detail::divide(spectral_derivative(c.hw, L), bp);
    c.r.resize(c.size());
    // Primal: r = h + (hw)'/bp. Dual: r = -h - (hw)'/bq.
    for (std::size_t j = 0; j < c.size(); ++j) c.r[j] = role == Role::Primal ? h[j] + dhw[j] : -h[j] - dhw[j];
    c.rw = detail::divide(spectral_derivative(c.r, L), bq);
    detail::reconstruct(f, c);
    detail::detect_features(c);
    return c;
}

/// Eigen-cycloid of a ladder record, using the exact relations r = (1 - lambda) h.
inline CurveData eigen_curve(const PlaneField& f, const Samples& h, const Samples& hw, double lambda)
{
    CurveData c;
    c.turns = detail::turns_for(f, h.size());
    c.t = detail::node_params(f, h.size());
    c.h = h;
    c.hw = hw;
    c.r.resize(h.size());
    c.rw.resize(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
        c.r[j] = (1.0 - lambda) * h[j];
        c.rw[j] = (1.0 - lambda) * hw[j];
    }
    detail::reconstruct(f, c);
    detail::detect_features(c);
    return c;
}

inline CurveData eigen_curve(const PlaneField& f, const EigenRecord& e) { return eigen_curve(f, e.h, e.hw, e.lambda); }

/// Integrates gamma' = r p' from gamma(t0) = gamma0. The quadrature is
/// spectral on the periodic part of r p' plus the exact mean drift.
inline CurveData curve_from_radius(const PlaneField& f, const Samples& r, Vec2 gamma0, double t0)
{
    CurveData c;
    c.turns = detail::turns_for(f, r.size());
    c.t = detail::node_params(f, r.size());
    const std::size_t m = r.size();
    const double L = c.period();
    Samples fx(m), fy(m);
    for (std::size_t j = 0; j < m; ++j) {
        fx[j] = r[j] * f.dp[j % f.n].x;
        fy[j] = r[j] * f.dp[j % f.n].y;
    }
    const double mx = mean(fx), my = mean(fy);
    const Samples Fx = spectral_antiderivative(fx, L), Fy = spectral_antiderivative(fy, L);
    const double gx0 = trig_interpolate(Fx, c.t[0], L, t0);
    const double gy0 = trig_interpolate(Fy, c.t[0], L, t0);
    c.points.resize(m);
    for (std::size_t j = 0; j < m; ++j)
        c.points[j] = gamma0 + Vec2{mx * (c.t[j] - t0) + Fx[j] - gx0, my * (c.t[j] - t0) + Fy[j] - gy0};
    c.drift = {mx * L, my * L};
    c.r = r;
    c.rw = detail::divide(spectral_derivative(r, L), f.bq);
    c.h.resize(m);
    c.hw.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        c.h[j] = bracket(c.points[j], f.q[j % f.n]);
        c.hw[j] = bracket(f.p[j % f.n], c.points[j]);
    }
    detail::detect_features(c);
    return c;
}

/// Evolute: delta = gamma - r p for a primal curve, eta = delta - r q for a
/// dual one. Support relations are exact; only r' needs a derivative.
inline CurveData evolute(const PlaneField& f, const CurveData& c)
{
    const std::size_t m = c.size();
    CurveData e;
    e.turns = c.turns;
    e.t = c.t;
    e.h.resize(m);
    e.hw.resize(m);
    e.r.resize(m);
    e.points.resize(m);
    if (c.role == Role::Primal) {
        e.role = Role::Dual;
        for (std::size_t j = 0; j < m; ++j) {
            e.h[j] = -c.hw[j];
            e.hw[j] = c.h[j] - c.r[j];
            e.r[j] = c.rw[j];
            e.points[j] = c.points[j] - c.r[j] * f.p[j % f.n];
        }
    } else {
        e.role = Role::Primal;
        for (std::size_t j = 0; j < m; ++j) {
            e.h[j] = c.hw[j];
            e.hw[j] = -(c.h[j] + c.r[j]);
            e.r[j] = -c.rw[j];
            e.points[j] = c.points[j] - c.r[j] * f.q[j % f.n];
        }
    }
    if (c.role == Role::Primal) {
        e.rw = detail::divide(spectral_derivative(c.rw, c.period()), f.bp);
    } else {
        e.rw = detail::divide(spectral_derivative(e.r, c.period()), f.bq);
    }
    e.drift = c.drift;
    detail::detect_features(e);
    return e;
}

/// T h = -(1/bp) (h'/bq)' by spectral differentiation.
inline Samples double_evolute_operator(const PlaneField& f, const Samples& h)
{
    const double L = two_pi * static_cast<double>(detail::turns_for(f, h.size()));
    const Samples hw = detail::divide(spectral_derivative(h, L), f.bq);
    Samples out = detail::divide(spectral_derivative(hw, L), f.bp);
    for (double& x : out) x = -x;
    return out;
}

/// T h from supplied samples of h'/bq; one differentiation only.
inline Samples double_evolute_operator(const PlaneField& f, const Samples& h, const Samples& hw)
{
    const double L = two_pi * static_cast<double>(detail::turns_for(f, h.size()));
    Samples out = detail::divide(spectral_derivative(hw, L), f.bp);
    for (double& x : out) x = -x;
    return out;
}

/// Dual length: integral of h bp.
inline double dual_length(const PlaneField& f, const Samples& h)
{
    double s = 0.0;
    for (std::size_t j = 0; j < f.n; ++j) s += h[j] * f.bp[j];
    return s * f.step();
}

/// S h, the solution of T g = h with zero dual length, for h in L0.
inline Samples involute_operator(const PlaneField& f, const Samples& h)
{
    const std::size_t n = f.n;
    if (h.size() != n) throw Error(ErrorKind::BadRequest, "involute operator expects one turn");
    const double len = dual_length(f, h);
    if (std::abs(len) > 1e-8 * std::max(1.0, max_abs(h)))
        throw Error(ErrorKind::NotZeroDualLength, "dual length " + std::to_string(len));
    Samples a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = h[j] * f.bp[j];
    Samples F = spectral_antiderivative(a);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) { num += F[j] * f.bq[j]; den += f.bq[j]; }
    const double c1 = -num / den;
    for (std::size_t j = 0; j < n; ++j) a[j] = (F[j] + c1) * f.bq[j];
    Samples G = spectral_antiderivative(a);
    num = 0.0;
    den = 0.0;
    for (std::size_t j = 0; j < n; ++j) { num += G[j] * f.bp[j]; den += f.bp[j]; }
    const double c2 = -num / den;
    // T(-G) = (1/bp) F' = h, so the involute is -G shifted into L0.
    for (std::size_t j = 0; j < n; ++j) G[j] = -(G[j] + c2);
    return G;
}

/// w(t) = h(t) + h(t + pi).
inline Samples width_function(const PlaneField& f, const Samples& h)
{
    const std::size_t n = f.n, half = n / 2;
    Samples w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = h[j] + h[(j + half) % n];
    return w;
}

struct OrientationReport {
    int expected_sign = 0;
    bool consistent = true;
    std::size_t checked = 0;
    std::size_t violations = 0;
    /// max |[gamma, gamma'] - h^2 bp (1 - lambda)| over checked nodes.
    double identity_residual = 0.0;
};

/// [gamma, gamma'] with gamma' = r p', checked away from cusps.
inline OrientationReport orientation_sign(const PlaneField& f, const CurveData& c, double lambda)
{
    OrientationReport rep;
    rep.expected_sign = lambda < 1.0 ? 1 : -1;
    const double hmax = max_abs(c.h);
    for (std::size_t j = 0; j < c.size(); ++j) {
        const std::size_t i = j % f.n;
        if (std::abs(c.h[j]) < 1e-3 * hmax) continue;
        const double v = c.r[j] * bracket(c.points[j], f.dp[i]);
        const double ident = c.h[j] * c.h[j] * f.bp[i] * (1.0 - lambda);
        rep.identity_residual = std::max(rep.identity_residual, std::abs(v - ident));
        ++rep.checked;
        if ((v > 0 ? 1 : -1) != rep.expected_sign) ++rep.violations;
    }
    rep.consistent = rep.violations == 0;
    return rep;
}

/// Largest distance between two curve points.
inline double diameter(const std::vector<Vec2>& pts)
{
    double d = 0.0;
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi = -lo;
    for (const auto& p : pts) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    // Bounding-box diagonal bounds the diameter within a factor sqrt 2; use
    // the exact value for moderate sizes.
    if (pts.size() <= 4096) {
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b) d = std::max(d, norm(pts[a] - pts[b]));
        return d;
    }
    return norm(hi - lo);
}

/// Relative miss of a curve given by samples of (h, hw) after j turns, where
/// the end state of the last turn is supplied separately.
inline double closure_miss(const PlaneField& f, const Samples& h, const Samples& hw, std::size_t j, StateVector end,
                           double diam)
{
    const std::size_t m = h.size();
    const Vec2 g0 = h[0] * f.p[0] + hw[0] * f.q[0];
    const std::size_t idx = j * f.n;
    const Vec2 gj = idx < m ? h[idx] * f.p[0] + hw[idx] * f.q[0] : end.h * f.p[0] + end.w * f.q[0];
    return norm(gj - g0) / diam;
}

/// ||gamma(t0 + L) - gamma(t0)|| / diameter from integrating r p'.
inline double closure_gap(const PlaneField& f, const CurveData& c)
{
    const CurveData g = curve_from_radius(f, c.r, c.points.empty() ? Vec2{} : c.points[0], c.t[0]);
    const double d = diameter(g.points);
    return d > 0.0 ? norm(g.drift) / d : 0.0;
}

// -------------------------------------------------------------- export

inline std::string to_csv(const CurveData& c)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "t,x,y,h,r,is_cusp,is_vertex\n";
    std::vector<char> cusp(c.size(), 0), vert(c.size(), 0);
    for (auto j : c.cusp_nodes) cusp[j] = 1;
    for (auto j : c.vertex_nodes) vert[j] = 1;
    for (std::size_t j = 0; j < c.size(); ++j) {
        os << c.t[j] << ',' << c.points[j].x << ',' << c.points[j].y << ',' << c.h[j] << ',' << c.r[j] << ','
           << int(cusp[j]) << ',' << int(vert[j]) << '\n';
    }
    return os.str();
}

struct SvgStyle {
    double width = 800.0;
    double height = 800.0;
    double stroke_width = 1.5;
    std::string stroke = "#1f3b73";
    std::string cusp_fill = "#c0392b";
    bool closed = true;
};

inline std::string to_svg(const CurveData& c, const SvgStyle& style = {})
{
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (const auto& p : c.points) {
        x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
        y0 = std::min(y0, -p.y); y1 = std::max(y1, -p.y);
    }
    double w = std::max(x1 - x0, 1e-12), h = std::max(y1 - y0, 1e-12);
    const double mx = 0.05 * w, my = 0.05 * h;
    x0 -= mx; y0 -= my; w += 2 * mx; h += 2 * my;
    const double radius = 0.01 * std::max(w, h);

    std::ostringstream os;
    os << std::setprecision(8);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
       << "\" viewBox=\"" << x0 << ' ' << y0 << ' ' << w << ' ' << h << "\">\n";
    os << "<path fill=\"none\" stroke=\"" << style.stroke << "\" stroke-width=\"" << style.stroke_width
       << "\" vector-effect=\"non-scaling-stroke\" d=\"";
    for (std::size_t j = 0; j < c.points.size(); ++j)
        os << (j == 0 ? 'M' : 'L') << c.points[j].x << ',' << -c.points[j].y << ' ';
    if (style.closed) os << 'Z';
    os << "\"/>\n";
    for (std::size_t j : c.cusp_nodes) {
        const std::size_t k = (j + 1) % c.size();
        const double s = c.r[j] / (c.r[j] - c.r[k]);
        const Vec2 p = c.points[j] + std::clamp(s, 0.0, 1.0) * (c.points[k] - c.points[j]);
        os << "<circle cx=\"" << p.x << "\" cy=\"" << -p.y << "\" r=\"" << radius << "\" fill=\"" << style.cusp_fill
           << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace cycloid
