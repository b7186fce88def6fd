#pragma once

// The first-order system h' = bq w, w' = -lambda bp h, its monodromy over a
// half period and the phase-plane angle.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ode.hpp"
#include "plane.hpp"

namespace cycloid {

struct StateVector {
    double h = 0.0;
    double w = 0.0;
};

struct Trajectory {
    StateVector end;
    std::vector<double> times;
    std::vector<StateVector> samples;
    /// Smallest angle rate lambda bp cos^2 + bq sin^2 seen at accepted steps.
    double min_angle_rate = std::numeric_limits<double>::infinity();
};

struct Monodromy {
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
    double lambda = 0.0;
    double t0 = 0.0, t1 = 0.0;

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
    StateVector apply(const StateVector& v) const { return {a11 * v.h + a12 * v.w, a21 * v.h + a22 * v.w}; }
    Monodromy operator*(const Monodromy& o) const
    {
        Monodromy m = *this;
        m.a11 = a11 * o.a11 + a12 * o.a21;
        m.a12 = a11 * o.a12 + a12 * o.a22;
        m.a21 = a21 * o.a11 + a22 * o.a21;
        m.a22 = a21 * o.a12 + a22 * o.a22;
        m.t0 = o.t0;
        return m;
    }
};

enum class MonodromyTag { EllipticM0, HyperbolicPlus, HyperbolicMinus, ParabolicPlusOne, ParabolicMinusOne };

inline const char* to_string(MonodromyTag t)
{
    switch (t) {
    case MonodromyTag::EllipticM0: return "elliptic";
    case MonodromyTag::HyperbolicPlus: return "hyperbolic+";
    case MonodromyTag::HyperbolicMinus: return "hyperbolic-";
    case MonodromyTag::ParabolicPlusOne: return "parabolic+1";
    case MonodromyTag::ParabolicMinusOne: return "parabolic-1";
    }
    return "?";
}

struct MonodromyClass {
    MonodromyTag tag = MonodromyTag::EllipticM0;
    /// Elliptic rotation angle phi in (0, pi) with tr = 2 cos phi; 0 otherwise.
    double rotation = 0.0;

    bool hyperbolic() const { return tag == MonodromyTag::HyperbolicPlus || tag == MonodromyTag::HyperbolicMinus; }
};

inline MonodromyClass classify(const Monodromy& m, double tol = 1e-7)
{
    const double tr = m.trace();
    MonodromyClass c;
    if (std::abs(tr - 2.0) <= tol) c.tag = MonodromyTag::ParabolicPlusOne;
    else if (std::abs(tr + 2.0) <= tol) c.tag = MonodromyTag::ParabolicMinusOne;
    else if (tr > 2.0) c.tag = MonodromyTag::HyperbolicPlus;
    else if (tr < -2.0) c.tag = MonodromyTag::HyperbolicMinus;
    else {
        c.tag = MonodromyTag::EllipticM0;
        c.rotation = std::acos(tr / 2.0);
    }
    return c;
}

/// Rate of the clockwise phase angle beta, with (h, w) ~ (cos beta, -sin beta).
inline double angle_rate(double lambda, const Brackets& b, double beta)
{
    const double c = std::cos(beta), s = std::sin(beta);
    return lambda * b.bp * c * c + b.bq * s * s;
}

namespace detail {

inline ode::Options ode_options(double tol)
{
    ode::Options o;
    o.rtol = tol;
    o.atol = tol;
    return o;
}

// Runs the integrator across [t0, t1], restarting at coefficient break points
// so every segment has smooth coefficients.
template <std::size_t N, class F, class Observe, class OnStep>
ode::State<N> run_segments(const PlaneField& field, F&& f, double t0, double t1, ode::State<N> y, const ode::Options& opt,
                           const std::vector<double>& outputs, Observe&& observe, OnStep&& on_step)
{
    std::vector<double> cuts;
    for (double b : field.chart->breakpoints()) {
        const double first = b + two_pi * std::ceil((t0 - b) / two_pi);
        for (double c = first; c < t1; c += two_pi)
            if (c > t0) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(t1);

    double a = t0;
    std::size_t out_pos = 0;
    for (double b : cuts) {
        std::vector<double> seg_out;
        const std::size_t base = out_pos;
        while (out_pos < outputs.size() && outputs[out_pos] <= b) seg_out.push_back(outputs[out_pos++]);
        y = ode::integrate<N>(
            f, a, b, y, opt, seg_out, [&](std::size_t i, const ode::State<N>& s) { observe(base + i, s); },
            on_step);
        a = b;
    }
    return y;
}

} // namespace detail

/// Advances (h, w) from t0 to t1; samples are returned at `sample_times`.
inline Trajectory integrate(const PlaneField& field, double lambda, StateVector init, double t0, double t1,
                            double tol = 1e-12, const std::vector<double>& sample_times = {})
{
    const Chart& chart = *field.chart;
    auto rhs = [&](double t, const ode::State<2>& y) {
        const Brackets b = chart.brackets(t);
        return ode::State<2>{b.bq * y[1], -lambda * b.bp * y[0]};
    };
    Trajectory tr;
    tr.times = sample_times;
    tr.samples.resize(sample_times.size());
    auto observe = [&](std::size_t i, const ode::State<2>& y) { tr.samples[i] = {y[0], y[1]}; };
    auto on_step = [&](double t, const ode::State<2>& y) {
        const double beta = -std::atan2(y[1], y[0]);
        tr.min_angle_rate = std::min(tr.min_angle_rate, angle_rate(lambda, chart.brackets(t), beta));
    };
    const auto end = detail::run_segments<2>(field, rhs, t0, t1, {init.h, init.w}, detail::ode_options(tol),
                                             sample_times, observe, on_step);
    tr.end = {end[0], end[1]};
    return tr;
}

/// Monodromy over a half period together with the lifted clockwise turning
/// theta0 of the solution started at (1, 0).
struct HalfTurn {
    Monodromy A;
    double theta0 = 0.0;
};

inline HalfTurn half_turn(const PlaneField& field, double lambda, double tol = 1e-12)
{
    const Chart& chart = *field.chart;
    auto rhs = [&](double t, const ode::State<5>& y) {
        const Brackets b = chart.brackets(t);
        const double c = std::cos(y[4]), s = std::sin(y[4]);
        return ode::State<5>{b.bq * y[1], -lambda * b.bp * y[0], b.bq * y[3], -lambda * b.bp * y[2],
                             lambda * b.bp * c * c + b.bq * s * s};
    };
    const double t0 = field.t_offset();
    const double t1 = t0 + pi;
    auto opt = detail::ode_options(tol);
    const auto y = detail::run_segments<5>(field, rhs, t0, t1, {1.0, 0.0, 0.0, 1.0, 0.0}, opt, {},
                                           [](std::size_t, const ode::State<5>&) {},
                                           [](double, const ode::State<5>&) {});
    HalfTurn ht;
    ht.A.a11 = y[0];
    ht.A.a21 = y[1];
    ht.A.a12 = y[2];
    ht.A.a22 = y[3];
    ht.A.lambda = lambda;
    ht.A.t0 = t0;
    ht.A.t1 = t1;
    // The integrated angle fixes the number of turns; the final direction of
    // A e1 gives the fractional part to the accuracy of A itself.
    const double end_angle = -std::atan2(y[1], y[0]);
    ht.theta0 = end_angle + two_pi * std::round((y[4] - end_angle) / two_pi);
    return ht;
}

/// Monodromy A(lambda, pi) from the staggered origin.
inline Monodromy monodromy(const PlaneField& field, double lambda, double tol = 1e-12)
{
    return half_turn(field, lambda, tol).A;
}

/// Rotation index over [0, 2pi]: total clockwise turning divided by 2pi.
inline double rotation_index(const PlaneField& field, double lambda, StateVector init, double tol = 1e-12)
{
    const Chart& chart = *field.chart;
    auto rhs = [&](double t, const ode::State<3>& y) {
        const Brackets b = chart.brackets(t);
        const double c = std::cos(y[2]), s = std::sin(y[2]);
        return ode::State<3>{b.bq * y[1], -lambda * b.bp * y[0], lambda * b.bp * c * c + b.bq * s * s};
    };
    const double beta0 = -std::atan2(init.w, init.h);
    const auto y = detail::run_segments<3>(field, rhs, 0.0, two_pi, {init.h, init.w, beta0}, detail::ode_options(tol),
                                           {}, [](std::size_t, const ode::State<3>&) {},
                                           [](double, const ode::State<3>&) {});
    return (y[2] - beta0) / two_pi;
}

/// Extremes over all initial directions of the clockwise turning accumulated
/// over the half period. The eigenvalue ladder is where k*pi enters and leaves
/// [min, max].
struct TurningRange {
    double min = 0.0, max = 0.0;
    double beta_min = 0.0, beta_max = 0.0;
};

inline double turning_at(const HalfTurn& ht, double beta0)
{
    const Monodromy& A = ht.A;
    const StateVector v{std::cos(beta0), -std::sin(beta0)};
    const StateVector a1 = A.apply({1.0, 0.0});
    const StateVector av = A.apply(v);
    // Clockwise angle from A e1 to A v, in [0, pi] because det A > 0.
    const double psi = std::atan2(-(a1.h * av.w - a1.w * av.h), a1.h * av.h + a1.w * av.w);
    return ht.theta0 + psi - beta0;
}

inline TurningRange turning_range(const HalfTurn& ht)
{
    const Monodromy& A = ht.A;
    // Extremes sit where |A v| = 1, i.e. v^T M v = 1 with M = A^T A.
    const double m11 = A.a11 * A.a11 + A.a21 * A.a21;
    const double m22 = A.a12 * A.a12 + A.a22 * A.a22;
    const double m12 = A.a11 * A.a12 + A.a21 * A.a22;
    const double d = 0.5 * (m11 - m22);
    const double R = std::hypot(d, m12);
    TurningRange tr;
    if (R < 1e-14) {
        tr.min = tr.max = turning_at(ht, 0.0);
        return tr;
    }
    // v = (cos b, -sin b): v^T M v = tr/2 + R cos(2b + phi).
    const double phi = std::atan2(m12, d);
    const double arg = std::clamp((1.0 - 0.5 * (m11 + m22)) / R, -1.0, 1.0);
    const double x = std::acos(arg);
    double candidates[2] = {0.5 * (x - phi), 0.5 * (-x - phi)};
    tr.min = std::numeric_limits<double>::infinity();
    tr.max = -std::numeric_limits<double>::infinity();
    for (double b : candidates) {
        b = std::fmod(b, pi);
        if (b < 0.0) b += pi;
        const double t = turning_at(ht, b);
        if (t < tr.min) { tr.min = t; tr.beta_min = b; }
        if (t > tr.max) { tr.max = t; tr.beta_max = b; }
    }
    return tr;
}

/// Continuous rotation number of the half-period map, in units of angle:
/// (j-1)pi + phi in the j-th elliptic gap, and j*pi across the j-th band.
inline double rotation_number(const HalfTurn& ht, double tol = 1e-12)
{
    const double tr = ht.A.trace();
    if (std::abs(tr) < 2.0 - tol) {
        const double j = std::floor(ht.theta0 / pi) + 1.0;
        const double sign = std::fmod(j - 1.0, 2.0) == 0.0 ? 1.0 : -1.0;
        return (j - 1.0) * pi + std::acos(std::clamp(sign * tr / 2.0, -1.0, 1.0));
    }
    const TurningRange range = turning_range(ht);
    return pi * std::ceil(range.min / pi - 1e-12);
}

} // namespace cycloid
