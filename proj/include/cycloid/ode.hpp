#pragma once

// Dormand-Prince 5(4) with PI step-size control. Steps are clipped so that
// every requested output time is hit exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"

namespace cycloid::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
    double rtol = 1e-12;
    double atol = 1e-12;
    double initial_step = 0.0;   // 0 picks a step from the span
    double max_step = 0.0;       // 0 means unbounded
    std::size_t max_steps = 5'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double last_step = 0.0;
};

namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
} // namespace dp

/// Integrates y' = f(t, y) from t0 to t1 (t1 > t0). `outputs` must be sorted
/// inside [t0, t1]; `observe(i, y)` is called when outputs[i] is reached.
/// Each accepted step calls `on_step(t, y)`.
template <std::size_t N, class F, class Observe, class OnStep>
State<N> integrate(F&& f, double t0, double t1, State<N> y, const Options& opt, const std::vector<double>& outputs,
                   Observe&& observe, OnStep&& on_step, Stats* stats = nullptr)
{
    constexpr double beta = 0.04;
    constexpr double alpha = 0.2 - beta * 0.75;
    constexpr double safety = 0.9;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    std::size_t next_out = 0;
    while (next_out < outputs.size() && outputs[next_out] <= t0) observe(next_out++, y);
    if (!(t1 > t0)) return y;

    const double span = t1 - t0;
    double h = opt.initial_step > 0.0 ? opt.initial_step : std::min(span, 1e-3 * span + 1e-3);
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
    double err_prev = 1e-4;
    double t = t0;

    State<N> k1 = f(t, y), k2, k3, k4, k5, k6, k7, tmp, ynew;
    Stats local;
    bool last_rejected = false;

    while (t < t1) {
        if (local.accepted + local.rejected > opt.max_steps)
            throw Error(ErrorKind::StepUnderflow, "step budget exhausted");
        double target = t1;
        if (next_out < outputs.size()) target = std::min(target, outputs[next_out]);
        bool hits = false;
        const double h_prop = h;
        if (t + h >= target - 16.0 * eps * std::abs(target)) {
            h = target - t;
            hits = true;
        }
        if (hits && h <= 16.0 * eps * std::max(1.0, std::abs(t))) {
            // The output coincides with t up to rounding.
            t = target;
            while (next_out < outputs.size() && outputs[next_out] <= t) observe(next_out++, y);
            h = h_prop;
            if (t >= t1) break;
            continue;
        }
        if (h <= 16.0 * eps * std::max(1.0, std::abs(t)))
            throw Error(ErrorKind::StepUnderflow, "step size below floor at t = " + std::to_string(t));

        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * dp::a21 * k1[i];
        k2 = f(t + dp::c2 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (dp::a31 * k1[i] + dp::a32 * k2[i]);
        k3 = f(t + dp::c3 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (dp::a41 * k1[i] + dp::a42 * k2[i] + dp::a43 * k3[i]);
        k4 = f(t + dp::c4 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (dp::a51 * k1[i] + dp::a52 * k2[i] + dp::a53 * k3[i] + dp::a54 * k4[i]);
        k5 = f(t + dp::c5 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (dp::a61 * k1[i] + dp::a62 * k2[i] + dp::a63 * k3[i] + dp::a64 * k4[i] + dp::a65 * k5[i]);
        k6 = f(t + h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (dp::b1 * k1[i] + dp::b3 * k3[i] + dp::b4 * k4[i] + dp::b5 * k5[i] + dp::b6 * k6[i]);
        k7 = f(t + h, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (dp::e1 * k1[i] + dp::e3 * k3[i] + dp::e4 * k4[i] + dp::e5 * k5[i] + dp::e6 * k6[i]
                                  + dp::e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / static_cast<double>(N));
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            const double fac = err == 0.0 ? 5.0
                                          : std::clamp(safety * std::pow(err, -alpha) * std::pow(err_prev, beta), 0.2, 5.0);
            err_prev = std::max(err, 1e-4);
            t = hits ? target : t + h;
            y = ynew;
            k1 = k7;
            ++local.accepted;
            local.last_step = h;
            on_step(t, y);
            while (next_out < outputs.size() && outputs[next_out] <= t + 16.0 * eps * std::abs(t)) observe(next_out++, y);
            double hn = h * (last_rejected ? std::min(1.0, fac) : fac);
            // A step shortened to land on an output does not shrink the next one.
            if (hits) hn = std::max(hn, h_prop);
            if (opt.max_step > 0.0) hn = std::min(hn, opt.max_step);
            h = hn;
            last_rejected = false;
        } else {
            h *= std::max(0.2, safety * std::pow(err, -alpha));
            ++local.rejected;
            last_rejected = true;
        }
    }
    while (next_out < outputs.size()) observe(next_out++, y);
    if (stats) *stats = local;
    return y;
}

template <std::size_t N, class F>
State<N> integrate(F&& f, double t0, double t1, State<N> y, const Options& opt)
{
    return integrate<N>(std::forward<F>(f), t0, t1, y, opt, {}, [](std::size_t, const State<N>&) {},
                        [](double, const State<N>&) {});
}

} // namespace cycloid::ode
