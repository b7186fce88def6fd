#pragma once

// Periodic-grid utilities: plane vectors, spectral calculus, quadrature and
// sign-change scanning.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace cycloid {

using Samples = std::vector<double>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }

/// Bracket [a,b] = det(a, b).
inline double bracket(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

inline Eigen::FFT<double>& fft_engine()
{
    thread_local Eigen::FFT<double> engine;
    return engine;
}

// Applies a diagonal multiplier m(k) in Fourier space, where k is the signed
// wavenumber on a period of length `period`. The Nyquist mode is dropped.
template <class Mult>
Samples fourier_multiply(const Samples& v, double period, Mult mult, double floor_rel = 0.0)
{
    const std::size_t n = v.size();
    std::vector<std::complex<double>> spec;
    fft_engine().fwd(spec, v);
    const double scale = 2.0 * std::numbers::pi / period;
    // Coefficients at the round-off floor carry no signal; once multiplied by
    // a large wavenumber they would dominate the result.
    double peak = 0.0;
    for (const auto& c : spec) peak = std::max(peak, std::abs(c));
    const double floor = floor_rel * peak;
    for (std::size_t j = 0; j < n; ++j) {
        const long k = (j <= n / 2) ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
        if (n % 2 == 0 && j == n / 2) {
            spec[j] = 0.0;
            continue;
        }
        spec[j] = std::abs(spec[j]) <= floor ? 0.0 : spec[j] * mult(scale * static_cast<double>(k));
    }
    Samples out;
    fft_engine().inv(out, spec);
    return out;
}

} // namespace detail

/// Spectral derivative of a periodic sample vector covering `period`.
inline Samples spectral_derivative(const Samples& v, double period = 2.0 * std::numbers::pi)
{
    return detail::fourier_multiply(
        v, period, [](double k) { return std::complex<double>(0.0, k); }, 8.0 * std::numeric_limits<double>::epsilon());
}

/// Periodic spectral antiderivative; the mean of `v` is discarded and the
/// result has zero mean.
inline Samples spectral_antiderivative(const Samples& v, double period = 2.0 * std::numbers::pi)
{
    return detail::fourier_multiply(v, period, [](double k) {
        return k == 0.0 ? std::complex<double>(0.0) : std::complex<double>(0.0, -1.0 / k);
    });
}

/// Trapezoid rule on a uniform periodic grid: step * sum(v).
inline double periodic_sum(const Samples& v, double step)
{
    double s = 0.0;
    for (double x : v) s += x;
    return s * step;
}

inline double mean(const Samples& v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double max_abs(const Samples& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Evaluates the trigonometric interpolant of `v` (grid t0 + j*period/n) at t.
inline double trig_interpolate(const Samples& v, double t0, double period, double t)
{
    const std::size_t n = v.size();
    std::vector<std::complex<double>> spec;
    detail::fft_engine().fwd(spec, v);
    const double x = 2.0 * std::numbers::pi * (t - t0) / period;
    double acc = spec[0].real();
    for (std::size_t j = 1; j < (n + 1) / 2; ++j)
        acc += 2.0 * (spec[j] * std::polar(1.0, static_cast<double>(j) * x)).real();
    if (n % 2 == 0) acc += (spec[n / 2] * std::cos(static_cast<double>(n / 2) * x)).real();
    return acc / static_cast<double>(n);
}

/// Cyclic sign changes of periodic samples. Values below rel_floor*max|v| are
/// ignored; detections closer than `cluster` steps (cyclically) count once.
/// Returns the index j of each change, located between nodes j and j+1.
inline std::vector<std::size_t> sign_changes(const Samples& v, double rel_floor = 1e-10, std::size_t cluster = 3)
{
    const std::size_t n = v.size();
    std::vector<std::size_t> raw;
    if (n < 2) return raw;
    const double floor = rel_floor * max_abs(v);
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < n; ++j)
        if (std::abs(v[j]) > floor) idx.push_back(j);
    if (idx.size() < 2) return raw;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        const std::size_t i = idx[a];
        const std::size_t k = idx[(a + 1) % idx.size()];
        if ((v[i] > 0) != (v[k] > 0)) raw.push_back(i);
    }
    if (raw.size() < 2) return raw;

    auto gap = [n](std::size_t a, std::size_t b) { return (b + n - a) % n; };
    // Group cyclically: start after the largest gap so no group wraps.
    std::size_t start = 0;
    std::size_t best = 0;
    for (std::size_t a = 0; a < raw.size(); ++a) {
        const std::size_t g = gap(raw[a], raw[(a + 1) % raw.size()]);
        if (g > best) { best = g; start = (a + 1) % raw.size(); }
    }
    std::vector<std::size_t> out;
    std::size_t count_in_group = 0;
    std::size_t group_first = raw[start];
    std::size_t prev = raw[start];
    auto flush = [&]() {
        // An even number of changes inside a cluster cancels out.
        if (count_in_group % 2 == 1) out.push_back(group_first);
    };
    for (std::size_t m = 0; m < raw.size(); ++m) {
        const std::size_t cur = raw[(start + m) % raw.size()];
        if (m == 0) { count_in_group = 1; continue; }
        if (gap(prev, cur) <= cluster) {
            ++count_in_group;
        } else {
            flush();
            group_first = cur;
            count_in_group = 1;
        }
        prev = cur;
    }
    flush();
    std::sort(out.begin(), out.end());
    return out;
}

/// Linear interpolation of the crossing parameter between nodes j and j+1.
inline double crossing_parameter(const Samples& v, const Samples& t, std::size_t j, double period)
{
    const std::size_t n = v.size();
    const std::size_t k = (j + 1) % n;
    const double t1 = t[j];
    double t2 = t[k];
    if (k == 0) t2 += period;
    const double d = v[j] - v[k];
    const double s = d == 0.0 ? 0.5 : v[j] / d;
    return t1 + std::clamp(s, 0.0, 1.0) * (t2 - t1);
}

} // namespace cycloid
