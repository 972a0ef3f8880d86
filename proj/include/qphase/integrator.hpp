#ifndef QPHASE_INTEGRATOR_HPP
#define QPHASE_INTEGRATOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "qphase/error.hpp"
#include "qphase/propagator.hpp"

namespace qphase::ode {

using State = std::array<std::complex<double>, 2>;

inline State operator+(const State& a, const State& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline State operator-(const State& a, const State& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline State operator*(double s, const State& a) { return {s * a[0], s * a[1]}; }

namespace detail {

inline void check_grid(std::span<const double> times)
{
    if (times.empty())
        throw Error("propagator", "invalid grid: empty");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || (i > 0 && !(times[i] > times[i - 1])))
            throw Error("propagator", "invalid grid: times must be finite and strictly increasing");
    }
}

// Dormand-Prince 5(4) coefficients.
namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett & Wanner, dopri5 "contd5").
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
} // namespace dp

} // namespace detail

/*
 * Adaptive Dormand-Prince 5(4) with local extrapolation, dense output at the
 * requested sample times, and an RMS mixed error norm.
 */
template <class Rhs>
std::vector<State> integrate_dopri(Rhs&& rhs, State y, std::span<const double> times,
                                   const IntegratorConfig& cfg)
{
    using namespace detail::dp;
    detail::check_grid(times);
    std::vector<State> out;
    out.reserve(times.size());
    out.push_back(y);
    if (times.size() == 1)
        return out;

    double t = times.front();
    const double t_end = times.back();
    const double span = t_end - t;
    double h = std::min(cfg.max_step, 1e-3 * span);
    {
        // Initial step from the scale of the derivative.
        const State f0 = rhs(t, y);
        const double fn = std::max(std::abs(f0[0]), std::abs(f0[1]));
        const double yn = std::max(std::abs(y[0]), std::abs(y[1]));
        if (fn > 0.0)
            h = std::min(h, 0.01 * std::max(yn, cfg.abs_tol) / fn);
        h = std::max(h, 1e-12 * span);
    }

    std::size_t next = 1;
    State k1 = rhs(t, y);
    const auto err_component = [&](std::complex<double> e, std::complex<double> y0,
                                   std::complex<double> y1) {
        const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0), std::abs(y1));
        const double re = e.real() / scale;
        const double im = e.imag() / scale;
        return re * re + im * im;
    };

    while (next < times.size()) {
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw Error("propagator", "step-size underflow");
        const bool last = t + h >= t_end;
        const double step = last ? t_end - t : h;

        const State k2 = rhs(t + c2 * step, y + (step * a21) * k1);
        const State k3 = rhs(t + c3 * step, y + step * (a31 * k1 + a32 * k2));
        const State k4 = rhs(t + c4 * step, y + step * (a41 * k1 + a42 * k2 + a43 * k3));
        const State k5 =
            rhs(t + c5 * step, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const State k6 = rhs(t + step,
                             y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const State y1 =
            y + step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const State k7 = rhs(t + step, y1);
        const State e =
            step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double err = std::sqrt(
            0.25 * (err_component(e[0], y[0], y1[0]) + err_component(e[1], y[1], y1[1])));

        if (err <= 1.0) {
            const double t1 = last ? t_end : t + step;
            // Dense output for every requested sample inside (t, t1].
            const State ydiff = y1 - y;
            const State bspl = step * k1 - ydiff;
            const State r4 = ydiff - step * k7 - bspl;
            const State r5 = step * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            while (next < times.size() && times[next] <= t1) {
                if (times[next] == t1) {
                    out.push_back(y1);
                }
                else {
                    const double theta = (times[next] - t) / step;
                    const double theta1 = 1.0 - theta;
                    out.push_back(
                        y + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5))));
                }
                ++next;
            }
            t = t1;
            y = y1;
            k1 = k7;
        }
        double factor = 5.0;
        if (!std::isfinite(err))
            factor = 0.2;
        else if (err > 0.0)
            factor = 0.9 * std::pow(err, -0.2);
        h = std::min(cfg.max_step, step * std::clamp(factor, 0.2, 5.0));
    }
    return out;
}

/// Classical RK4 with fixed step cfg.max_step (shortened to land on each sample).
template <class Rhs>
std::vector<State> integrate_rk4(Rhs&& rhs, State y, std::span<const double> times,
                                 const IntegratorConfig& cfg)
{
    detail::check_grid(times);
    if (!std::isfinite(cfg.max_step) || !(cfg.max_step > 0.0))
        throw Error("propagator", "rk4 requires a finite max_step");
    std::vector<State> out;
    out.reserve(times.size());
    out.push_back(y);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double t0 = times[i - 1];
        const double interval = times[i] - t0;
        const auto n = static_cast<long>(std::ceil(interval / cfg.max_step - 1e-12));
        const double h = interval / static_cast<double>(std::max(1L, n));
        for (long s = 0; s < std::max(1L, n); ++s) {
            const double t = t0 + static_cast<double>(s) * h;
            const State k1 = rhs(t, y);
            const State k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
            const State k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
            const State k4 = rhs(t + h, y + h * k3);
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        out.push_back(y);
    }
    return out;
}

template <class Rhs>
std::vector<State> integrate(Rhs&& rhs, const State& y0, std::span<const double> times,
                             const IntegratorConfig& cfg)
{
    if (cfg.method == IntegrationMethod::rk4)
        return integrate_rk4(rhs, y0, times, cfg);
    return integrate_dopri(rhs, y0, times, cfg);
}

} // namespace qphase::ode

#endif // QPHASE_INTEGRATOR_HPP
