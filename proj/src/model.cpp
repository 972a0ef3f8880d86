#include "qphase/model.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qphase/error.hpp"

namespace qphase {

namespace {

void check_order(int order)
{
    if (order < 0 || order > max_derivative_order)
        throw Error("model", "derivative order exceeded");
}

// d^n/du^n exp(-u^2) = (-1)^n H_n(u) exp(-u^2), physicists' Hermite H_n.
double gaussian_derivative(double u, int order)
{
    double h_prev = 1.0;
    double h = 2.0 * u;
    if (order == 0)
        h = 1.0;
    for (int k = 1; k < order; ++k) {
        const double next = 2.0 * u * h - 2.0 * k * h_prev;
        h_prev = h;
        h = next;
    }
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return sign * h * std::exp(-u * u);
}

// d^n/du^n sech(u) = sech(u) P_n(tanh u) with
// P_{n+1}(T) = -T P_n(T) + (1 - T^2) P_n'(T), P_0 = 1.
double sech_derivative(double u, int order)
{
    std::array<double, max_derivative_order + 2> p{};
    p[0] = 1.0;
    for (int n = 0; n < order; ++n) {
        std::array<double, max_derivative_order + 2> q{};
        for (int j = 0; j <= n; ++j) {
            q[j + 1] -= p[j];
            if (j >= 1) {
                q[j - 1] += j * p[j];
                q[j + 1] -= j * p[j];
            }
        }
        p = q;
    }
    const double tanh_u = std::tanh(u);
    double poly = 0.0;
    for (int j = order; j >= 0; --j)
        poly = poly * tanh_u + p[j];
    return poly / std::cosh(u);
}

// d^n/dt^n of (1 + cos(k (t - join))) / 2.
double cos2_ramp_derivative(double t, double join, double k, int order)
{
    const double arg = k * (t - join) + order * std::numbers::pi / 2.0;
    if (order == 0)
        return 0.5 * (1.0 + std::cos(arg));
    return 0.5 * std::pow(k, order) * std::cos(arg);
}

} // namespace

double EnvelopeSpec::derivative(double t, int order) const
{
    check_order(order);
    switch (shape) {
    case EnvelopeShape::constant:
        return order == 0 ? peak : 0.0;
    case EnvelopeShape::gaussian:
        return peak * gaussian_derivative((t - center) / width, order) /
               std::pow(width, order);
    case EnvelopeShape::sech:
        return peak * sech_derivative((t - center) / width, order) / std::pow(width, order);
    case EnvelopeShape::flat_top_cos2: {
        const double rise_end = center - 0.5 * plateau;
        const double fall_start = center + 0.5 * plateau;
        const double k = std::numbers::pi / width;
        if (t < rise_end - width || t > fall_start + width)
            return 0.0;
        if (t < rise_end)
            return peak * cos2_ramp_derivative(t, rise_end, k, order);
        if (t <= fall_start)
            return order == 0 ? peak : 0.0;
        return peak * cos2_ramp_derivative(t, fall_start, k, order);
    }
    }
    return 0.0;
}

double EnvelopeSpec::support_duration() const
{
    switch (shape) {
    case EnvelopeShape::constant:
        return std::numeric_limits<double>::infinity();
    case EnvelopeShape::gaussian:
        return 2.0 * width * std::sqrt(-std::log(rabi_floor_fraction));
    case EnvelopeShape::sech:
        return 2.0 * width * std::acosh(1.0 / rabi_floor_fraction);
    case EnvelopeShape::flat_top_cos2:
        return plateau + 2.0 * width;
    }
    return 0.0;
}

EnvelopeSpec EnvelopeSpec::shifted(double dt) const
{
    EnvelopeSpec out = *this;
    out.center += dt;
    return out;
}

double PhaseSpec::derivative(double t, int order) const
{
    check_order(order);
    switch (shape) {
    case PhaseShape::constant:
        return order == 0 ? phi0 : 0.0;
    case PhaseShape::linear_chirp:
        if (order == 0)
            return phi0 + c1 * t;
        return order == 1 ? c1 : 0.0;
    case PhaseShape::quadratic_chirp:
        if (order == 0)
            return phi0 + (c1 + c2 * t) * t;
        if (order == 1)
            return c1 + 2.0 * c2 * t;
        return order == 2 ? 2.0 * c2 : 0.0;
    case PhaseShape::sinusoidal: {
        const double s =
            depth * std::pow(mod_freq, order) *
            std::sin(mod_freq * t + order * std::numbers::pi / 2.0);
        return order == 0 ? phi0 + s : s;
    }
    }
    return 0.0;
}

PhaseSpec PhaseSpec::offset(double delta) const
{
    PhaseSpec out = *this;
    out.phi0 += delta;
    return out;
}

double rabi_frequency(const TwoLevelSystem& system, const DrivingField& field, double t,
                      int order)
{
    return system.mu * field.envelope.derivative(t, order);
}

double peak_rabi_frequency(const TwoLevelSystem& system, const DrivingField& field)
{
    return system.mu * field.envelope.peak;
}

double rabi_floor(const TwoLevelSystem& system, const DrivingField& field)
{
    return rabi_floor_fraction * peak_rabi_frequency(system, field);
}

bool below_floor(const TwoLevelSystem& system, const DrivingField& field, double t)
{
    const double rabi = rabi_frequency(system, field, t);
    return !(rabi > 0.0) || rabi < rabi_floor(system, field);
}

double optical_phase(const DrivingField& field, double t, int order)
{
    const double phi = field.phase.derivative(t, order);
    if (order == 0)
        return field.carrier * t + phi;
    if (order == 1)
        return field.carrier + phi;
    return phi;
}

double detuning(const TwoLevelSystem& system, const DrivingField& field)
{
    return system.transition() - field.carrier;
}

complex complex_detuning(const TwoLevelSystem& system, const DrivingField& field)
{
    return complex(detuning(system, field)) - complex(0.0, 0.5) * system.gamma();
}

double instantaneous_field(const DrivingField& field, double t)
{
    return field.envelope(t) * std::cos(optical_phase(field, t));
}

std::vector<std::string> validation_errors(const TwoLevelSystem& system)
{
    std::vector<std::string> errors;
    const auto finite = [&](double v, const char* name) {
        if (!std::isfinite(v))
            errors.push_back(std::string(name) + ": must be finite");
    };
    finite(system.omega_g, "omega_g");
    finite(system.omega_e, "omega_e");
    finite(system.mu, "mu");
    finite(system.gamma_re, "gamma_re");
    finite(system.gamma_im, "gamma_im");
    if (!(system.omega_e > system.omega_g))
        errors.emplace_back("omega_e: must exceed omega_g");
    if (!(system.gamma_re >= 0.0))
        errors.emplace_back("gamma_re: must be >= 0");
    if (!(system.mu >= 0.0))
        errors.emplace_back("mu: must be >= 0");
    return errors;
}

std::vector<std::string> validation_errors(const EnvelopeSpec& envelope)
{
    std::vector<std::string> errors;
    if (!(envelope.peak >= 0.0) || !std::isfinite(envelope.peak))
        errors.emplace_back("peak: must be finite and >= 0");
    if (!(envelope.width > 0.0) || !std::isfinite(envelope.width))
        errors.emplace_back("width: must be finite and > 0");
    if (!std::isfinite(envelope.center))
        errors.emplace_back("center: must be finite");
    if (!(envelope.plateau >= 0.0) || !std::isfinite(envelope.plateau))
        errors.emplace_back("plateau: must be finite and >= 0");
    return errors;
}

std::vector<std::string> validation_errors(const PhaseSpec& phase)
{
    std::vector<std::string> errors;
    const auto finite = [&](double v, const char* name) {
        if (!std::isfinite(v))
            errors.push_back(std::string(name) + ": must be finite");
    };
    finite(phase.phi0, "phi0");
    finite(phase.c1, "c1");
    finite(phase.c2, "c2");
    finite(phase.depth, "depth");
    finite(phase.mod_freq, "mod_freq");
    return errors;
}

std::vector<std::string> validation_errors(const DrivingField& field)
{
    std::vector<std::string> errors;
    if (!(field.carrier >= 0.0) || !std::isfinite(field.carrier))
        errors.emplace_back("carrier: must be finite and >= 0");
    for (const auto& e : validation_errors(field.envelope))
        errors.push_back("envelope." + e);
    for (const auto& e : validation_errors(field.phase))
        errors.push_back("phase." + e);
    return errors;
}

std::string to_string(EnvelopeShape shape)
{
    switch (shape) {
    case EnvelopeShape::constant:
        return "constant";
    case EnvelopeShape::gaussian:
        return "gaussian";
    case EnvelopeShape::sech:
        return "sech";
    case EnvelopeShape::flat_top_cos2:
        return "flat_top_cos2";
    }
    return "constant";
}

std::string to_string(PhaseShape shape)
{
    switch (shape) {
    case PhaseShape::constant:
        return "constant";
    case PhaseShape::linear_chirp:
        return "linear_chirp";
    case PhaseShape::quadratic_chirp:
        return "quadratic_chirp";
    case PhaseShape::sinusoidal:
        return "sinusoidal";
    }
    return "constant";
}

EnvelopeShape envelope_shape_from_string(const std::string& name)
{
    for (auto s : {EnvelopeShape::constant, EnvelopeShape::gaussian, EnvelopeShape::sech,
                   EnvelopeShape::flat_top_cos2})
        if (to_string(s) == name)
            return s;
    throw ValidationError("model", "unknown envelope shape '" + name + "'");
}

PhaseShape phase_shape_from_string(const std::string& name)
{
    for (auto s : {PhaseShape::constant, PhaseShape::linear_chirp, PhaseShape::quadratic_chirp,
                   PhaseShape::sinusoidal})
        if (to_string(s) == name)
            return s;
    throw ValidationError("model", "unknown phase shape '" + name + "'");
}

} // namespace qphase
