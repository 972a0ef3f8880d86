#ifndef QPHASE_MODEL_HPP
#define QPHASE_MODEL_HPP

#include <complex>
#include <string>
#include <vector>

namespace qphase {

using complex = std::complex<double>;

/// Highest time-derivative order the envelope and phase registries provide.
inline constexpr int max_derivative_order = 6;

/// Relative field floor: dressed quantities are defined only where
/// Omega(t) >= rabi_floor_fraction * peak Omega.
inline constexpr double rabi_floor_fraction = 1e-9;

/*
 * Two-level system in natural units (hbar = 1). All frequencies are angular
 * frequencies of one arbitrary time unit. The complex damping is
 * gamma = gamma_re - i gamma_im and acts on |e> only.
 */
struct TwoLevelSystem
{
    double omega_g = 0.0;
    double omega_e = 1.0;
    double mu = 1.0;
    double gamma_re = 0.0;
    double gamma_im = 0.0;

    complex gamma() const { return {gamma_re, -gamma_im}; }
    double transition() const { return omega_e - omega_g; }

    bool operator==(const TwoLevelSystem&) const = default;
};

enum class EnvelopeShape { constant, gaussian, sech, flat_top_cos2 };

/*
 * Closed-form field envelope E0(t).
 *
 *   constant       E0 = peak
 *   gaussian       E0 = peak exp(-((t - center) / width)^2)
 *   sech           E0 = peak sech((t - center) / width)
 *   flat_top_cos2  plateau of length `plateau` centred on `center`, joined to
 *                  zero by cos^2 ramps of duration `width` (C1 at the joins)
 */
struct EnvelopeSpec
{
    EnvelopeShape shape = EnvelopeShape::constant;
    double peak = 0.0;
    double center = 0.0;
    double width = 1.0;
    double plateau = 0.0;

    /// n-th time derivative at t, 0 <= order <= max_derivative_order.
    double derivative(double t, int order) const;
    double operator()(double t) const { return derivative(t, 0); }

    /// Full duration over which E0 >= rabi_floor_fraction * peak; infinite
    /// for the constant envelope.
    double support_duration() const;

    EnvelopeSpec shifted(double dt) const;

    bool operator==(const EnvelopeSpec&) const = default;
};

enum class PhaseShape { constant, linear_chirp, quadratic_chirp, sinusoidal };

/*
 * Slowly varying field phase phi(t).
 *
 *   constant         phi0
 *   linear_chirp     phi0 + c1 t
 *   quadratic_chirp  phi0 + c1 t + c2 t^2
 *   sinusoidal       phi0 + depth sin(mod_freq t)
 */
struct PhaseSpec
{
    PhaseShape shape = PhaseShape::constant;
    double phi0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double depth = 0.0;
    double mod_freq = 0.0;

    double derivative(double t, int order) const;
    double operator()(double t) const { return derivative(t, 0); }

    PhaseSpec offset(double delta) const;

    bool operator==(const PhaseSpec&) const = default;
};

/// E(t) = E0(t) cos(carrier t + phi(t)).
struct DrivingField
{
    double carrier = 0.0;
    EnvelopeSpec envelope;
    PhaseSpec phase;

    bool operator==(const DrivingField&) const = default;
};

struct InitialPhases
{
    double phi_g = 0.0;
    double phi_e = 0.0;

    bool operator==(const InitialPhases&) const = default;
};

/// d^order/dt^order of Omega(t) = mu E0(t).
double rabi_frequency(const TwoLevelSystem& system, const DrivingField& field, double t,
                      int order = 0);

/// Peak Rabi frequency mu * peak.
double peak_rabi_frequency(const TwoLevelSystem& system, const DrivingField& field);

/// Field floor below which dressed quantities are undefined.
double rabi_floor(const TwoLevelSystem& system, const DrivingField& field);

/// True when Omega(t) lies below the dressed-state floor (or vanishes).
bool below_floor(const TwoLevelSystem& system, const DrivingField& field, double t);

/// Order 0: the full optical phase carrier t + phi(t); order >= 1 its derivatives.
double optical_phase(const DrivingField& field, double t, int order = 0);

/// Real detuning omega_e - omega_g - carrier (atom minus field).
double detuning(const TwoLevelSystem& system, const DrivingField& field);

/// Complex detuning Delta - i gamma / 2 = (Delta - gamma_im / 2) - i gamma_re / 2.
complex complex_detuning(const TwoLevelSystem& system, const DrivingField& field);

/// Real field E0(t) cos(Phi(t)).
double instantaneous_field(const DrivingField& field, double t);

// Invariant checks. Each returns "<field>: <constraint>" messages, empty when valid.
std::vector<std::string> validation_errors(const TwoLevelSystem& system);
std::vector<std::string> validation_errors(const EnvelopeSpec& envelope);
std::vector<std::string> validation_errors(const PhaseSpec& phase);
std::vector<std::string> validation_errors(const DrivingField& field);

std::string to_string(EnvelopeShape shape);
std::string to_string(PhaseShape shape);
EnvelopeShape envelope_shape_from_string(const std::string& name);
PhaseShape phase_shape_from_string(const std::string& name);

} // namespace qphase

#endif // QPHASE_MODEL_HPP
