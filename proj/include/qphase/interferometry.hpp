#ifndef QPHASE_INTERFEROMETRY_HPP
#define QPHASE_INTERFEROMETRY_HPP

#include <span>
#include <string>
#include <vector>

#include "qphase/model.hpp"
#include "qphase/propagator.hpp"

namespace qphase {

enum class Engine { rwa, full_field };

std::string to_string(Engine engine);
Engine engine_from_string(const std::string& name);

/// Pulse area at or below which a pulse counts as weak (0.05 pi).
double weak_pulse_area();

/*
 * Two phase-locked copies of `base`: the second is delayed by `delay`, scaled
 * by `second_amplitude`, and its constant phase is offset by `relative_phase`.
 * delay = 0 merges the pulses into one.
 */
struct PulsePairConfig
{
    DrivingField base;
    double delay = 0.0;
    double relative_phase = 0.0;
    double second_amplitude = 1.0;
    Engine engine = Engine::rwa;

    bool operator==(const PulsePairConfig&) const = default;
};

/// Least-squares fit P(delta) = offset + amplitude cos(delta + phase).
struct FringeFit
{
    double offset = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
    double max_residual = 0.0;
};

struct FringeRecord
{
    std::vector<double> deltas;
    std::vector<double> populations;
    double visibility = 0.0;
    double delta_star = 0.0; ///< relative phase of maximal population, in [0, 2 pi)
    FringeFit fit;
    double single_pulse_population = 0.0;
    bool weak_field = true; ///< single-pulse P_e <= 0.1
};

/// Integral of Omega over one pulse.
double pulse_area(const TwoLevelSystem& system, const DrivingField& pulse);

/// Final excited population after one pulse, starting in |g>.
double single_pulse_population(const TwoLevelSystem& system, const DrivingField& pulse,
                               const IntegratorConfig& cfg, Engine engine = Engine::rwa);

/// Final excited population after both pulses, starting in |g>.
double pulse_pair_population(const TwoLevelSystem& system, const PulsePairConfig& pair,
                             const IntegratorConfig& cfg);

FringeRecord phase_scan(const TwoLevelSystem& system, const PulsePairConfig& pair,
                        std::span<const double> deltas, const IntegratorConfig& cfg);

/// (max - min) / (max + min); 0 when both vanish.
double visibility(std::span<const double> populations);
double visibility(const FringeRecord& record);

FringeFit fit_fringe(std::span<const double> deltas, std::span<const double> populations);

/// n evenly spaced phases covering [0, 2 pi).
std::vector<double> phase_grid(std::size_t n);

std::vector<std::string> validation_errors(const PulsePairConfig& pair);

} // namespace qphase

#endif // QPHASE_INTERFEROMETRY_HPP
