#include "qphase/interferometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qphase/dressed.hpp"
#include "qphase/error.hpp"

namespace qphase {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Window
{
    double start;
    double end;
};

Window pair_window(const PulsePairConfig& pair)
{
    const double duration = pair.base.envelope.support_duration();
    return {pair.base.envelope.center - 0.5 * duration,
            pair.base.envelope.center + pair.delay + 0.5 * duration};
}

void check_pair(const PulsePairConfig& pair)
{
    const auto errors = validation_errors(pair);
    if (!errors.empty())
        throw ValidationError("interferometry", errors.front());
}

double final_excited_population(const TwoLevelSystem& system, const PulsePairConfig& pair,
                                const IntegratorConfig& cfg)
{
    const Window w = pair_window(pair);
    const std::array<double, 2> grid{w.start, w.end};
    const EnvelopeSpec first = pair.base.envelope;
    const EnvelopeSpec second = pair.base.envelope.shifted(pair.delay);
    const PhaseSpec phase = pair.base.phase;
    const double delta = pair.relative_phase;
    const double scale = pair.second_amplitude;
    const TwoLevelState ground{};

    TwoLevelTrajectory traj;
    if (pair.engine == Engine::rwa) {
        const auto coupling = [&](double t) {
            const double phi = phase(t);
            return system.mu * (first(t) * std::polar(1.0, phi) +
                                scale * second(t) * std::polar(1.0, phi + delta));
        };
        traj = rwa_propagate(system, pair.base.carrier, coupling, ground, grid, cfg);
    }
    else {
        const auto coupling = [&](double t) {
            const double total = pair.base.carrier * t + phase(t);
            return system.mu *
                   (first(t) * std::cos(total) + scale * second(t) * std::cos(total + delta));
        };
        traj = full_field_propagate(system, coupling, ground, grid, cfg);
    }
    return traj.back().population_e();
}

// Solves the 3x3 system m x = r by Gaussian elimination with partial pivoting.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> r)
{
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(m[row][col]) > std::abs(m[pivot][col]))
                pivot = row;
        std::swap(m[col], m[pivot]);
        std::swap(r[col], r[pivot]);
        if (m[col][col] == 0.0)
            throw Error("interferometry", "fringe fit is singular (need >= 3 distinct phases)");
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 3; ++k)
                m[row][k] -= f * m[col][k];
            r[row] -= f * r[col];
        }
    }
    std::array<double, 3> x{};
    for (int row = 2; row >= 0; --row) {
        double acc = r[row];
        for (int k = row + 1; k < 3; ++k)
            acc -= m[row][k] * x[k];
        x[row] = acc / m[row][row];
    }
    return x;
}

} // namespace

std::string to_string(Engine engine) { return engine == Engine::rwa ? "rwa" : "full_field"; }

Engine engine_from_string(const std::string& name)
{
    if (name == "rwa")
        return Engine::rwa;
    if (name == "full_field")
        return Engine::full_field;
    throw ValidationError("interferometry", "unknown engine '" + name + "'");
}

double weak_pulse_area() { return 0.05 * std::numbers::pi; }

std::vector<std::string> validation_errors(const PulsePairConfig& pair)
{
    std::vector<std::string> errors;
    for (const auto& e : validation_errors(pair.base))
        errors.push_back("base." + e);
    const double duration = pair.base.envelope.support_duration();
    if (!std::isfinite(duration))
        errors.emplace_back("base.envelope.shape: pulse pair needs a finite pulse");
    if (!(pair.delay >= 0.0) || !std::isfinite(pair.delay))
        errors.emplace_back("delay: must be finite and >= 0");
    else if (pair.delay > 0.0 && pair.delay < duration)
        errors.emplace_back("delay: pulses overlap (delay must be 0 or >= pulse duration)");
    if (!std::isfinite(pair.relative_phase))
        errors.emplace_back("relative_phase: must be finite");
    if (!(pair.second_amplitude >= 0.0) || !std::isfinite(pair.second_amplitude))
        errors.emplace_back("second_amplitude: must be finite and >= 0");
    return errors;
}

double pulse_area(const TwoLevelSystem& system, const DrivingField& pulse)
{
    const double duration = pulse.envelope.support_duration();
    if (!std::isfinite(duration))
        throw Error("interferometry", "pulse area of an infinite pulse");
    const double start = pulse.envelope.center - 0.5 * duration;
    const auto grid = linspace(0.0, duration, 4001);
    std::vector<complex> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        values[i] = rabi_frequency(system, pulse, start + grid[i]);
    return cumulative_simpson(grid, values).back().real();
}

double single_pulse_population(const TwoLevelSystem& system, const DrivingField& pulse,
                               const IntegratorConfig& cfg, Engine engine)
{
    PulsePairConfig single;
    single.base = pulse;
    single.second_amplitude = 0.0;
    single.engine = engine;
    check_pair(single);
    return final_excited_population(system, single, cfg);
}

double pulse_pair_population(const TwoLevelSystem& system, const PulsePairConfig& pair,
                             const IntegratorConfig& cfg)
{
    check_pair(pair);
    PulsePairConfig reduced = pair;
    reduced.relative_phase = std::remainder(pair.relative_phase, two_pi);
    return final_excited_population(system, reduced, cfg);
}

FringeRecord phase_scan(const TwoLevelSystem& system, const PulsePairConfig& pair,
                        std::span<const double> deltas, const IntegratorConfig& cfg)
{
    if (deltas.empty())
        throw ValidationError("interferometry", "deltas: must be non-empty");
    check_pair(pair);

    FringeRecord record;
    record.deltas.assign(deltas.begin(), deltas.end());
    record.populations.reserve(deltas.size());
    for (double delta : deltas) {
        PulsePairConfig p = pair;
        p.relative_phase = delta;
        record.populations.push_back(pulse_pair_population(system, p, cfg));
    }
    record.visibility = visibility(record.populations);
    record.single_pulse_population = single_pulse_population(system, pair.base, cfg, pair.engine);
    record.weak_field = record.single_pulse_population <= 0.1;

    const auto best = std::max_element(record.populations.begin(), record.populations.end());
    record.delta_star = record.deltas[static_cast<std::size_t>(best - record.populations.begin())];
    if (deltas.size() >= 3) {
        record.fit = fit_fringe(record.deltas, record.populations);
        if (record.fit.amplitude > 0.0)
            record.delta_star = -record.fit.phase;
    }
    record.delta_star = std::fmod(record.delta_star, two_pi);
    if (record.delta_star < 0.0)
        record.delta_star += two_pi;
    return record;
}

double visibility(std::span<const double> populations)
{
    if (populations.empty())
        throw Error("interferometry", "empty fringe record");
    const auto [lo, hi] = std::minmax_element(populations.begin(), populations.end());
    if (*hi + *lo == 0.0)
        return 0.0;
    return (*hi - *lo) / (*hi + *lo);
}

double visibility(const FringeRecord& record) { return visibility(record.populations); }

FringeFit fit_fringe(std::span<const double> deltas, std::span<const double> populations)
{
    std::array<std::array<double, 3>, 3> m{};
    std::array<double, 3> r{};
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const std::array<double, 3> basis{1.0, std::cos(deltas[i]), std::sin(deltas[i])};
        for (int a = 0; a < 3; ++a) {
            r[a] += basis[a] * populations[i];
            for (int b = 0; b < 3; ++b)
                m[a][b] += basis[a] * basis[b];
        }
    }
    const auto x = solve3(m, r);
    // x1 cos d + x2 sin d = B cos(d + phase)
    FringeFit fit;
    fit.offset = x[0];
    fit.amplitude = std::hypot(x[1], x[2]);
    fit.phase = std::atan2(-x[2], x[1]);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const double model = fit.offset + fit.amplitude * std::cos(deltas[i] + fit.phase);
        fit.max_residual = std::max(fit.max_residual, std::abs(populations[i] - model));
    }
    return fit;
}

std::vector<double> phase_grid(std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = two_pi * static_cast<double>(i) / static_cast<double>(n);
    return out;
}

} // namespace qphase
