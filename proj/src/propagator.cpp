#include "qphase/propagator.hpp"

#include <cmath>
#include <numbers>

#include "qphase/error.hpp"
#include "qphase/integrator.hpp"

namespace qphase {

namespace {

void check_config(const IntegratorConfig& cfg)
{
    const auto errors = validation_errors(cfg);
    if (!errors.empty())
        throw ValidationError("propagator", "integrator." + errors.front());
}

double wrap_to_pi(double x)
{
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(x, two_pi);
    if (r <= -std::numbers::pi)
        r += two_pi;
    return r;
}

std::vector<double> unwrapped_phase(const TwoLevelTrajectory& traj, bool excited)
{
    std::vector<double> out(traj.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const complex c = excited ? traj.states[i].c_e : traj.states[i].c_g;
        const double raw = std::arg(c);
        out[i] = i == 0 ? raw : prev + wrap_to_pi(raw - prev);
        prev = out[i];
    }
    return out;
}

} // namespace

std::vector<std::string> validation_errors(const IntegratorConfig& cfg)
{
    std::vector<std::string> errors;
    if (!(cfg.rel_tol > 0.0 && cfg.rel_tol <= 1e-2))
        errors.emplace_back("rel_tol: must lie in (0, 1e-2]");
    if (!(cfg.abs_tol > 0.0 && cfg.abs_tol <= 1e-2))
        errors.emplace_back("abs_tol: must lie in (0, 1e-2]");
    if (!(cfg.max_step > 0.0))
        errors.emplace_back("max_step: must be > 0");
    if (cfg.method == IntegrationMethod::rk4 && !std::isfinite(cfg.max_step))
        errors.emplace_back("max_step: must be finite for rk4");
    return errors;
}

std::string to_string(IntegrationMethod method)
{
    return method == IntegrationMethod::rk4 ? "rk4" : "dopri54";
}

IntegrationMethod integration_method_from_string(const std::string& name)
{
    if (name == "dopri54")
        return IntegrationMethod::dopri54;
    if (name == "rk4")
        return IntegrationMethod::rk4;
    throw ValidationError("propagator", "unknown integration method '" + name + "'");
}

TwoLevelTrajectory full_field_propagate(const TwoLevelSystem& system, const DrivingField& field,
                                        const TwoLevelState& initial,
                                        std::span<const double> t_grid,
                                        const IntegratorConfig& cfg)
{
    return full_field_propagate(
        system,
        [&](double t) { return system.mu * instantaneous_field(field, t); },
        initial, t_grid, cfg);
}

TwoLevelTrajectory full_field_propagate(const TwoLevelSystem& system,
                                        const FullCoupling& coupling,
                                        const TwoLevelState& initial,
                                        std::span<const double> t_grid,
                                        const IntegratorConfig& cfg)
{
    check_config(cfg);
    if (t_grid.empty())
        throw Error("propagator", "invalid grid: empty");
    const complex i(0.0, 1.0);
    const complex decay = 0.5 * system.gamma();
    const double wg = system.omega_g;
    const double we = system.omega_e;
    const double w0 = system.transition();
    // Interaction picture: b_g = c_g exp(i omega_g t), b_e = c_e exp(i omega_e t).
    const auto rhs = [&](double t, const ode::State& b) -> ode::State {
        const double v = coupling(t);
        const complex rot = std::polar(1.0, w0 * t);
        return {i * v * std::conj(rot) * b[1], i * v * rot * b[0] - decay * b[1]};
    };
    const double t0 = t_grid.front();
    const ode::State b0{initial.c_g * std::polar(1.0, wg * t0),
                        initial.c_e * std::polar(1.0, we * t0)};
    const auto states = ode::integrate(rhs, b0, t_grid, cfg);

    TwoLevelTrajectory traj;
    traj.frame = Frame::bare;
    traj.times.assign(t_grid.begin(), t_grid.end());
    traj.states.reserve(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        const double t = t_grid[k];
        traj.states.push_back(
            {states[k][0] * std::polar(1.0, -wg * t), states[k][1] * std::polar(1.0, -we * t)});
    }
    return traj;
}

TwoLevelTrajectory rwa_propagate(const TwoLevelSystem& system, const DrivingField& field,
                                 const TwoLevelState& initial, std::span<const double> t_grid,
                                 const IntegratorConfig& cfg)
{
    const auto coupling = [&](double t) {
        return rabi_frequency(system, field, t) * std::polar(1.0, field.phase(t));
    };
    return rwa_propagate(system, field.carrier, coupling, initial, t_grid, cfg);
}

TwoLevelTrajectory rwa_propagate(const TwoLevelSystem& system, double carrier,
                                 const RwaCoupling& coupling, const TwoLevelState& initial,
                                 std::span<const double> t_grid, const IntegratorConfig& cfg)
{
    check_config(cfg);
    if (t_grid.empty())
        throw Error("propagator", "invalid grid: empty");
    const complex i(0.0, 1.0);
    // Delta - i gamma / 2
    const complex detuning_c = complex(system.transition() - carrier) - 0.5 * i * system.gamma();
    const auto rhs = [&](double t, const ode::State& a) -> ode::State {
        const complex half = 0.5 * coupling(t);
        return {i * half * a[1], -i * (detuning_c * a[1] - std::conj(half) * a[0])};
    };

    const double rot_e = system.omega_g + carrier;
    const double t0 = t_grid.front();
    const ode::State a0{initial.c_g * std::polar(1.0, system.omega_g * t0),
                        initial.c_e * std::polar(1.0, rot_e * t0)};
    const auto states = ode::integrate(rhs, a0, t_grid, cfg);

    TwoLevelTrajectory traj;
    traj.frame = Frame::bare;
    traj.times.assign(t_grid.begin(), t_grid.end());
    traj.states.reserve(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        const double t = t_grid[k];
        traj.states.push_back({states[k][0] * std::polar(1.0, -system.omega_g * t),
                               states[k][1] * std::polar(1.0, -rot_e * t)});
    }
    return traj;
}

TrajectoryComparison compare_trajectories(const TwoLevelTrajectory& a,
                                          const TwoLevelTrajectory& b)
{
    if (a.size() != b.size() || a.frame != b.frame || a.times != b.times ||
        a.states.size() != a.size() || b.states.size() != b.size())
        throw Error("propagator", "grid mismatch");

    TrajectoryComparison out;
    out.amplitude_error.resize(a.size());
    out.population_error.resize(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& sa = a.states[k];
        const auto& sb = b.states[k];
        const double amp = std::sqrt(std::norm(sa.c_g - sb.c_g) + std::norm(sa.c_e - sb.c_e));
        const double pop = std::max(std::abs(sa.population_g() - sb.population_g()),
                                    std::abs(sa.population_e() - sb.population_e()));
        out.amplitude_error[k] = amp;
        out.population_error[k] = pop;
        out.max_amplitude_error = std::max(out.max_amplitude_error, amp);
        out.max_population_error = std::max(out.max_population_error, pop);
    }
    if (a.size() > 0) {
        out.final_phase_error_g =
            wrap_to_pi(unwrapped_phase(a, false).back() - unwrapped_phase(b, false).back());
        out.final_phase_error_e =
            wrap_to_pi(unwrapped_phase(a, true).back() - unwrapped_phase(b, true).back());
    }
    return out;
}

std::vector<double> linspace(double t0, double t1, std::size_t n)
{
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = t0;
        return out;
    }
    const double h = (t1 - t0) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = t0 + h * static_cast<double>(k);
    if (n > 1)
        out.back() = t1;
    return out;
}

} // namespace qphase
