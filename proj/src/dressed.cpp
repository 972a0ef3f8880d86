#include "qphase/dressed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "qphase/error.hpp"

namespace qphase {

namespace {

constexpr complex I{0.0, 1.0};

void require_above_floor(const TwoLevelSystem& system, const DrivingField& field, double t)
{
    if (below_floor(system, field, t))
        throw Error("dressed", "field below floor");
}

void check_phase_grid(std::span<const double> t_grid)
{
    if (t_grid.empty())
        throw Error("dressed", "non-monotone grid: empty");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw Error("dressed", "non-monotone grid");
    if (t_grid.front() != 0.0)
        throw Error("dressed", "non-monotone grid: must start at t = 0");
}

// Omega'/Omega.
double log_derivative(const TwoLevelSystem& system, const DrivingField& field, double t)
{
    return rabi_frequency(system, field, t, 1) / rabi_frequency(system, field, t, 0);
}

// Weak-field branch: the root whose projection on dw is non-negative.
complex weak_field_root(complex detuning_c, complex radicand)
{
    complex root = std::sqrt(radicand);
    if (std::real(root * std::conj(detuning_c)) < 0.0)
        root = -root;
    return root;
}

complex gen_rabi_radicand(const TwoLevelSystem& system, const DrivingField& field, double t)
{
    // The complex detuning is constant in time, so its derivative term drops.
    const complex dw = complex_detuning(system, field);
    const double rabi = rabi_frequency(system, field, t);
    return dw * dw + rabi * rabi;
}

EffectiveFrequencies shifts_with(const TwoLevelSystem& system, const DrivingField& field,
                                 double t, complex gen_rabi)
{
    const complex dw = complex_detuning(system, field);
    EffectiveFrequencies f;
    f.gen_rabi = gen_rabi;
    f.lambda_plus = 0.5 * (dw + gen_rabi);
    f.lambda_minus = 0.5 * (dw - gen_rabi);
    if (std::abs(gen_rabi) < gen_rabi_floor)
        throw Error("dressed", "degenerate generalized Rabi frequency");
    const double rabi = rabi_frequency(system, field, t);
    const complex d_gen_rabi = rabi * rabi_frequency(system, field, t, 1) / gen_rabi;
    const complex correction = 0.5 * I * d_gen_rabi / gen_rabi;
    f.lambda_tilde_plus = f.lambda_plus - correction;
    f.lambda_tilde_minus = f.lambda_minus - correction;
    f.omega_G = system.omega_g + f.lambda_minus;
    f.omega_E = system.omega_e - f.lambda_minus;
    if (below_floor(system, field, t)) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        f.omega_E_eff = {nan, nan};
    }
    else {
        f.omega_E_eff = f.omega_E - field.phase.derivative(t, 1) - 0.5 * system.gamma_im -
                        I * (0.5 * system.gamma_re - log_derivative(system, field, t));
    }
    return f;
}

DressedAmplitudes amplitudes_with(const TwoLevelSystem& system, const DrivingField& field,
                                  double t, Branch branch, complex gen_rabi)
{
    const complex dw = complex_detuning(system, field);
    const complex lambda_plus = 0.5 * (dw + gen_rabi);
    // cos(theta/2) = sqrt((1 + dw/gen_rabi) / 2), tan(theta/2) = Omega / (2 lambda_plus)
    const complex cos_half = std::sqrt(lambda_plus / gen_rabi);
    const complex sin_half = cos_half * rabi_frequency(system, field, t) / (2.0 * lambda_plus);
    if (branch == Branch::ground)
        return {cos_half, sin_half};
    return {cos_half, -sin_half};
}

// d^m/dt^m (Omega'/Omega) for m = 0..order from Omega' = g Omega.
std::array<double, max_derivative_order> log_derivative_series(const TwoLevelSystem& system,
                                                               const DrivingField& field,
                                                               double t, int order)
{
    std::array<double, max_derivative_order + 1> rabi{};
    for (int j = 0; j <= order + 1; ++j)
        rabi[j] = rabi_frequency(system, field, t, j);
    std::array<double, max_derivative_order> g{};
    for (int m = 0; m <= order; ++m) {
        double acc = rabi[m + 1];
        double binom = 1.0;
        for (int j = 0; j < m; ++j) {
            acc -= binom * g[j] * rabi[m - j];
            binom = binom * (m - j) / (j + 1);
        }
        g[m] = acc / rabi[0];
    }
    return g;
}

double safe_ratio(double numerator, double denominator)
{
    if (numerator == 0.0)
        return 0.0;
    if (denominator == 0.0)
        return std::numeric_limits<double>::infinity();
    return numerator / denominator;
}

} // namespace

std::string to_string(Branch branch) { return branch == Branch::ground ? "ground" : "excited"; }

Branch branch_from_string(const std::string& name)
{
    if (name == "ground")
        return Branch::ground;
    if (name == "excited")
        return Branch::excited;
    throw ValidationError("dressed", "unknown branch '" + name + "'");
}

complex generalized_rabi(const TwoLevelSystem& system, const DrivingField& field, double t)
{
    return weak_field_root(complex_detuning(system, field), gen_rabi_radicand(system, field, t));
}

std::vector<complex> generalized_rabi(const TwoLevelSystem& system, const DrivingField& field,
                                      std::span<const double> t_grid)
{
    std::vector<complex> out;
    out.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (i == 0) {
            out.push_back(generalized_rabi(system, field, t_grid[0]));
            continue;
        }
        const complex root = std::sqrt(gen_rabi_radicand(system, field, t_grid[i]));
        const complex& prev = out.back();
        out.push_back(std::abs(root - prev) <= std::abs(root + prev) ? root : -root);
    }
    return out;
}

EffectiveFrequencies level_shifts(const TwoLevelSystem& system, const DrivingField& field,
                                  double t)
{
    return shifts_with(system, field, t, generalized_rabi(system, field, t));
}

complex effective_excited_frequency(const TwoLevelSystem& system, const DrivingField& field,
                                    double t)
{
    require_above_floor(system, field, t);
    return level_shifts(system, field, t).omega_E_eff;
}

std::vector<DressedPhaseSet> dressed_phases(const TwoLevelSystem& system,
                                            const DrivingField& field,
                                            const InitialPhases& phases, Branch branch,
                                            std::span<const double> t_grid)
{
    check_phase_grid(t_grid);
    for (double t : t_grid)
        require_above_floor(system, field, t);

    const auto gen_rabi = generalized_rabi(system, field, t_grid);
    std::vector<complex> omega_G(t_grid.size());
    std::vector<complex> omega_E_eff(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const auto f = shifts_with(system, field, t_grid[i], gen_rabi[i]);
        omega_G[i] = f.omega_G;
        omega_E_eff[i] = f.omega_E_eff;
    }
    const auto int_G = cumulative_simpson(t_grid, omega_G);
    const auto int_E = cumulative_simpson(t_grid, omega_E_eff);

    std::vector<DressedPhaseSet> out(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        const double phi = field.phase(t);
        const double carrier_phase = field.carrier * t;
        auto& p = out[i];
        if (branch == Branch::ground) {
            const double c = phases.phi_g;
            p.phi_G_r = c + int_G[i];
            p.phi_G_v = (c + phi) + (int_G[i] + carrier_phase);
            p.phi_E_r = (c + phi) + int_E[i];
            p.phi_E_v = c + (int_E[i] - carrier_phase);
        }
        else {
            const double c = phases.phi_e;
            p.phi_E_r = c + int_E[i];
            p.phi_E_v = (c - phi) + (int_E[i] - carrier_phase);
            p.phi_G_r = (c - phi) + int_G[i];
            p.phi_G_v = c + (int_G[i] + carrier_phase);
        }
    }
    return out;
}

DressedAmplitudes dressed_amplitudes(const TwoLevelSystem& system, const DrivingField& field,
                                     double t, Branch branch)
{
    require_above_floor(system, field, t);
    return amplitudes_with(system, field, t, branch, generalized_rabi(system, field, t));
}

TwoLevelTrajectory assemble_bare_state(const TwoLevelSystem& system, const DrivingField& field,
                                       const InitialPhases& phases, Branch branch,
                                       std::span<const double> t_grid)
{
    const auto phase_sets = dressed_phases(system, field, phases, branch, t_grid);
    const auto gen_rabi = generalized_rabi(system, field, t_grid);

    TwoLevelTrajectory traj;
    traj.frame = Frame::bare;
    traj.times.assign(t_grid.begin(), t_grid.end());
    traj.states.reserve(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const auto amp = amplitudes_with(system, field, t_grid[i], branch, gen_rabi[i]);
        const auto& p = phase_sets[i];
        if (branch == Branch::ground)
            traj.states.push_back({amp.real_part * std::exp(-I * p.phi_G_r),
                                   amp.virtual_part * std::exp(-I * p.phi_G_v)});
        else
            traj.states.push_back({amp.virtual_part * std::exp(-I * p.phi_E_v),
                                   amp.real_part * std::exp(-I * p.phi_E_r)});
    }
    return traj;
}

double adiabatic_ratio(const TwoLevelSystem& system, const DrivingField& field, double t, int n,
                       int k)
{
    if (n < 0 || n > max_adiabatic_order || k < 0 || k > n + 1)
        throw Error("dressed", "derivative order exceeded");
    require_above_floor(system, field, t);
    const auto g = log_derivative_series(system, field, t, n);
    const double numerator = std::hypot(field.phase.derivative(t, n + 1), g[n]);
    const double denominator = std::pow(std::abs(complex_detuning(system, field)), n + 1 - k) *
                               std::pow(rabi_frequency(system, field, t), k);
    return safe_ratio(numerator, denominator);
}

AdiabaticityReport adiabatic_report(const TwoLevelSystem& system, const DrivingField& field,
                                    std::span<const double> t_grid, int n_max)
{
    if (n_max < 0 || n_max > max_adiabatic_order)
        throw Error("dressed", "derivative order exceeded");
    AdiabaticityReport report;
    for (int n = 0; n <= n_max; ++n) {
        AdiabaticOrder entry;
        entry.n = n;
        entry.per_k.assign(static_cast<std::size_t>(n + 2), 0.0);
        report.orders.push_back(entry);
    }
    for (double t : t_grid) {
        for (auto& entry : report.orders)
            for (int k = 0; k <= entry.n + 1; ++k)
                entry.per_k[k] = std::max(entry.per_k[k], adiabatic_ratio(system, field, t, entry.n, k));
    }
    for (auto& entry : report.orders) {
        entry.margin = *std::max_element(entry.per_k.begin(), entry.per_k.end());
        report.margin = std::max(report.margin, entry.margin);
    }
    return report;
}

double usual_adiabatic_value(const TwoLevelSystem& system, const DrivingField& field, double t)
{
    require_above_floor(system, field, t);
    return safe_ratio(std::abs(log_derivative(system, field, t)),
                      std::abs(complex_detuning(system, field)));
}

double born_fock_value(const TwoLevelSystem& system, const DrivingField& field, double t)
{
    require_above_floor(system, field, t);
    const double rabi = rabi_frequency(system, field, t);
    return std::abs(rabi_frequency(system, field, t, 1)) / (rabi * rabi);
}

std::vector<complex> cumulative_simpson(std::span<const double> x, std::span<const complex> f)
{
    const std::size_t n = x.size();
    std::vector<complex> out(n, complex{});
    if (n < 2)
        return out;
    if (n == 2) {
        out[1] = 0.5 * (x[1] - x[0]) * (f[0] + f[1]);
        return out;
    }
    // Quadratic through (x0, x1, x2) integrated over [x0, x1] and [x0, x2].
    const auto first_interval = [&](std::size_t i) {
        const double a = x[i + 1] - x[i];
        const double b = x[i + 2] - x[i + 1];
        return a * (2.0 * a + 3.0 * b) / (6.0 * (a + b)) * f[i] +
               a * (a + 3.0 * b) / (6.0 * b) * f[i + 1] - a * a * a / (6.0 * b * (a + b)) * f[i + 2];
    };
    const auto pair = [&](std::size_t i) {
        const double a = x[i + 1] - x[i];
        const double b = x[i + 2] - x[i + 1];
        return (a + b) / 6.0 *
               ((2.0 - b / a) * f[i] + (a + b) * (a + b) / (a * b) * f[i + 1] + (2.0 - a / b) * f[i + 2]);
    };
    // Quadratic through (x0, x1, x2) integrated over [x1, x2].
    const auto last_interval = [&](std::size_t i) {
        const double a = x[i + 1] - x[i];
        const double b = x[i + 2] - x[i + 1];
        return -b * b * b / (6.0 * a * (a + b)) * f[i] + b * (b + 3.0 * a) / (6.0 * a) * f[i + 1] +
               b * (2.0 * b + 3.0 * a) / (6.0 * (a + b)) * f[i + 2];
    };
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        out[i + 1] = out[i] + first_interval(i);
        out[i + 2] = out[i] + pair(i);
    }
    if (i + 1 < n)
        out[i + 1] = out[i] + last_interval(i - 1);
    return out;
}

} // namespace qphase
