#ifndef QPHASE_PROPAGATOR_HPP
#define QPHASE_PROPAGATOR_HPP

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qphase/model.hpp"

namespace qphase {

struct TwoLevelState
{
    complex c_g{1.0, 0.0};
    complex c_e{0.0, 0.0};

    double norm() const { return std::norm(c_g) + std::norm(c_e); }
    double population_g() const { return std::norm(c_g); }
    double population_e() const { return std::norm(c_e); }

    bool operator==(const TwoLevelState&) const = default;
};

enum class Frame { bare, rotating };

struct TwoLevelTrajectory
{
    std::vector<double> times;
    std::vector<TwoLevelState> states;
    Frame frame = Frame::bare;

    std::size_t size() const { return times.size(); }
    const TwoLevelState& back() const { return states.back(); }
};

enum class IntegrationMethod {
    dopri54, ///< adaptive Dormand-Prince 5(4) with dense output
    rk4      ///< classical fixed-step RK4, step = max_step
};

struct IntegratorConfig
{
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    IntegrationMethod method = IntegrationMethod::dopri54;

    bool operator==(const IntegratorConfig&) const = default;
};

std::vector<std::string> validation_errors(const IntegratorConfig& cfg);
std::string to_string(IntegrationMethod method);
IntegrationMethod integration_method_from_string(const std::string& name);

/// Complex RWA coupling Omega(t) exp(i phi(t)).
using RwaCoupling = std::function<complex(double)>;

/// Real coupling Omega(t) cos(Phi(t)) = mu E(t) of the full-field Hamiltonian.
using FullCoupling = std::function<double(double)>;

/*
 * Bare-basis Schroedinger equation without the rotating-wave approximation:
 *
 *   i dc_g/dt = omega_g c_g - Omega(t) cos Phi(t) c_e
 *   i dc_e/dt = omega_e c_e - Omega(t) cos Phi(t) c_g - i (gamma / 2) c_e
 *
 * The initial state is given at t_grid.front(); the trajectory is sampled on
 * t_grid in the bare frame.
 */
TwoLevelTrajectory full_field_propagate(const TwoLevelSystem& system, const DrivingField& field,
                                        const TwoLevelState& initial,
                                        std::span<const double> t_grid,
                                        const IntegratorConfig& cfg);

TwoLevelTrajectory full_field_propagate(const TwoLevelSystem& system,
                                        const FullCoupling& coupling,
                                        const TwoLevelState& initial,
                                        std::span<const double> t_grid,
                                        const IntegratorConfig& cfg);

/*
 * Rotating-wave reduction. With a_g = c_g exp(i omega_g t) and
 * a_e = c_e exp(i (omega_g + carrier) t):
 *
 *   i da_g/dt = -(Omega / 2) exp(i phi) a_e
 *   i da_e/dt = Delta a_e - (Omega / 2) exp(-i phi) a_g - i (gamma / 2) a_e
 *
 * Initial state and returned trajectory are in the bare frame.
 */
TwoLevelTrajectory rwa_propagate(const TwoLevelSystem& system, const DrivingField& field,
                                 const TwoLevelState& initial, std::span<const double> t_grid,
                                 const IntegratorConfig& cfg);

TwoLevelTrajectory rwa_propagate(const TwoLevelSystem& system, double carrier,
                                 const RwaCoupling& coupling, const TwoLevelState& initial,
                                 std::span<const double> t_grid, const IntegratorConfig& cfg);

struct TrajectoryComparison
{
    double max_amplitude_error = 0.0;  ///< max_t ||c_a(t) - c_b(t)||_2
    double max_population_error = 0.0; ///< max_t max(|dP_g|, |dP_e|)
    double final_phase_error_g = 0.0;  ///< in (-pi, pi], time-unwrapped
    double final_phase_error_e = 0.0;
    std::vector<double> amplitude_error;  ///< per sample
    std::vector<double> population_error; ///< per sample
};

TrajectoryComparison compare_trajectories(const TwoLevelTrajectory& a,
                                          const TwoLevelTrajectory& b);

/// n evenly spaced samples on [t0, t1] (both ends included).
std::vector<double> linspace(double t0, double t1, std::size_t n);

} // namespace qphase

#endif // QPHASE_PROPAGATOR_HPP
