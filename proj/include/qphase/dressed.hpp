#ifndef QPHASE_DRESSED_HPP
#define QPHASE_DRESSED_HPP

#include <span>
#include <string>
#include <vector>

#include "qphase/model.hpp"
#include "qphase/propagator.hpp"

namespace qphase {

/// Threshold on |generalized Rabi| below which its log-derivative is undefined.
inline constexpr double gen_rabi_floor = 1e-12;

/// Selects the ground (left) or excited (right) initial-condition column.
enum class Branch { ground, excited };

std::string to_string(Branch branch);
Branch branch_from_string(const std::string& name);

/*
 * Auxiliary complex frequencies of the dressed two-level system at one time.
 *
 *   gen_rabi            sqrt(dw^2 + Omega^2 - 2i d/dt dw), dw the complex detuning
 *   lambda_plus/minus   (dw +- gen_rabi) / 2
 *   lambda_tilde_*      lambda_* - (i/2) gen_rabi^-1 d/dt gen_rabi
 *   omega_G, omega_E    Stark-shifted levels omega_g + lambda_minus, omega_e - lambda_minus
 *   omega_E_eff         omega_E - phi' - gamma_im/2 - i (gamma_re/2 - Omega'/Omega)
 */
struct EffectiveFrequencies
{
    complex gen_rabi;
    complex lambda_plus;
    complex lambda_minus;
    complex lambda_tilde_plus;
    complex lambda_tilde_minus;
    complex omega_G;
    complex omega_E;
    complex omega_E_eff;
};

/// Complex material phases of the four dressed components. The imaginary
/// part carries the accumulated amplitude growth or decay.
struct DressedPhaseSet
{
    complex phi_G_r;
    complex phi_G_v;
    complex phi_E_r;
    complex phi_E_v;
};

/// Mixing amplitudes of the real and virtual components of one dressed state.
struct DressedAmplitudes
{
    complex real_part;
    complex virtual_part;
};

/// Per-order entry of the generalized adiabatic condition.
struct AdiabaticOrder
{
    int n = 0;
    std::vector<double> per_k; ///< max over the grid, k = 0 .. n+1
    double margin = 0.0;       ///< max over k
};

struct AdiabaticityReport
{
    std::vector<AdiabaticOrder> orders;
    double margin = 0.0; ///< max over all orders
};

/// Generalized Rabi frequency with the weak-field branch (-> dw as Omega -> 0).
complex generalized_rabi(const TwoLevelSystem& system, const DrivingField& field, double t);

/// Same along a time grid; the sign is continued from sample to sample.
std::vector<complex> generalized_rabi(const TwoLevelSystem& system, const DrivingField& field,
                                      std::span<const double> t_grid);

EffectiveFrequencies level_shifts(const TwoLevelSystem& system, const DrivingField& field,
                                  double t);

complex effective_excited_frequency(const TwoLevelSystem& system, const DrivingField& field,
                                    double t);

/// Cumulative material phases on t_grid (strictly increasing, starting at 0).
std::vector<DressedPhaseSet> dressed_phases(const TwoLevelSystem& system,
                                            const DrivingField& field,
                                            const InitialPhases& phases, Branch branch,
                                            std::span<const double> t_grid);

/*
 * Instantaneous-eigenvector amplitudes of the RWA Hamiltonian
 * [[0, -Omega/2 e^{i phi}], [-Omega/2 e^{-i phi}, dw]]. Ground branch returns
 * (cos theta/2, sin theta/2) with tan theta = Omega / dw (complex angle);
 * the excited branch returns (cos theta/2, -sin theta/2).
 */
DressedAmplitudes dressed_amplitudes(const TwoLevelSystem& system, const DrivingField& field,
                                     double t, Branch branch);

/// Bare amplitudes assembled from the real and virtual components of the
/// dressed state selected by `branch`.
TwoLevelTrajectory assemble_bare_state(const TwoLevelSystem& system, const DrivingField& field,
                                       const InitialPhases& phases, Branch branch,
                                       std::span<const double> t_grid);

/// |d^n/dt^n (phi' - i Omega'/Omega)| / (|dw|^(n+1-k) |Omega|^k).
double adiabatic_ratio(const TwoLevelSystem& system, const DrivingField& field, double t, int n,
                       int k);

/// Highest n accepted by adiabatic_report (needs derivatives up to n + 1).
inline constexpr int max_adiabatic_order = 4;

AdiabaticityReport adiabatic_report(const TwoLevelSystem& system, const DrivingField& field,
                                    std::span<const double> t_grid, int n_max);

/// |Omega'/Omega| / |dw|, the n = 0, k = 0 condition for a constant phase.
double usual_adiabatic_value(const TwoLevelSystem& system, const DrivingField& field, double t);

/// |Omega' / Omega^2| (Born-Fock).
double born_fock_value(const TwoLevelSystem& system, const DrivingField& field, double t);

/// Cumulative integral of samples on a (possibly non-uniform) grid:
/// composite Simpson at even indices, single-interval quadratic rule at odd ones.
std::vector<complex> cumulative_simpson(std::span<const double> x, std::span<const complex> f);

} // namespace qphase

#endif // QPHASE_DRESSED_HPP
