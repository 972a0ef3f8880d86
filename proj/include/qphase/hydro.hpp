#ifndef QPHASE_HYDRO_HPP
#define QPHASE_HYDRO_HPP

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace qphase::hydro {

using complex = std::complex<double>;

/// Default validity floor for the polar decomposition, relative to max R.
inline constexpr double default_relative_floor = 1e-8;

/// 1D wavefunction sampled at x_min + i dx, i = 0 .. n-1 (periodic for the
/// spectral solver). hbar = 1.
struct GridWavefunction
{
    double x_min = 0.0;
    double dx = 1.0;
    std::vector<complex> values;
    double mass = 1.0;
    double t = 0.0;

    std::size_t size() const { return values.size(); }
    double x(std::size_t i) const { return x_min + dx * static_cast<double>(i); }
    double norm() const;
};

std::vector<std::string> validation_errors(const GridWavefunction& psi);

enum class PotentialShape { free, harmonic, tabulated };

/// V(x): zero, (1/2) mass omega0^2 (x - x_c)^2, or one value per grid point.
struct PotentialSpec
{
    PotentialShape shape = PotentialShape::free;
    double mass = 1.0;
    double omega0 = 1.0;
    double x_c = 0.0;
    std::vector<double> table;

    std::vector<double> sample(double x_min, double dx, std::size_t n) const;

    bool operator==(const PotentialSpec&) const = default;
};

std::string to_string(PotentialShape shape);
PotentialShape potential_shape_from_string(const std::string& name);

/// Normalized Gaussian packet (2 pi sigma^2)^(-1/4) exp(-(x-x0)^2 / 4 sigma^2 + i k0 x).
GridWavefunction gaussian_packet(double x_min, double dx, std::size_t n, double mass, double x0,
                                 double sigma, double k0);

/// Ground state of (1/2) mass omega0^2 (x - x_c)^2.
GridWavefunction harmonic_ground_state(double x_min, double dx, std::size_t n, double mass,
                                       double omega0, double x_c);

/*
 * Strang-split spectral propagation: half potential kick, exact kinetic step
 * in k-space, half potential kick. Returns the initial frame, every
 * save_every-th step, and the final frame. The effective step is
 * t_final / ceil(t_final / dt).
 */
std::vector<GridWavefunction> split_step_solve(const GridWavefunction& psi0,
                                               const PotentialSpec& potential, double t_final,
                                               double dt, int save_every = 1);

/// Polar form psi = R exp(i S). S is NaN outside the valid mask.
struct PolarFields
{
    double x_min = 0.0;
    double dx = 1.0;
    std::vector<double> R;
    std::vector<double> S;
    std::vector<char> valid;

    std::size_t size() const { return R.size(); }
    std::size_t valid_count() const;
};

/// R = |psi|, S = arg psi unwrapped left to right within each region R >= r_floor.
PolarFields polar_decompose(const GridWavefunction& psi, double r_floor);
PolarFields polar_decompose(const GridWavefunction& psi);

/// U = -(1/2m) R''/R on interior valid points, NaN elsewhere.
std::vector<double> quantum_potential(const PolarFields& fields, double mass);

struct MomentumField
{
    std::vector<double> p; ///< dS/dx
    std::vector<double> v; ///< p / mass
};

MomentumField momentum_field(const PolarFields& fields, double mass);

/// Residual fields for the interior frames 1 .. n-2 plus their L2 norms
/// sqrt(sum r^2 dx) over valid points.
struct ResidualReport
{
    std::vector<double> times;
    std::vector<std::vector<double>> fields;
    std::vector<double> l2;
};

/// dS/dt + (dS/dx)^2 / 2m + V + U.
ResidualReport hj_residual(std::span<const GridWavefunction> frames,
                           const PotentialSpec& potential);

/// d(R^2)/dt + d/dx(R^2 (dS/dx) / m).
ResidualReport continuity_residual(std::span<const GridWavefunction> frames);

/// Builds frames R exp(i S) from separate amplitude and phase samples.
GridWavefunction from_polar(const GridWavefunction& shape, std::span<const double> R,
                            std::span<const double> S);

} // namespace qphase::hydro

#endif // QPHASE_HYDRO_HPP
