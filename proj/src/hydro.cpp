#include "qphase/hydro.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "qphase/error.hpp"

namespace qphase::hydro {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_wavefunction(const GridWavefunction& psi)
{
    const auto errors = validation_errors(psi);
    if (!errors.empty())
        throw ValidationError("hydro", errors.front());
}

// max |psi|^2 over the outer n/64 (at least 2) points on each side, relative to max |psi|^2.
bool edges_clear(std::span<const complex> values)
{
    const std::size_t n = values.size();
    const std::size_t band = std::max<std::size_t>(2, n / 64);
    double peak = 0.0;
    for (const auto& v : values)
        peak = std::max(peak, std::norm(v));
    double edge = 0.0;
    for (std::size_t i = 0; i < band; ++i)
        edge = std::max({edge, std::norm(values[i]), std::norm(values[n - 1 - i])});
    return edge < 1e-10 * peak;
}

struct FftwPlan
{
    fftw_plan plan;
    ~FftwPlan() { fftw_destroy_plan(plan); }
};

void check_frames(std::span<const GridWavefunction> frames)
{
    if (frames.size() < 3)
        throw Error("hydro", "insufficient frames");
    const auto& ref = frames.front();
    const double step = frames[1].t - frames[0].t;
    if (!(step > 0.0))
        throw Error("hydro", "frame times must increase");
    for (std::size_t j = 0; j < frames.size(); ++j) {
        const auto& f = frames[j];
        if (f.size() != ref.size() || f.dx != ref.dx || f.x_min != ref.x_min || f.mass != ref.mass)
            throw Error("hydro", "frames must share one grid and mass");
        if (j > 0 && std::abs((f.t - frames[j - 1].t) - step) > 1e-9 * step)
            throw Error("hydro", "frames must be uniformly spaced in time");
    }
}

double l2_norm(const std::vector<double>& r, double dx)
{
    double acc = 0.0;
    for (double v : r)
        if (!std::isnan(v))
            acc += v * v;
    return std::sqrt(acc * dx);
}

// Phase increments S_other - S_center relative to the centre frame. The
// global phase at the max-R point of the centre frame is removed first, then
// the remaining local increments are principal-valued.
std::vector<double> phase_increment(const GridWavefunction& center, const GridWavefunction& other,
                                    std::size_t anchor)
{
    const complex anchor_rotation = other.values[anchor] * std::conj(center.values[anchor]);
    const double anchor_shift = std::arg(anchor_rotation);
    const complex unrotate = std::polar(1.0, -anchor_shift);
    std::vector<double> out(center.size());
    for (std::size_t i = 0; i < center.size(); ++i)
        out[i] = anchor_shift + std::arg(other.values[i] * std::conj(center.values[i]) * unrotate);
    return out;
}

std::size_t max_amplitude_index(const PolarFields& fields)
{
    return static_cast<std::size_t>(std::max_element(fields.R.begin(), fields.R.end()) -
                                    fields.R.begin());
}

} // namespace

double GridWavefunction::norm() const
{
    double acc = 0.0;
    for (const auto& v : values)
        acc += std::norm(v);
    return acc * dx;
}

std::vector<std::string> validation_errors(const GridWavefunction& psi)
{
    std::vector<std::string> errors;
    if (psi.size() < 16 || !is_power_of_two(psi.size()))
        errors.emplace_back("n_points: must be a power of two >= 16");
    if (!(psi.dx > 0.0) || !std::isfinite(psi.dx))
        errors.emplace_back("dx: must be finite and > 0");
    if (!(psi.mass > 0.0) || !std::isfinite(psi.mass))
        errors.emplace_back("mass: must be finite and > 0");
    if (!std::isfinite(psi.x_min))
        errors.emplace_back("x_min: must be finite");
    if (!std::isfinite(psi.norm()))
        errors.emplace_back("values: norm must be finite");
    return errors;
}

std::vector<double> PotentialSpec::sample(double x_min, double dx, std::size_t n) const
{
    std::vector<double> out(n, 0.0);
    switch (shape) {
    case PotentialShape::free:
        break;
    case PotentialShape::harmonic:
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x_min + dx * static_cast<double>(i) - x_c;
            out[i] = 0.5 * mass * omega0 * omega0 * d * d;
        }
        break;
    case PotentialShape::tabulated:
        if (table.size() != n)
            throw ValidationError("hydro", "potential.table: size must equal n_points");
        out = table;
        break;
    }
    return out;
}

std::string to_string(PotentialShape shape)
{
    switch (shape) {
    case PotentialShape::free:
        return "free";
    case PotentialShape::harmonic:
        return "harmonic";
    case PotentialShape::tabulated:
        return "tabulated";
    }
    return "free";
}

PotentialShape potential_shape_from_string(const std::string& name)
{
    for (auto s : {PotentialShape::free, PotentialShape::harmonic, PotentialShape::tabulated})
        if (to_string(s) == name)
            return s;
    throw ValidationError("hydro", "unknown potential shape '" + name + "'");
}

GridWavefunction gaussian_packet(double x_min, double dx, std::size_t n, double mass, double x0,
                                 double sigma, double k0)
{
    GridWavefunction psi{x_min, dx, std::vector<complex>(n), mass, 0.0};
    const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = psi.x(i) - x0;
        psi.values[i] = norm * std::exp(-d * d / (4.0 * sigma * sigma)) * std::polar(1.0, k0 * psi.x(i));
    }
    return psi;
}

GridWavefunction harmonic_ground_state(double x_min, double dx, std::size_t n, double mass,
                                       double omega0, double x_c)
{
    GridWavefunction psi{x_min, dx, std::vector<complex>(n), mass, 0.0};
    const double alpha = mass * omega0;
    const double norm = std::pow(alpha / std::numbers::pi, 0.25);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = psi.x(i) - x_c;
        psi.values[i] = norm * std::exp(-0.5 * alpha * d * d);
    }
    return psi;
}

std::vector<GridWavefunction> split_step_solve(const GridWavefunction& psi0,
                                               const PotentialSpec& potential, double t_final,
                                               double dt, int save_every)
{
    check_wavefunction(psi0);
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("hydro", "dt: must be finite and > 0");
    if (!(t_final >= 0.0) || !std::isfinite(t_final))
        throw ValidationError("hydro", "t_final: must be finite and >= 0");
    if (save_every < 1)
        throw ValidationError("hydro", "save_every: must be >= 1");
    if (!edges_clear(psi0.values))
        throw Error("hydro", "edge leakage");

    const std::size_t n = psi0.size();
    const auto steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
    const double h = steps > 0 ? t_final / static_cast<double>(steps) : 0.0;

    const auto v = potential.sample(psi0.x_min, psi0.dx, n);
    std::vector<complex> half_kick(n);
    for (std::size_t i = 0; i < n; ++i)
        half_kick[i] = std::polar(1.0, -0.5 * h * v[i]);
    std::vector<complex> drift(n);
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * psi0.dx);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = dk * (j < n / 2 ? static_cast<double>(j)
                                         : static_cast<double>(j) - static_cast<double>(n));
        // Includes the 1/n normalization of the inverse transform.
        drift[j] = std::polar(1.0 / static_cast<double>(n), -0.5 * h * k * k / psi0.mass);
    }

    std::vector<complex> work = psi0.values;
    auto* data = reinterpret_cast<fftw_complex*>(work.data());
    const int size = static_cast<int>(n);
    const FftwPlan forward{fftw_plan_dft_1d(size, data, data, FFTW_FORWARD, FFTW_ESTIMATE)};
    const FftwPlan backward{fftw_plan_dft_1d(size, data, data, FFTW_BACKWARD, FFTW_ESTIMATE)};

    std::vector<GridWavefunction> frames;
    frames.push_back(psi0);
    for (long s = 1; s <= steps; ++s) {
        for (std::size_t i = 0; i < n; ++i)
            work[i] *= half_kick[i];
        fftw_execute(forward.plan);
        for (std::size_t j = 0; j < n; ++j)
            work[j] *= drift[j];
        fftw_execute(backward.plan);
        for (std::size_t i = 0; i < n; ++i)
            work[i] *= half_kick[i];
        if (!edges_clear(work))
            throw Error("hydro", "edge leakage");
        if (s % save_every == 0 || s == steps) {
            GridWavefunction frame = psi0;
            frame.values = work;
            frame.t = psi0.t + h * static_cast<double>(s);
            frames.push_back(std::move(frame));
        }
    }
    return frames;
}

std::size_t PolarFields::valid_count() const
{
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

PolarFields polar_decompose(const GridWavefunction& psi, double r_floor)
{
    const std::size_t n = psi.size();
    PolarFields out{psi.x_min, psi.dx, std::vector<double>(n), std::vector<double>(n, nan),
                    std::vector<char>(n, 0)};
    for (std::size_t i = 0; i < n; ++i) {
        out.R[i] = std::abs(psi.values[i]);
        out.valid[i] = out.R[i] >= r_floor && out.R[i] > 0.0;
        if (!out.valid[i])
            continue;
        if (i > 0 && out.valid[i - 1])
            out.S[i] = out.S[i - 1] + std::arg(psi.values[i] * std::conj(psi.values[i - 1]));
        else
            out.S[i] = std::arg(psi.values[i]);
    }
    return out;
}

PolarFields polar_decompose(const GridWavefunction& psi)
{
    double peak = 0.0;
    for (const auto& v : psi.values)
        peak = std::max(peak, std::abs(v));
    return polar_decompose(psi, default_relative_floor * peak);
}

std::vector<double> quantum_potential(const PolarFields& fields, double mass)
{
    const std::size_t n = fields.size();
    std::vector<double> u(n, nan);
    const double scale = -0.5 / (mass * fields.dx * fields.dx);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!fields.valid[i - 1] || !fields.valid[i] || !fields.valid[i + 1])
            continue;
        u[i] = scale * (fields.R[i + 1] - 2.0 * fields.R[i] + fields.R[i - 1]) / fields.R[i];
    }
    return u;
}

MomentumField momentum_field(const PolarFields& fields, double mass)
{
    const std::size_t n = fields.size();
    MomentumField out{std::vector<double>(n, nan), std::vector<double>(n, nan)};
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!fields.valid[i - 1] || !fields.valid[i] || !fields.valid[i + 1])
            continue;
        out.p[i] = (fields.S[i + 1] - fields.S[i - 1]) / (2.0 * fields.dx);
        out.v[i] = out.p[i] / mass;
    }
    return out;
}

ResidualReport hj_residual(std::span<const GridWavefunction> frames,
                           const PotentialSpec& potential)
{
    check_frames(frames);
    const auto& ref = frames.front();
    const std::size_t n = ref.size();
    const double frame_dt = frames[1].t - frames[0].t;
    const auto v = potential.sample(ref.x_min, ref.dx, n);

    ResidualReport report;
    for (std::size_t j = 1; j + 1 < frames.size(); ++j) {
        const auto prev = polar_decompose(frames[j - 1]);
        const auto cur = polar_decompose(frames[j]);
        const auto next = polar_decompose(frames[j + 1]);
        const auto u = quantum_potential(cur, ref.mass);
        const auto p = momentum_field(cur, ref.mass).p;
        const std::size_t anchor = max_amplitude_index(cur);
        const auto ds_next = phase_increment(frames[j], frames[j + 1], anchor);
        const auto ds_prev = phase_increment(frames[j], frames[j - 1], anchor);

        std::vector<double> r(n, nan);
        for (std::size_t i = 0; i < n; ++i) {
            if (std::isnan(u[i]) || std::isnan(p[i]) || !prev.valid[i] || !next.valid[i])
                continue;
            const double dsdt = (ds_next[i] - ds_prev[i]) / (2.0 * frame_dt);
            r[i] = dsdt + p[i] * p[i] / (2.0 * ref.mass) + v[i] + u[i];
        }
        report.times.push_back(frames[j].t);
        report.l2.push_back(l2_norm(r, ref.dx));
        report.fields.push_back(std::move(r));
    }
    return report;
}

ResidualReport continuity_residual(std::span<const GridWavefunction> frames)
{
    check_frames(frames);
    const auto& ref = frames.front();
    const std::size_t n = ref.size();
    const double frame_dt = frames[1].t - frames[0].t;

    ResidualReport report;
    for (std::size_t j = 1; j + 1 < frames.size(); ++j) {
        const auto prev = polar_decompose(frames[j - 1]);
        const auto cur = polar_decompose(frames[j]);
        const auto next = polar_decompose(frames[j + 1]);
        const auto vel = momentum_field(cur, ref.mass).v;

        std::vector<double> flux(n, nan);
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isnan(vel[i]))
                flux[i] = cur.R[i] * cur.R[i] * vel[i];

        std::vector<double> r(n, nan);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (std::isnan(flux[i - 1]) || std::isnan(flux[i + 1]) || !prev.valid[i] ||
                !next.valid[i])
                continue;
            const double drho =
                (next.R[i] * next.R[i] - prev.R[i] * prev.R[i]) / (2.0 * frame_dt);
            r[i] = drho + (flux[i + 1] - flux[i - 1]) / (2.0 * ref.dx);
        }
        report.times.push_back(frames[j].t);
        report.l2.push_back(l2_norm(r, ref.dx));
        report.fields.push_back(std::move(r));
    }
    return report;
}

GridWavefunction from_polar(const GridWavefunction& shape, std::span<const double> R,
                            std::span<const double> S)
{
    GridWavefunction out = shape;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = std::polar(R[i], S[i]);
    return out;
}

} // namespace qphase::hydro
