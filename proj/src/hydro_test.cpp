#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"

#include "qphase/error.hpp"
#include "qphase/hydro.hpp"

using namespace qphase;
using namespace qphase::hydro;

namespace {

constexpr double pi = std::numbers::pi;
constexpr complex I{0.0, 1.0};

// Free evolution of (2 pi sigma^2)^(-1/4) exp(-(x - x0)^2 / 4 sigma^2 + i k0 x).
complex free_gaussian(double x, double t, double mass, double x0, double sigma, double k0)
{
    const complex alpha = 1.0 + I * t / (2.0 * mass * sigma * sigma);
    const double y = x - x0 - k0 * t / mass;
    return std::pow(2.0 * pi * sigma * sigma, -0.25) / std::sqrt(alpha) *
           std::exp(-y * y / (4.0 * sigma * sigma * alpha) + I * k0 * (x - 0.5 * k0 * t / mass));
}

GridWavefunction sample_free_gaussian(double x_min, double dx, std::size_t n, double t,
                                      double mass, double x0, double sigma, double k0)
{
    GridWavefunction psi{x_min, dx, std::vector<complex>(n), mass, t};
    for (std::size_t i = 0; i < n; ++i)
        psi.values[i] = free_gaussian(psi.x(i), t, mass, x0, sigma, k0);
    return psi;
}

GridWavefunction plane_wave(std::size_t n, double dx, double k, double t, double mass)
{
    GridWavefunction psi{0.0, dx, std::vector<complex>(n), mass, t};
    for (std::size_t i = 0; i < n; ++i)
        psi.values[i] = std::polar(1.0, k * psi.x(i) - 0.5 * k * k * t / mass);
    return psi;
}

std::vector<GridWavefunction> stationary_frames(const GridWavefunction& psi0, double energy,
                                                double dt, int count)
{
    std::vector<GridWavefunction> frames;
    for (int j = 0; j < count; ++j) {
        GridWavefunction f = psi0;
        f.t = dt * j;
        for (auto& v : f.values)
            v *= std::polar(1.0, -energy * f.t);
        frames.push_back(std::move(f));
    }
    return frames;
}

double stddev(const std::vector<double>& values)
{
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values)
        acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(values.size()));
}

double max_l2(const ResidualReport& r) { return *std::max_element(r.l2.begin(), r.l2.end()); }

struct FreeRun
{
    std::vector<GridWavefunction> frames;
    ResidualReport hj;
    ResidualReport continuity;
};

// Free packet on [-20, 20) saved at every step up to t = 0.8.
FreeRun free_run(std::size_t n, double dt)
{
    const double dx = 40.0 / static_cast<double>(n);
    const auto psi0 = gaussian_packet(-20.0, dx, n, 1.0, -2.0, 1.0, 1.5);
    FreeRun run;
    run.frames = split_step_solve(psi0, {}, 0.8, dt);
    run.hj = hj_residual(run.frames, {});
    run.continuity = continuity_residual(run.frames);
    return run;
}

std::size_t index_at(const ResidualReport& r, double t)
{
    for (std::size_t j = 0; j < r.times.size(); ++j)
        if (std::abs(r.times[j] - t) < 1e-9)
            return j;
    throw std::runtime_error("no frame at requested time");
}

} // namespace

TEST_CASE("free Gaussian packet follows the closed-form solution")
{
    const std::size_t n = 2048;
    const double dx = 40.0 / n;
    const auto psi0 = gaussian_packet(-20.0, dx, n, 1.0, -1.0, 1.0, 1.5);
    const auto frames = split_step_solve(psi0, {}, 1.0, 0.01);
    REQUIRE(frames.size() == 101);
    const auto& last = frames.back();
    CHECK(last.t == doctest::Approx(1.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst,
                         std::abs(last.values[i] - free_gaussian(last.x(i), 1.0, 1.0, -1.0, 1.0, 1.5)));
    CAPTURE(worst);
    CHECK(worst <= 1e-8);
}

TEST_CASE("harmonic ground state is stationary under split-step propagation")
{
    const std::size_t n = 256;
    const double dx = 20.0 / n;
    const auto psi0 = harmonic_ground_state(-10.0, dx, n, 1.0, 1.0, 0.0);
    PotentialSpec v;
    v.shape = PotentialShape::harmonic;
    const auto frames = split_step_solve(psi0, v, 0.1, 1e-4, 100);
    double worst = 0.0;
    for (const auto& f : frames)
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(std::norm(f.values[i]) - std::norm(psi0.values[i])));
    CAPTURE(worst);
    CHECK(worst <= 1e-10);
}

TEST_CASE("free propagation conserves the norm")
{
    const std::size_t n = 1024;
    const double dx = 0.05;
    auto psi = gaussian_packet(-25.6, dx, n, 1.0, 0.0, 2.0, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        psi.values[i] *= std::polar(1.0, 4.0 * psi.x(i));
    const auto frames = split_step_solve(psi, {}, 1.0, 0.01);
    for (const auto& f : frames)
        CHECK(std::abs(f.norm() - psi.norm()) < 1e-12);

    PotentialSpec v;
    v.shape = PotentialShape::harmonic;
    v.omega0 = 0.3;
    const auto trapped = split_step_solve(psi, v, 1.0, 0.01);
    for (std::size_t j = 1; j < trapped.size(); ++j)
        CHECK(std::abs(trapped[j].norm() - trapped[j - 1].norm()) < 1e-10);
}

TEST_CASE("split-step errors")
{
    const auto wide = gaussian_packet(-5.0, 10.0 / 64, 64, 1.0, 0.0, 3.0, 0.0);
    CHECK_THROWS_WITH_AS(split_step_solve(wide, {}, 1.0, 0.1), "hydro: edge leakage", Error);

    const auto fast = gaussian_packet(-10.0, 20.0 / 512, 512, 1.0, 0.0, 0.5, 20.0);
    CHECK_THROWS_WITH_AS(split_step_solve(fast, {}, 2.0, 0.01), "hydro: edge leakage", Error);

    auto odd = gaussian_packet(-10.0, 0.1, 200, 1.0, 0.0, 1.0, 0.0);
    CHECK_FALSE(validation_errors(odd).empty());
    CHECK_THROWS_AS(split_step_solve(odd, {}, 1.0, 0.1), ValidationError);

    const auto ok = gaussian_packet(-10.0, 20.0 / 256, 256, 1.0, 0.0, 1.0, 0.0);
    CHECK_THROWS_AS(split_step_solve(ok, {}, 1.0, 0.0), ValidationError);
    PotentialSpec table;
    table.shape = PotentialShape::tabulated;
    table.table.assign(10, 0.0);
    CHECK_THROWS_AS(split_step_solve(ok, table, 1.0, 0.1), ValidationError);
}

TEST_CASE("effective time step divides the run evenly")
{
    const auto psi0 = gaussian_packet(-10.0, 20.0 / 256, 256, 1.0, 0.0, 1.0, 0.0);
    const auto frames = split_step_solve(psi0, {}, 1.0, 0.3);
    REQUIRE(frames.size() == 5);
    CHECK(frames[1].t == doctest::Approx(0.25));
    CHECK(frames.back().t == doctest::Approx(1.0));
    CHECK(split_step_solve(psi0, {}, 0.0, 0.1).size() == 1);
}

TEST_CASE("polar decomposition")
{
    SUBCASE("plane wave")
    {
        const auto psi = plane_wave(256, 0.05, 3.0, 0.0, 1.0);
        const auto polar = polar_decompose(psi);
        CHECK(polar.valid_count() == 256);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            CHECK(polar.R[i] == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(polar.S[i] == doctest::Approx(3.0 * psi.x(i)).epsilon(1e-12));
        }
    }
    SUBCASE("real Gaussian")
    {
        const auto psi = gaussian_packet(-8.0, 1.0 / 16, 256, 1.0, 0.0, 1.0, 0.0);
        const auto polar = polar_decompose(psi);
        for (std::size_t i = 0; i < psi.size(); ++i)
            if (polar.valid[i])
                CHECK(polar.S[i] == 0.0);
    }
    SUBCASE("first excited harmonic state has two regions")
    {
        const std::size_t n = 256;
        GridWavefunction psi{-8.0, 1.0 / 16, std::vector<complex>(n), 1.0, 0.0};
        for (std::size_t i = 0; i < n; ++i)
            psi.values[i] = psi.x(i) * std::exp(-0.5 * psi.x(i) * psi.x(i));
        const auto polar = polar_decompose(psi);
        int regions = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (polar.valid[i] && (i == 0 || !polar.valid[i - 1]))
                ++regions;
        CHECK(regions == 2);
        for (std::size_t i = 0; i < n; ++i) {
            if (!polar.valid[i])
                continue;
            CHECK(polar.S[i] == doctest::Approx(psi.x(i) < 0.0 ? pi : 0.0));
        }
    }
}

TEST_CASE("polar fields rebuild the wavefunction")
{
    const auto psi = sample_free_gaussian(-10.0, 20.0 / 512, 512, 0.7, 1.0, 0.0, 1.0, 2.5);
    const auto polar = polar_decompose(psi);
    const auto rebuilt = from_polar(psi, polar.R, polar.S);
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (polar.valid[i])
            CHECK(std::abs(rebuilt.values[i] - psi.values[i]) <= 1e-12);
}

TEST_CASE("quantum potential")
{
    SUBCASE("plane wave")
    {
        const auto u = quantum_potential(polar_decompose(plane_wave(128, 0.1, 2.0, 0.0, 1.0)), 1.0);
        for (std::size_t i = 1; i + 1 < u.size(); ++i)
            CHECK(std::abs(u[i]) < 1e-10);
        CHECK(std::isnan(u.front()));
    }
    SUBCASE("harmonic ground state balances its potential")
    {
        const std::size_t n = 65536;
        const double omega0 = 1.0;
        const double dx = 10.0 / n;
        const auto psi = harmonic_ground_state(-5.0, dx, n, 1.0, omega0, 0.0);
        PotentialSpec v;
        v.shape = PotentialShape::harmonic;
        v.omega0 = omega0;
        const auto vs = v.sample(psi.x_min, dx, n);
        const auto u = quantum_potential(polar_decompose(psi), 1.0);
        std::vector<double> total;
        for (std::size_t i = n / 10; i < n - n / 10; ++i)
            total.push_back(u[i] + vs[i]);
        CHECK(stddev(total) <= 1e-6 * omega0);
        CHECK(total[total.size() / 2] == doctest::Approx(0.5 * omega0).epsilon(1e-6));
    }
    SUBCASE("spreading Gaussian")
    {
        const double t = 0.8;
        const double mass = 1.3;
        const double sigma = 1.0;
        const auto psi = sample_free_gaussian(-10.0, 20.0 / 131072, 131072, t, mass, 0.0, sigma, 1.0);
        const auto u = quantum_potential(polar_decompose(psi), mass);
        const double tau = t / (2.0 * mass * sigma * sigma);
        const double s2 = sigma * sigma * (1.0 + tau * tau);
        double worst = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (std::isnan(u[i]))
                continue;
            const double y = psi.x(i) - t / mass;
            const double exact = -(y * y / (4.0 * s2 * s2) - 1.0 / (2.0 * s2)) / (2.0 * mass);
            worst = std::max(worst, std::abs(u[i] - exact));
        }
        CAPTURE(worst);
        CHECK(worst <= 1e-6);
    }
    SUBCASE("scaling the wavefunction leaves it unchanged")
    {
        const auto psi = sample_free_gaussian(-10.0, 20.0 / 1024, 1024, 0.5, 1.0, 0.0, 1.0, 1.0);
        auto scaled = psi;
        for (auto& v : scaled.values)
            v *= complex(-2.5, 0.7);
        const auto a = quantum_potential(polar_decompose(psi), 1.0);
        const auto b = quantum_potential(polar_decompose(scaled), 1.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!std::isnan(a[i]) && !std::isnan(b[i]))
                CHECK(std::abs(a[i] - b[i]) <= 1e-12 * std::max(1.0, std::abs(a[i])));
    }
}

TEST_CASE("momentum field")
{
    SUBCASE("plane wave")
    {
        const auto m = momentum_field(polar_decompose(plane_wave(256, 0.01, 3.0, 0.0, 2.0)), 2.0);
        for (std::size_t i = 1; i + 1 < 256; ++i) {
            CHECK(std::abs(m.p[i] - 3.0) < 1e-8);
            CHECK(std::abs(m.v[i] - 1.5) < 1e-8);
        }
    }
    SUBCASE("boosted packets gain k0 everywhere")
    {
        const auto psi = sample_free_gaussian(-10.0, 20.0 / 1024, 1024, 0.6, 1.0, 0.0, 1.0, 0.0);
        const auto rest = momentum_field(polar_decompose(psi), 1.0);
        const auto real = momentum_field(polar_decompose(gaussian_packet(-10.0, 20.0 / 1024, 1024,
                                                                         1.0, 0.0, 1.0, 0.0)),
                                         1.0);
        auto boosted = psi;
        const double k0 = 2.2;
        for (std::size_t i = 0; i < psi.size(); ++i)
            boosted.values[i] *= std::polar(1.0, k0 * psi.x(i));
        const auto moving = momentum_field(polar_decompose(boosted), 1.0);
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (!std::isnan(real.p[i]))
                CHECK(real.p[i] == 0.0);
            if (!std::isnan(rest.p[i]) && !std::isnan(moving.p[i]))
                CHECK(std::abs(moving.p[i] - rest.p[i] - k0) <= 1e-8);
        }
    }
}

TEST_CASE("residuals of exact solutions")
{
    SUBCASE("plane wave")
    {
        std::vector<GridWavefunction> frames;
        for (int j = 0; j < 4; ++j)
            frames.push_back(plane_wave(256, 0.02, 2.0, 0.1 * j, 1.5));
        for (double l2 : hj_residual(frames, {}).l2)
            CHECK(l2 <= 1e-10);
        for (double l2 : continuity_residual(frames).l2)
            CHECK(l2 <= 1e-10);
    }
    SUBCASE("harmonic ground state")
    {
        const std::size_t n = 262144;
        const double dx = 16.0 / n;
        const auto psi0 = harmonic_ground_state(-8.0, dx, n, 1.0, 1.0, 0.0);
        PotentialSpec v;
        v.shape = PotentialShape::harmonic;
        const auto frames = stationary_frames(psi0, 0.5, 0.05, 3);
        const auto hj = hj_residual(frames, v);
        const auto cont = continuity_residual(frames);
        CAPTURE(hj.l2[0]);
        CHECK(hj.l2[0] <= 1e-6);
        CHECK(cont.l2[0] <= 1e-8);
    }
}

TEST_CASE("residuals converge at second order for a free packet")
{
    const auto coarse = free_run(1024, 0.02);
    const auto fine = free_run(2048, 0.01);
    for (double t : {0.04, 0.4, 0.76}) {
        const std::size_t jc = index_at(coarse.hj, t);
        const std::size_t jf = index_at(fine.hj, t);
        CAPTURE(t);
        CAPTURE(coarse.hj.l2[jc]);
        CAPTURE(fine.hj.l2[jf]);
        CAPTURE(coarse.continuity.l2[jc]);
        CAPTURE(fine.continuity.l2[jf]);
        CHECK(coarse.hj.l2[jc] / fine.hj.l2[jf] >= 3.5);
        CHECK(coarse.continuity.l2[jc] / fine.continuity.l2[jf] >= 3.5);
    }
    for (const auto& f : fine.frames)
        CHECK(std::abs(f.norm() - fine.frames.front().norm()) < 1e-10);
}

namespace {

struct Corrupted
{
    double hj_no_phase;
    double continuity_no_phase;
    double continuity_frozen_amplitude;
};

Corrupted corrupt(const FreeRun& run)
{
    std::vector<GridWavefunction> no_phase;
    std::vector<GridWavefunction> frozen_amplitude;
    const auto first = polar_decompose(run.frames.front());
    for (const auto& f : run.frames) {
        const auto polar = polar_decompose(f);
        no_phase.push_back(from_polar(f, polar.R, std::vector<double>(f.size(), 0.0)));
        std::vector<double> s = polar.S;
        for (auto& v : s)
            if (std::isnan(v))
                v = 0.0;
        frozen_amplitude.push_back(from_polar(f, first.R, s));
    }
    return {max_l2(hj_residual(no_phase, {})), max_l2(continuity_residual(no_phase)),
            max_l2(continuity_residual(frozen_amplitude))};
}

} // namespace

TEST_CASE("amplitude and phase are determined together")
{
    const auto coarse = free_run(1024, 0.02);
    const auto fine = free_run(2048, 0.01);
    const auto bad_coarse = corrupt(coarse);
    const auto bad_fine = corrupt(fine);
    CAPTURE(max_l2(fine.hj));
    CAPTURE(max_l2(fine.continuity));
    CAPTURE(bad_fine.hj_no_phase);
    CAPTURE(bad_fine.continuity_no_phase);
    CAPTURE(bad_fine.continuity_frozen_amplitude);
    CHECK(bad_fine.hj_no_phase > 10.0 * max_l2(fine.hj));
    CHECK(bad_fine.continuity_no_phase > 10.0 * max_l2(fine.continuity));
    CHECK(bad_fine.continuity_frozen_amplitude > 10.0 * max_l2(fine.continuity));
    // Refinement does not remove the mismatch.
    CHECK(bad_fine.hj_no_phase > 0.5 * bad_coarse.hj_no_phase);
    CHECK(bad_fine.continuity_no_phase > 0.5 * bad_coarse.continuity_no_phase);
    CHECK(bad_fine.continuity_frozen_amplitude > 0.5 * bad_coarse.continuity_frozen_amplitude);
}

TEST_CASE("residual preconditions")
{
    const auto psi = gaussian_packet(-10.0, 20.0 / 256, 256, 1.0, 0.0, 1.0, 0.0);
    std::vector<GridWavefunction> two{psi, psi};
    two[1].t = 0.1;
    CHECK_THROWS_WITH_AS(hj_residual(two, {}), "hydro: insufficient frames", Error);
    CHECK_THROWS_WITH_AS(continuity_residual(two), "hydro: insufficient frames", Error);

    std::vector<GridWavefunction> uneven{psi, psi, psi};
    uneven[1].t = 0.1;
    uneven[2].t = 0.3;
    CHECK_THROWS_AS(hj_residual(uneven, {}), Error);
    uneven[2].t = 0.2;
    uneven[2].dx *= 2.0;
    CHECK_THROWS_AS(continuity_residual(uneven), Error);
}
