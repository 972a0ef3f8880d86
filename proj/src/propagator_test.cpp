#include <cmath>
#include <numbers>

#include "doctest.h"

#include "qphase/error.hpp"
#include "qphase/propagator.hpp"

using namespace qphase;

namespace {

DrivingField constant_field(double peak, double carrier)
{
    DrivingField f;
    f.carrier = carrier;
    f.envelope.shape = EnvelopeShape::constant;
    f.envelope.peak = peak;
    return f;
}

double max_norm_drift(const TwoLevelTrajectory& traj)
{
    double drift = 0.0;
    for (const auto& s : traj.states)
        drift = std::max(drift, std::abs(s.norm() - traj.states.front().norm()));
    return drift;
}

} // namespace

TEST_CASE("free evolution without a field")
{
    const TwoLevelSystem sys{0.3, 1.7, 1.0, 0.0, 0.0};
    const auto f = constant_field(0.0, 1.5);
    const auto grid = linspace(0.0, 20.0, 201);
    const TwoLevelState ground;
    const auto full = full_field_propagate(sys, f, ground, grid, {});
    const auto rwa = rwa_propagate(sys, f, ground, grid, {});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const complex expected = std::polar(1.0, -sys.omega_g * grid[i]);
        CHECK(std::abs(full.states[i].c_g - expected) < 1e-9);
        CHECK(std::abs(full.states[i].c_e) == 0.0);
        CHECK(std::abs(rwa.states[i].c_g - expected) < 1e-9);
    }
    CHECK(compare_trajectories(full, rwa).max_amplitude_error < 1e-9);
}

TEST_CASE("resonant Rabi oscillation")
{
    const TwoLevelSystem sys{0.0, 5.0, 1.0, 0.0, 0.0};
    const double omega = 0.8;
    const auto f = constant_field(omega, 5.0);
    const auto grid = linspace(0.0, 30.0, 301);
    const auto traj = rwa_propagate(sys, f, {}, grid, {});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = std::sin(0.5 * omega * grid[i]);
        CHECK(std::abs(traj.states[i].population_e() - s * s) < 1e-9);
    }
}

TEST_CASE("detuned oscillation at the generalized Rabi frequency")
{
    const TwoLevelSystem sys{0.0, 13.0, 1.0, 0.0, 0.0};
    const auto f = constant_field(4.0, 10.0);
    const auto grid = linspace(0.0, 5.0, 501);
    const auto traj = rwa_propagate(sys, f, {}, grid, {});
    double peak = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = std::sin(2.5 * grid[i]);
        CHECK(std::abs(traj.states[i].population_e() - 16.0 / 25.0 * s * s) < 1e-9);
        peak = std::max(peak, traj.states[i].population_e());
    }
    CHECK(peak == doctest::Approx(16.0 / 25.0).epsilon(1e-4));
}

TEST_CASE("norm is conserved without damping")
{
    const TwoLevelSystem sys{0.0, 20.0, 1.0, 0.0, 0.0};
    DrivingField f;
    f.carrier = 19.5;
    f.envelope = {EnvelopeShape::gaussian, 0.6, 10.0, 4.0, 0.0};
    f.phase = {PhaseShape::sinusoidal, 0.2, 0.0, 0.0, 0.4, 0.3};
    const auto grid = linspace(0.0, 20.0, 401);
    CHECK(max_norm_drift(full_field_propagate(sys, f, {}, grid, {})) < 1e-9);
    CHECK(max_norm_drift(rwa_propagate(sys, f, {}, grid, {})) < 1e-9);
}

TEST_CASE("decay makes the norm non-increasing")
{
    const TwoLevelSystem sys{0.0, 4.0, 1.0, 0.3, 0.0};
    const auto f = constant_field(1.2, 4.0);
    const auto grid = linspace(0.0, 20.0, 801);
    for (const auto& traj : {rwa_propagate(sys, f, {}, grid, {}),
                             full_field_propagate(sys, f, {}, grid, {})}) {
        for (std::size_t i = 1; i < traj.size(); ++i)
            CHECK(traj.states[i].norm() <= traj.states[i - 1].norm() + 1e-9);
        CHECK(traj.back().norm() < 0.5);
    }
}

TEST_CASE("tightening the tolerance reduces the self-convergence error")
{
    const TwoLevelSystem sys{0.0, 3.0, 1.0, 0.05, 0.02};
    DrivingField f;
    f.carrier = 2.7;
    f.envelope = {EnvelopeShape::sech, 1.1, 6.0, 1.5, 0.0};
    f.phase = {PhaseShape::quadratic_chirp, 0.0, 0.1, -0.01, 0.0, 0.0};
    const auto grid = linspace(0.0, 12.0, 121);
    IntegratorConfig reference;
    reference.rel_tol = 1e-12;
    reference.abs_tol = 1e-14;
    const auto exact = rwa_propagate(sys, f, {}, grid, reference);
    for (double tol : {1e-5, 1e-7}) {
        IntegratorConfig loose{tol, tol * 1e-2};
        IntegratorConfig tight{tol * 1e-2, tol * 1e-4};
        const double e_loose =
            compare_trajectories(rwa_propagate(sys, f, {}, grid, loose), exact).max_amplitude_error;
        const double e_tight =
            compare_trajectories(rwa_propagate(sys, f, {}, grid, tight), exact).max_amplitude_error;
        CAPTURE(tol);
        CAPTURE(e_loose);
        CAPTURE(e_tight);
        CHECK(e_loose / e_tight >= 10.0);
    }
}

TEST_CASE("RK4 and Dormand-Prince agree")
{
    const TwoLevelSystem sys{0.0, 6.0, 1.0, 0.1, 0.0};
    DrivingField f;
    f.carrier = 5.5;
    f.envelope = {EnvelopeShape::gaussian, 1.0, 5.0, 2.0, 0.0};
    const auto grid = linspace(0.0, 10.0, 101);
    IntegratorConfig rk4;
    rk4.method = IntegrationMethod::rk4;
    rk4.max_step = 1e-3;
    const auto a = rwa_propagate(sys, f, {}, grid, {});
    const auto b = rwa_propagate(sys, f, {}, grid, rk4);
    CHECK(compare_trajectories(a, b).max_amplitude_error < 1e-9);
}

TEST_CASE("rotating-wave and full-field dynamics agree for a fast carrier")
{
    const TwoLevelSystem sys{0.0, 100.0, 1.0, 0.0, 0.0};
    const auto f = constant_field(1.0, 100.0);
    const auto grid = linspace(0.0, 2.0 * std::numbers::pi, 201);
    const auto full = full_field_propagate(sys, f, {}, grid, {});
    const auto rwa = rwa_propagate(sys, f, {}, grid, {});
    CHECK(compare_trajectories(full, rwa).max_population_error < 0.02);
}

TEST_CASE("trajectory comparison")
{
    const TwoLevelSystem sys{0.0, 2.0, 1.0, 0.0, 0.0};
    const auto grid = linspace(0.0, 3.0, 31);
    const auto a = rwa_propagate(sys, constant_field(1.0, 2.0), {}, grid, {});

    const auto same = compare_trajectories(a, a);
    CHECK(same.max_amplitude_error == 0.0);
    CHECK(same.max_population_error == 0.0);
    CHECK(same.final_phase_error_g == 0.0);
    CHECK(same.final_phase_error_e == 0.0);

    auto b = a;
    const complex rot = std::polar(1.0, std::numbers::pi / 7.0);
    for (auto& s : b.states) {
        s.c_g *= rot;
        s.c_e *= rot;
    }
    const auto shifted = compare_trajectories(a, b);
    CHECK(shifted.max_amplitude_error == doctest::Approx(std::abs(rot - 1.0)).epsilon(1e-12));
    CHECK(shifted.max_population_error < 1e-15);
    CHECK(shifted.final_phase_error_g == doctest::Approx(-std::numbers::pi / 7.0));

    auto c = a;
    c.times.pop_back();
    c.states.pop_back();
    CHECK_THROWS_WITH_AS(compare_trajectories(a, c), "propagator: grid mismatch", Error);
}

TEST_CASE("invalid grids and configurations are rejected")
{
    const TwoLevelSystem sys;
    const auto f = constant_field(1.0, 1.0);
    const std::vector<double> backwards{1.0, 0.5};
    CHECK_THROWS_WITH_AS(rwa_propagate(sys, f, {}, backwards, {}),
                         "propagator: invalid grid: times must be finite and strictly increasing",
                         Error);
    CHECK_THROWS_AS(rwa_propagate(sys, f, {}, std::vector<double>{}, {}), Error);

    IntegratorConfig bad;
    bad.rel_tol = 0.5;
    CHECK_FALSE(validation_errors(bad).empty());
    CHECK_THROWS_AS(rwa_propagate(sys, f, {}, linspace(0.0, 1.0, 3), bad), ValidationError);

    IntegratorConfig rk4;
    rk4.method = IntegrationMethod::rk4;
    CHECK_FALSE(validation_errors(rk4).empty());
}

TEST_CASE("a non-finite coupling stalls the step-size controller")
{
    const TwoLevelSystem sys;
    const FullCoupling blowup = [](double t) { return t < 0.5 ? 1.0 : std::nan(""); };
    const auto grid = linspace(0.0, 1.0, 3);
    CHECK_THROWS_WITH_AS(full_field_propagate(sys, blowup, {}, grid, {}),
                         "propagator: step-size underflow", Error);
}
