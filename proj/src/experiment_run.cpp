#include <chrono>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "qphase/experiment.hpp"

namespace qphase::cli {

using nlohmann::json;

namespace {

class CsvWriter
{
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : m_out(path, std::ios::binary)
    {
        if (!m_out)
            throw Error("cli", "cannot write '" + path.string() + "'");
        std::string line;
        for (const auto& h : header)
            line += (line.empty() ? "" : ",") + h;
        m_out << line << '\n';
    }

    void row(std::initializer_list<double> values)
    {
        std::string line;
        for (double v : values) {
            if (!line.empty())
                line += ',';
            line += format_number(v);
        }
        m_out << line << '\n';
    }

    void row(const std::vector<double>& values)
    {
        std::string line;
        for (double v : values) {
            if (!line.empty())
                line += ',';
            line += format_number(v);
        }
        m_out << line << '\n';
    }

private:
    std::ofstream m_out;
};

json finite_or_null(double v)
{
    if (std::isfinite(v))
        return v;
    return nullptr;
}

void write_dressed(const ExperimentConfig& c, const std::filesystem::path& dir, RunSummary& s)
{
    const auto grid = c.grid.points();
    const auto phases =
        dressed_phases(c.system, c.field, c.dressed->phases, c.dressed->branch, grid);
    const auto path = dir / "dressed.csv";
    CsvWriter csv(path, {"t", "phi_G_r_re", "phi_G_r_im", "phi_G_v_re", "phi_G_v_im",
                         "phi_E_r_re", "phi_E_r_im", "phi_E_v_re", "phi_E_v_im"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& p = phases[i];
        csv.row({grid[i], p.phi_G_r.real(), p.phi_G_r.imag(), p.phi_G_v.real(), p.phi_G_v.imag(),
                 p.phi_E_r.real(), p.phi_E_r.imag(), p.phi_E_v.real(), p.phi_E_v.imag()});
    }
    s.outputs.push_back(path);

    const auto report = adiabatic_report(c.system, c.field, grid, c.dressed->n_max);
    s.metrics["margin"] = finite_or_null(report.margin);
    const auto& last = phases.back();
    s.metrics["final_phi_G_r"] = {last.phi_G_r.real(), last.phi_G_r.imag()};
    s.metrics["final_phi_G_v"] = {last.phi_G_v.real(), last.phi_G_v.imag()};
    s.metrics["final_phi_E_r"] = {last.phi_E_r.real(), last.phi_E_r.imag()};
    s.metrics["final_phi_E_v"] = {last.phi_E_v.real(), last.phi_E_v.imag()};
}

void write_compare(const ExperimentConfig& c, const std::filesystem::path& dir, RunSummary& s)
{
    const auto grid = c.grid.points();
    const auto dressed =
        assemble_bare_state(c.system, c.field, c.dressed->phases, c.dressed->branch, grid);
    const auto oracle =
        rwa_propagate(c.system, c.field, dressed.states.front(), grid, c.integrator);
    const auto cmp = compare_trajectories(dressed, oracle);

    const auto path = dir / "dressed_compare.csv";
    CsvWriter csv(path, {"t", "amplitude_error", "population_error"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        csv.row({grid[i], cmp.amplitude_error[i], cmp.population_error[i]});
    s.outputs.push_back(path);

    s.metrics["max_amplitude_error"] = cmp.max_amplitude_error;
    s.metrics["max_population_error"] = cmp.max_population_error;
    s.metrics["final_phase_error_g"] = cmp.final_phase_error_g;
    s.metrics["final_phase_error_e"] = cmp.final_phase_error_e;
}

void write_adiabatic(const ExperimentConfig& c, const std::filesystem::path& dir, RunSummary& s)
{
    const auto grid = c.grid.points();
    const int n_max = c.adiabatic->n_max;
    const auto report = adiabatic_report(c.system, c.field, grid, n_max);

    std::vector<std::string> header{"t"};
    for (int n = 0; n <= n_max; ++n)
        for (int k = 0; k <= n + 1; ++k)
            header.push_back(fmt::format("ratio_n{}_k{}", n, k));
    header.emplace_back("usual");
    header.emplace_back("born_fock");

    const auto path = dir / "adiabatic.csv";
    CsvWriter csv(path, header);
    std::vector<double> row;
    for (double t : grid) {
        row.assign(1, t);
        for (int n = 0; n <= n_max; ++n)
            for (int k = 0; k <= n + 1; ++k)
                row.push_back(adiabatic_ratio(c.system, c.field, t, n, k));
        row.push_back(usual_adiabatic_value(c.system, c.field, t));
        row.push_back(born_fock_value(c.system, c.field, t));
        csv.row(row);
    }
    s.outputs.push_back(path);

    s.metrics["margin"] = finite_or_null(report.margin);
    json orders = json::array();
    for (const auto& o : report.orders) {
        json per_k = json::array();
        for (double v : o.per_k)
            per_k.push_back(finite_or_null(v));
        orders.push_back({{"n", o.n}, {"margin", finite_or_null(o.margin)}, {"per_k", per_k}});
    }
    s.metrics["orders"] = orders;
}

void write_propagate(const ExperimentConfig& c, const std::filesystem::path& dir, RunSummary& s)
{
    const auto grid = c.grid.points();
    const auto& b = *c.propagate;
    const auto traj = b.engine == Engine::rwa
                          ? rwa_propagate(c.system, c.field, b.initial, grid, c.integrator)
                          : full_field_propagate(c.system, c.field, b.initial, grid, c.integrator);

    const auto path = dir / "propagate.csv";
    CsvWriter csv(path, {"t", "c_g_re", "c_g_im", "c_e_re", "c_e_im", "P_g", "P_e", "norm"});
    double max_drift = 0.0;
    const double norm0 = traj.states.front().norm();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& st = traj.states[i];
        csv.row({traj.times[i], st.c_g.real(), st.c_g.imag(), st.c_e.real(), st.c_e.imag(),
                 st.population_g(), st.population_e(), st.norm()});
        max_drift = std::max(max_drift, std::abs(st.norm() - norm0));
    }
    s.outputs.push_back(path);

    s.metrics["final_population_g"] = traj.back().population_g();
    s.metrics["final_population_e"] = traj.back().population_e();
    s.metrics["final_norm"] = traj.back().norm();
    s.metrics["max_norm_change"] = max_drift;
}

void write_interfere(const ExperimentConfig& c, const std::filesystem::path& dir, RunSummary& s)
{
    const auto& b = *c.interfere;
    PulsePairConfig pair{c.field, b.delay, 0.0, b.second_amplitude, b.engine};
    const auto deltas = phase_grid(b.phase_samples);
    const auto record = phase_scan(c.system, pair, deltas, c.integrator);

    const auto path = dir / "interfere.csv";
    CsvWriter csv(path, {"delta_rad", "P_e"});
    for (std::size_t i = 0; i < record.deltas.size(); ++i)
        csv.row({record.deltas[i], record.populations[i]});
    s.outputs.push_back(path);

    s.metrics["visibility"] = record.visibility;
    s.metrics["delta_star"] = record.delta_star;
    s.metrics["pulse_area"] = pulse_area(c.system, c.field);
    s.metrics["single_pulse_population"] = record.single_pulse_population;
    s.metrics["weak_field"] = record.weak_field;
    s.metrics["fit"] = {{"offset", record.fit.offset},
                        {"amplitude", record.fit.amplitude},
                        {"phase", record.fit.phase},
                        {"max_residual", record.fit.max_residual}};
}

void write_hydro(const ExperimentConfig& c, const std::filesystem::path& dir, RunSummary& s)
{
    const auto& h = *c.hydro;
    const auto psi0 =
        h.packet == PacketShape::gaussian
            ? hydro::gaussian_packet(h.x_min, h.dx, h.n_points, h.mass, h.x0, h.sigma, h.k0)
            : hydro::harmonic_ground_state(h.x_min, h.dx, h.n_points, h.mass,
                                           h.potential.omega0, h.potential.x_c);
    const auto frames = hydro::split_step_solve(psi0, h.potential, h.t_final, h.dt, h.save_every);

    const auto path = dir / "hydro.csv";
    CsvWriter csv(path, {"frame", "t", "x", "R", "S", "U", "p"});
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const auto polar = hydro::polar_decompose(frames[f]);
        const auto U = hydro::quantum_potential(polar, h.mass);
        const auto mom = hydro::momentum_field(polar, h.mass);
        for (std::size_t i = 0; i < polar.size(); ++i)
            csv.row({static_cast<double>(f), frames[f].t, frames[f].x(i), polar.R[i], polar.S[i],
                     U[i], mom.p[i]});
    }
    s.outputs.push_back(path);

    s.metrics["frames"] = frames.size();
    s.metrics["final_norm"] = frames.back().norm();
    if (frames.size() >= 3) {
        const auto hj = hydro::hj_residual(frames, h.potential);
        const auto cont = hydro::continuity_residual(frames);
        json per_frame = json::array();
        for (std::size_t i = 0; i < hj.times.size(); ++i)
            per_frame.push_back({{"t", hj.times[i]},
                                 {"hj_l2", finite_or_null(hj.l2[i])},
                                 {"continuity_l2", finite_or_null(cont.l2[i])}});
        s.metrics["residuals"] = per_frame;
    }
}

void write_summary(RunSummary& s, const std::filesystem::path& dir)
{
    const auto path = dir / "summary.json";
    s.outputs.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cli", "cannot write '" + path.string() + "'");
    out << s.to_json().dump(2) << '\n';
}

template <class Body>
RunSummary execute(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                   Body&& body)
{
    const auto start = std::chrono::steady_clock::now();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw Error("cli", "cannot create output directory '" + out_dir.string() + "'");
    RunSummary s;
    s.config = to_json(config);
    body(s);
    s.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_summary(s, out_dir);
    return s;
}

} // namespace

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

json RunSummary::to_json() const
{
    json paths = json::array();
    for (const auto& p : outputs)
        paths.push_back(p.string());
    return {{"config", config},
            {"metrics", metrics},
            {"outputs", paths},
            {"wall_clock_seconds", wall_clock_seconds}};
}

RunSummary run(const ExperimentConfig& config, const std::filesystem::path& out_dir)
{
    return execute(config, out_dir, [&](RunSummary& s) {
        switch (config.kind) {
        case ExperimentKind::dressed:
            write_dressed(config, out_dir, s);
            if (config.dressed->compare)
                write_compare(config, out_dir, s);
            break;
        case ExperimentKind::adiabatic:
            write_adiabatic(config, out_dir, s);
            break;
        case ExperimentKind::propagate:
            write_propagate(config, out_dir, s);
            break;
        case ExperimentKind::interfere:
            write_interfere(config, out_dir, s);
            break;
        case ExperimentKind::hydro:
            write_hydro(config, out_dir, s);
            break;
        }
    });
}

RunSummary compare(const ExperimentConfig& config, const std::filesystem::path& out_dir)
{
    if (config.kind != ExperimentKind::dressed || !config.dressed || !config.dressed->compare)
        throw ValidationError("cli", "validation: dressed.compare: compare mode needs kind "
                                     "dressed with compare = true");
    return execute(config, out_dir, [&](RunSummary& s) {
        write_dressed(config, out_dir, s);
        write_compare(config, out_dir, s);
    });
}

} // namespace qphase::cli
