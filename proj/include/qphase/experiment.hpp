#ifndef QPHASE_EXPERIMENT_HPP
#define QPHASE_EXPERIMENT_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qphase/dressed.hpp"
#include "qphase/error.hpp"
#include "qphase/hydro.hpp"
#include "qphase/interferometry.hpp"
#include "qphase/model.hpp"
#include "qphase/propagator.hpp"

namespace qphase::cli {

enum class ExperimentKind { dressed, adiabatic, propagate, interfere, hydro };

std::string to_string(ExperimentKind kind);

struct TimeGrid
{
    double t0 = 0.0;
    double t1 = 1.0;
    std::size_t samples = 1001;

    std::vector<double> points() const { return linspace(t0, t1, samples); }
    bool operator==(const TimeGrid&) const = default;
};

struct DressedBlock
{
    Branch branch = Branch::ground;
    InitialPhases phases;
    int n_max = 2;
    bool compare = false;

    bool operator==(const DressedBlock&) const = default;
};

struct AdiabaticBlock
{
    int n_max = 2;

    bool operator==(const AdiabaticBlock&) const = default;
};

struct PropagateBlock
{
    Engine engine = Engine::rwa;
    TwoLevelState initial;

    bool operator==(const PropagateBlock&) const = default;
};

struct InterfereBlock
{
    double delay = 0.0;
    std::size_t phase_samples = 64;
    double second_amplitude = 1.0;
    Engine engine = Engine::rwa;

    bool operator==(const InterfereBlock&) const = default;
};

enum class PacketShape { gaussian, harmonic_ground };

struct HydroBlock
{
    double x_min = -10.0;
    double dx = 0.02;
    std::size_t n_points = 1024;
    double mass = 1.0;
    PacketShape packet = PacketShape::gaussian;
    double x0 = 0.0;
    double sigma = 1.0;
    double k0 = 0.0;
    hydro::PotentialSpec potential;
    double t_final = 1.0;
    double dt = 0.01;
    int save_every = 1;

    bool operator==(const HydroBlock&) const = default;
};

/// A validated experiment description; only the block matching `kind` is set.
struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::dressed;
    TwoLevelSystem system;
    DrivingField field;
    TimeGrid grid;
    IntegratorConfig integrator;
    std::optional<DressedBlock> dressed;
    std::optional<AdiabaticBlock> adiabatic;
    std::optional<PropagateBlock> propagate;
    std::optional<InterfereBlock> interfere;
    std::optional<HydroBlock> hydro;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Configuration problem; carries every field-level message found.
class ConfigError : public ValidationError
{
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return m_problems; }

private:
    std::vector<std::string> m_problems;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

struct RunSummary
{
    nlohmann::json config;
    nlohmann::json metrics = nlohmann::json::object();
    std::vector<std::filesystem::path> outputs;
    double wall_clock_seconds = 0.0;

    nlohmann::json to_json() const;
};

/// Runs the experiment, writes `<kind>.csv` (plus comparison output) and summary.json.
RunSummary run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Dressed-vs-oracle comparison; requires kind = dressed.
RunSummary compare(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Formats a double with 17 significant digits, as written to every CSV.
std::string format_number(double value);

} // namespace qphase::cli

#endif // QPHASE_EXPERIMENT_HPP
