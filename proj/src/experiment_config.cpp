#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qphase/experiment.hpp"

namespace qphase::cli {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts)
{
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty())
            out += "; ";
        out += p;
    }
    return out;
}

// Reads one JSON object, recording field-level problems instead of throwing.
class Reader
{
public:
    Reader(const json* object, std::string path, std::vector<std::string>& errors)
      : m_object(object), m_path(std::move(path)), m_errors(errors)
    {
        if (m_object && !m_object->is_object()) {
            fail("", "must be an object");
            m_object = nullptr;
        }
    }

    bool present() const { return m_object != nullptr; }
    bool has(const std::string& key) const { return m_object && m_object->contains(key); }

    void fail(const std::string& key, const std::string& constraint)
    {
        std::string where = m_path;
        if (!key.empty())
            where += (where.empty() ? "" : ".") + key;
        m_errors.push_back("validation: " + where + ": " + constraint);
    }

    void prefix_errors(const std::vector<std::string>& problems)
    {
        for (const auto& p : problems)
            m_errors.push_back("validation: " + (m_path.empty() ? p : m_path + "." + p));
    }

    double number(const std::string& key, std::optional<double> fallback)
    {
        const json* v = lookup(key, fallback.has_value());
        if (!v)
            return fallback.value_or(0.0);
        if (!v->is_number()) {
            fail(key, "must be a number");
            return fallback.value_or(0.0);
        }
        return v->get<double>();
    }

    long integer(const std::string& key, std::optional<long> fallback)
    {
        const json* v = lookup(key, fallback.has_value());
        if (!v)
            return fallback.value_or(0);
        if (!v->is_number_integer()) {
            fail(key, "must be an integer");
            return fallback.value_or(0);
        }
        return v->get<long>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        const json* v = lookup(key, true);
        if (!v)
            return fallback;
        if (!v->is_boolean()) {
            fail(key, "must be a boolean");
            return fallback;
        }
        return v->get<bool>();
    }

    std::string text(const std::string& key, std::optional<std::string> fallback)
    {
        const json* v = lookup(key, fallback.has_value());
        if (!v)
            return fallback.value_or("");
        if (!v->is_string()) {
            fail(key, "must be a string");
            return fallback.value_or("");
        }
        return v->get<std::string>();
    }

    complex amplitude(const std::string& key, complex fallback)
    {
        const json* v = lookup(key, true);
        if (!v)
            return fallback;
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
            fail(key, "must be [re, im]");
            return fallback;
        }
        return {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }

    std::vector<double> numbers(const std::string& key)
    {
        const json* v = lookup(key, true);
        std::vector<double> out;
        if (!v)
            return out;
        if (!v->is_array()) {
            fail(key, "must be an array of numbers");
            return out;
        }
        for (const auto& e : *v) {
            if (!e.is_number()) {
                fail(key, "must be an array of numbers");
                return {};
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    Reader child(const std::string& key, bool required)
    {
        const json* v = lookup(key, !required);
        return Reader(v, m_path.empty() ? key : m_path + "." + key, m_errors);
    }

    /// Reports keys that were never read.
    void finish()
    {
        if (!m_object)
            return;
        for (const auto& item : m_object->items())
            if (!m_seen.contains(item.key()))
                fail(item.key(), "unknown field");
    }

    template <class Parse>
    auto choice(const std::string& key, const std::string& fallback, Parse&& parse,
                const char* allowed) -> decltype(parse(fallback))
    {
        const std::string name = text(key, fallback);
        try {
            return parse(name);
        }
        catch (const ValidationError&) {
            fail(key, std::string("must be one of ") + allowed);
            return parse(fallback);
        }
    }

private:
    const json* lookup(const std::string& key, bool optional)
    {
        m_seen.insert(key);
        if (m_object && m_object->contains(key))
            return &m_object->at(key);
        if (!optional)
            fail(key, "required");
        return nullptr;
    }

    const json* m_object;
    std::string m_path;
    std::vector<std::string>& m_errors;
    std::set<std::string> m_seen;
};

ExperimentKind kind_from_string(const std::string& name)
{
    for (auto k : {ExperimentKind::dressed, ExperimentKind::adiabatic, ExperimentKind::propagate,
                   ExperimentKind::interfere, ExperimentKind::hydro})
        if (to_string(k) == name)
            return k;
    throw ValidationError("cli", "unknown kind '" + name + "'");
}

std::string to_string(PacketShape shape)
{
    return shape == PacketShape::gaussian ? "gaussian" : "harmonic_ground";
}

PacketShape packet_from_string(const std::string& name)
{
    if (name == "gaussian")
        return PacketShape::gaussian;
    if (name == "harmonic_ground")
        return PacketShape::harmonic_ground;
    throw ValidationError("cli", "unknown packet '" + name + "'");
}

TwoLevelSystem read_system(Reader r)
{
    TwoLevelSystem s;
    s.omega_g = r.number("omega_g", std::nullopt);
    s.omega_e = r.number("omega_e", std::nullopt);
    s.mu = r.number("mu", 1.0);
    s.gamma_re = r.number("gamma_re", 0.0);
    s.gamma_im = r.number("gamma_im", 0.0);
    r.finish();
    if (r.present())
        r.prefix_errors(validation_errors(s));
    return s;
}

DrivingField read_field(Reader r)
{
    DrivingField f;
    f.carrier = r.number("carrier", std::nullopt);
    Reader env = r.child("envelope", true);
    f.envelope.shape = env.choice("shape", "constant", envelope_shape_from_string,
                                  "constant, gaussian, sech, flat_top_cos2");
    f.envelope.peak = env.number("peak", std::nullopt);
    f.envelope.center = env.number("center", 0.0);
    f.envelope.width = env.number("width", 1.0);
    f.envelope.plateau = env.number("plateau", 0.0);
    env.finish();
    Reader ph = r.child("phase", false);
    f.phase.shape = ph.choice("shape", "constant", phase_shape_from_string,
                              "constant, linear_chirp, quadratic_chirp, sinusoidal");
    f.phase.phi0 = ph.number("phi0", 0.0);
    f.phase.c1 = ph.number("c1", 0.0);
    f.phase.c2 = ph.number("c2", 0.0);
    f.phase.depth = ph.number("depth", 0.0);
    f.phase.mod_freq = ph.number("mod_freq", 0.0);
    ph.finish();
    r.finish();
    if (r.present())
        r.prefix_errors(validation_errors(f));
    return f;
}

TimeGrid read_grid(Reader r)
{
    TimeGrid g;
    g.t0 = r.number("t0", 0.0);
    g.t1 = r.number("t1", std::nullopt);
    const long samples = r.integer("samples", 1001);
    r.finish();
    if (samples < 2)
        r.fail("samples", "must be >= 2");
    else
        g.samples = static_cast<std::size_t>(samples);
    if (r.present() && !(g.t1 > g.t0))
        r.fail("t1", "must exceed t0");
    return g;
}

IntegratorConfig read_integrator(Reader r)
{
    IntegratorConfig c;
    c.rel_tol = r.number("rel_tol", c.rel_tol);
    c.abs_tol = r.number("abs_tol", c.abs_tol);
    c.max_step = r.number("max_step", c.max_step);
    c.method = r.choice("method", "dopri54", integration_method_from_string, "dopri54, rk4");
    r.finish();
    r.prefix_errors(validation_errors(c));
    return c;
}

HydroBlock read_hydro(Reader r)
{
    HydroBlock h;
    h.x_min = r.number("x_min", std::nullopt);
    h.dx = r.number("dx", std::nullopt);
    const long n = r.integer("n_points", std::nullopt);
    h.n_points = n > 0 ? static_cast<std::size_t>(n) : 0;
    h.mass = r.number("mass", 1.0);
    Reader packet = r.child("psi0", true);
    h.packet = packet.choice("shape", "gaussian", packet_from_string, "gaussian, harmonic_ground");
    h.x0 = packet.number("x0", 0.0);
    h.sigma = packet.number("sigma", 1.0);
    h.k0 = packet.number("k0", 0.0);
    packet.finish();
    Reader pot = r.child("potential", false);
    h.potential.shape = pot.choice("shape", "free", hydro::potential_shape_from_string,
                                   "free, harmonic, tabulated");
    h.potential.mass = pot.number("mass", h.mass);
    h.potential.omega0 = pot.number("omega0", 1.0);
    h.potential.x_c = pot.number("x_c", 0.0);
    h.potential.table = pot.numbers("table");
    pot.finish();
    h.t_final = r.number("t_final", std::nullopt);
    h.dt = r.number("dt", std::nullopt);
    h.save_every = static_cast<int>(r.integer("save_every", 1));
    r.finish();

    if (h.n_points < 16 || (h.n_points & (h.n_points - 1)) != 0)
        r.fail("n_points", "must be a power of two >= 16");
    if (!(h.dx > 0.0))
        r.fail("dx", "must be > 0");
    if (!(h.mass > 0.0))
        r.fail("mass", "must be > 0");
    if (!(h.sigma > 0.0))
        r.fail("psi0.sigma", "must be > 0");
    if (!(h.t_final >= 0.0))
        r.fail("t_final", "must be >= 0");
    if (!(h.dt > 0.0))
        r.fail("dt", "must be > 0");
    if (h.save_every < 1)
        r.fail("save_every", "must be >= 1");
    if (h.potential.shape == hydro::PotentialShape::tabulated &&
        h.potential.table.size() != h.n_points)
        r.fail("potential.table", "must have n_points entries");
    if (h.packet == PacketShape::harmonic_ground &&
        h.potential.shape != hydro::PotentialShape::harmonic)
        r.fail("psi0.shape", "harmonic_ground needs a harmonic potential");
    if (!(h.potential.omega0 > 0.0) && h.potential.shape == hydro::PotentialShape::harmonic)
        r.fail("potential.omega0", "must be > 0");
    return h;
}

} // namespace

std::string to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::dressed:
        return "dressed";
    case ExperimentKind::adiabatic:
        return "adiabatic";
    case ExperimentKind::propagate:
        return "propagate";
    case ExperimentKind::interfere:
        return "interfere";
    case ExperimentKind::hydro:
        return "hydro";
    }
    return "dressed";
}

ConfigError::ConfigError(std::vector<std::string> problems)
  : ValidationError("cli", join(problems)), m_problems(std::move(problems))
{}

ExperimentConfig config_from_json(const json& j)
{
    std::vector<std::string> errors;
    Reader root(&j, "", errors);
    ExperimentConfig c;
    c.kind = root.choice("kind", "dressed", kind_from_string,
                         "dressed, adiabatic, propagate, interfere, hydro");
    if (!root.has("kind"))
        errors.emplace_back("validation: kind: required");

    const bool two_level = c.kind != ExperimentKind::hydro;
    Reader system = root.child("system", two_level);
    if (system.present())
        c.system = read_system(system);
    Reader field = root.child("field", two_level);
    if (field.present())
        c.field = read_field(field);
    Reader grid = root.child("grid", two_level);
    if (grid.present())
        c.grid = read_grid(grid);
    c.integrator = read_integrator(root.child("integrator", false));

    const std::vector<std::pair<std::string, ExperimentKind>> blocks{
        {"dressed", ExperimentKind::dressed},
        {"adiabatic", ExperimentKind::adiabatic},
        {"propagate", ExperimentKind::propagate},
        {"interfere", ExperimentKind::interfere},
        {"hydro", ExperimentKind::hydro}};
    for (const auto& [name, kind] : blocks)
        if (kind != c.kind && root.has(name))
            root.fail(name, "block does not match kind '" + to_string(c.kind) + "'");

    switch (c.kind) {
    case ExperimentKind::dressed: {
        Reader r = root.child("dressed", false);
        DressedBlock b;
        b.branch = r.choice("branch", "ground", branch_from_string, "ground, excited");
        b.phases.phi_g = r.number("phi_g", 0.0);
        b.phases.phi_e = r.number("phi_e", 0.0);
        b.n_max = static_cast<int>(r.integer("n_max", 2));
        b.compare = r.boolean("compare", false);
        r.finish();
        if (b.n_max < 0 || b.n_max > max_adiabatic_order)
            r.fail("n_max", "must lie in [0, 4]");
        if (c.grid.t0 != 0.0)
            errors.emplace_back("validation: grid.t0: must be 0 for dressed phases");
        c.dressed = b;
        break;
    }
    case ExperimentKind::adiabatic: {
        Reader r = root.child("adiabatic", false);
        AdiabaticBlock b;
        b.n_max = static_cast<int>(r.integer("n_max", 2));
        r.finish();
        if (b.n_max < 0 || b.n_max > max_adiabatic_order)
            r.fail("n_max", "must lie in [0, 4]");
        c.adiabatic = b;
        break;
    }
    case ExperimentKind::propagate: {
        Reader r = root.child("propagate", false);
        PropagateBlock b;
        b.engine = r.choice("engine", "rwa", engine_from_string, "rwa, full_field");
        b.initial.c_g = r.amplitude("c_g", {1.0, 0.0});
        b.initial.c_e = r.amplitude("c_e", {0.0, 0.0});
        r.finish();
        c.propagate = b;
        break;
    }
    case ExperimentKind::interfere: {
        Reader r = root.child("interfere", true);
        InterfereBlock b;
        b.delay = r.number("delay", std::nullopt);
        const long samples = r.integer("phase_samples", 64);
        b.second_amplitude = r.number("second_amplitude", 1.0);
        b.engine = r.choice("engine", "rwa", engine_from_string, "rwa, full_field");
        r.finish();
        if (samples < 3)
            r.fail("phase_samples", "must be >= 3");
        else
            b.phase_samples = static_cast<std::size_t>(samples);
        if (r.present() && r.has("delay")) {
            PulsePairConfig pair{c.field, b.delay, 0.0, b.second_amplitude, b.engine};
            std::vector<std::string> pair_errors;
            for (const auto& e : validation_errors(pair))
                if (e.rfind("base.", 0) != 0)
                    pair_errors.push_back(e);
            if (std::isinf(c.field.envelope.support_duration()))
                pair_errors.emplace_back("field.envelope.shape: needs a finite pulse");
            r.prefix_errors(pair_errors);
        }
        c.interfere = b;
        break;
    }
    case ExperimentKind::hydro:
        c.hydro = read_hydro(root.child("hydro", true));
        break;
    }
    root.finish();
    if (!errors.empty())
        throw ConfigError(errors);
    return c;
}

ExperimentConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    }
    catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t end = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            }
            else {
                ++col;
            }
        }
        throw ConfigError({"parse error (line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ")"});
    }
    return config_from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError({"cannot read config file '" + path.string() + "'"});
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

json to_json(const ExperimentConfig& c)
{
    json j;
    j["kind"] = to_string(c.kind);
    if (c.kind != ExperimentKind::hydro) {
        j["system"] = {{"omega_g", c.system.omega_g},
                       {"omega_e", c.system.omega_e},
                       {"mu", c.system.mu},
                       {"gamma_re", c.system.gamma_re},
                       {"gamma_im", c.system.gamma_im}};
        j["field"] = {
            {"carrier", c.field.carrier},
            {"envelope",
             {{"shape", to_string(c.field.envelope.shape)},
              {"peak", c.field.envelope.peak},
              {"center", c.field.envelope.center},
              {"width", c.field.envelope.width},
              {"plateau", c.field.envelope.plateau}}},
            {"phase",
             {{"shape", to_string(c.field.phase.shape)},
              {"phi0", c.field.phase.phi0},
              {"c1", c.field.phase.c1},
              {"c2", c.field.phase.c2},
              {"depth", c.field.phase.depth},
              {"mod_freq", c.field.phase.mod_freq}}}};
        j["grid"] = {{"t0", c.grid.t0}, {"t1", c.grid.t1}, {"samples", c.grid.samples}};
    }
    json integrator = {{"rel_tol", c.integrator.rel_tol},
                       {"abs_tol", c.integrator.abs_tol},
                       {"method", to_string(c.integrator.method)}};
    if (std::isfinite(c.integrator.max_step))
        integrator["max_step"] = c.integrator.max_step;
    j["integrator"] = integrator;

    if (c.dressed)
        j["dressed"] = {{"branch", to_string(c.dressed->branch)},
                        {"phi_g", c.dressed->phases.phi_g},
                        {"phi_e", c.dressed->phases.phi_e},
                        {"n_max", c.dressed->n_max},
                        {"compare", c.dressed->compare}};
    if (c.adiabatic)
        j["adiabatic"] = {{"n_max", c.adiabatic->n_max}};
    if (c.propagate)
        j["propagate"] = {
            {"engine", to_string(c.propagate->engine)},
            {"c_g", {c.propagate->initial.c_g.real(), c.propagate->initial.c_g.imag()}},
            {"c_e", {c.propagate->initial.c_e.real(), c.propagate->initial.c_e.imag()}}};
    if (c.interfere)
        j["interfere"] = {{"delay", c.interfere->delay},
                          {"phase_samples", c.interfere->phase_samples},
                          {"second_amplitude", c.interfere->second_amplitude},
                          {"engine", to_string(c.interfere->engine)}};
    if (c.hydro) {
        const auto& h = *c.hydro;
        json potential = {{"shape", hydro::to_string(h.potential.shape)},
                          {"mass", h.potential.mass},
                          {"omega0", h.potential.omega0},
                          {"x_c", h.potential.x_c}};
        if (!h.potential.table.empty())
            potential["table"] = h.potential.table;
        j["hydro"] = {{"x_min", h.x_min},
                      {"dx", h.dx},
                      {"n_points", h.n_points},
                      {"mass", h.mass},
                      {"psi0",
                       {{"shape", to_string(h.packet)},
                        {"x0", h.x0},
                        {"sigma", h.sigma},
                        {"k0", h.k0}}},
                      {"potential", potential},
                      {"t_final", h.t_final},
                      {"dt", h.dt},
                      {"save_every", h.save_every}};
    }
    return j;
}

} // namespace qphase::cli
