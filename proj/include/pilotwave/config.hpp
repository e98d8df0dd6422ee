#pragma once

// Scenario configuration: JSON (comments allowed), strict about unknown keys,
// with errors that name the offending field.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pilotwave/dirac.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/geometry.hpp"
#include "pilotwave/klein_gordon.hpp"
#include "pilotwave/lattice.hpp"

namespace pilotwave {

using Json = nlohmann::json;

enum class WaveEquation { dirac, klein_gordon };
enum class ParticleMode { none, guidance, general_eom };

struct PacketSpec {
    double center = 0.0;
    double momentum = 0.0;
    double width = 1.0;
    double amplitude = 1.0;
    double relative_phase = 0.0;
};

struct InitialStateSpec {
    std::string type = "gaussian_packets";  // or "plane_wave"
    double momentum = 0.0;                  // plane wave only
    std::vector<PacketSpec> packets;
};

struct EvolutionSpec {
    double t_final = 10.0;
    double dt_store = 0.1;
};

struct ParticleSpec {
    ParticleMode mode = ParticleMode::none;
    double x0 = 0.0;
    bool u_from_flow = true;           // "u0": "ubar"
    SpacetimeVector u0{1.0, 0.0};      // used when u_from_flow is false
    double boost_rapidity = 0.0;       // applied after choosing u0
    double sigma0_width = 3.0;         // lattice spacings
    double dt = 0.025;                 // coordinate time (guidance) or proper time (general_eom)
    bool backreaction = false;         // Dirac only, general_eom only
};

struct EnsembleSpec {
    bool present = false;
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    std::size_t bins = 64;
    double dt = 0.1;
    bool write_samples = false;
};

struct ConservationSpec {
    bool refinement_study = false;
    bool write_tensor = false;
};

struct ClassicalSpec {
    bool present = false;
    std::string kind = "em";                      // em | scalar
    std::string background = "uniform_electric";  // uniform_electric | sinusoidal_electric | constant | gaussian
    double charge = 1.0;
    double field = 1.0;       // E0
    double wavenumber = 1.0;
    double frequency = 0.0;
    double value = 0.0;       // constant scalar
    double amplitude = 0.0;   // gaussian scalar
    double center = 0.0;
    double width = 1.0;
    double mass = 1.0;
    double x0 = 0.0;
    SpacetimeVector u0{1.0, 0.0};
    double dtau = 0.01;
    double tau_final = 3.0;
};

struct OutputSpec {
    bool field_csv = true;
    bool current_csv = true;
    bool history_binary = false;
    bool gnuplot = false;
};

struct ScenarioConfig {
    WaveEquation wave_equation = WaveEquation::dirac;
    std::size_t num_points = 1024;
    double box_length = 200.0;
    double mass = 1.0;
    double coupling_k = 1.0;
    InitialStateSpec initial_state;
    EvolutionSpec evolution;
    ParticleSpec particle;
    EnsembleSpec ensemble;
    ConservationSpec conservation;
    ClassicalSpec classical;
    OutputSpec outputs;

    LatticeGrid grid() const { return LatticeGrid(num_points, box_length); }
};

namespace detail {

/// Walks one JSON object, remembering which keys were read so leftovers can
/// be reported.
class ObjectReader {
public:
    ObjectReader(const Json& object, std::string path) : object_(object), path_(std::move(path)) {
        if (!object_.is_object()) throw ConfigInvalid(path_.empty() ? "<root>" : path_, "must be an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return object_.contains(key); }

    const Json& raw(const std::string& key) {
        seen_.insert(key);
        return object_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigInvalid(field(key), "is required");
        }
        const Json& v = raw(key);
        if (!v.is_number()) throw ConfigInvalid(field(key), "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigInvalid(field(key), "must be finite");
        return d;
    }

    std::uint64_t unsigned_integer(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigInvalid(field(key), "is required");
        }
        const Json& v = raw(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
            throw ConfigInvalid(field(key), "must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const Json& v = raw(key);
        if (!v.is_boolean()) throw ConfigInvalid(field(key), "must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigInvalid(field(key), "is required");
        }
        const Json& v = raw(key);
        if (!v.is_string()) throw ConfigInvalid(field(key), "must be a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (auto it = object_.begin(); it != object_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigInvalid(field(it.key()), "unknown key");
    }

private:
    const Json& object_;
    std::string path_;
    std::set<std::string> seen_;
};

inline SpacetimeVector parse_vector(const Json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigInvalid(field, "must be a two-element numeric array [u0, u1]");
    return {v[0].get<double>(), v[1].get<double>()};
}

inline const Json& empty_object() {
    static const Json empty = Json::object();
    return empty;
}

inline void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigInvalid(field, message);
}

}  // namespace detail

inline ScenarioConfig parse_config(const Json& root) {
    using detail::require;
    ScenarioConfig c;
    detail::ObjectReader top(root, "");

    const std::string eq = top.string("wave_equation", std::string("dirac"));
    if (eq == "dirac")
        c.wave_equation = WaveEquation::dirac;
    else if (eq == "klein_gordon")
        c.wave_equation = WaveEquation::klein_gordon;
    else
        throw ConfigInvalid("wave_equation", "must be \"dirac\" or \"klein_gordon\"");

    {
        detail::ObjectReader g(top.has("grid") ? top.raw("grid") : detail::empty_object(), "grid");
        const auto n = g.unsigned_integer("num_points", 1024);
        require(n >= 8, "grid.num_points", "must be >= 8");
        require((n & (n - 1)) == 0, "grid.num_points", "must be a power of two");
        c.num_points = static_cast<std::size_t>(n);
        c.box_length = g.number("box_length", 200.0);
        require(c.box_length > 0.0, "grid.box_length", "must be > 0");
        g.finish();
    }

    c.mass = top.number("mass", 1.0);
    if (c.wave_equation == WaveEquation::klein_gordon)
        require(c.mass > 0.0, "mass", "must be > 0 for klein_gordon");
    else
        require(c.mass >= 0.0, "mass", "must be >= 0");
    c.coupling_k = top.number("coupling_k", 1.0);
    require(c.coupling_k > 0.0, "coupling_k", "must be > 0");

    const LatticeGrid grid = c.grid();
    {
        require(top.has("initial_state"), "initial_state", "is required");
        detail::ObjectReader s(top.raw("initial_state"), "initial_state");
        c.initial_state.type = s.string("type");
        if (c.initial_state.type == "plane_wave") {
            c.initial_state.momentum = s.number("momentum");
            try {
                (void)lattice_mode_index(grid, c.initial_state.momentum);
            } catch (const IncommensurateMomentum& e) {
                throw ConfigInvalid("initial_state.momentum", e.what());
            }
        } else if (c.initial_state.type == "gaussian_packets") {
            require(s.has("packets"), "initial_state.packets", "is required");
            const Json& list = s.raw("packets");
            require(list.is_array() && !list.empty(), "initial_state.packets", "must be a non-empty array");
            for (std::size_t i = 0; i < list.size(); ++i) {
                const std::string path = "initial_state.packets[" + std::to_string(i) + "]";
                detail::ObjectReader p(list[i], path);
                PacketSpec spec;
                spec.center = p.number("center");
                spec.momentum = p.number("momentum", 0.0);
                spec.width = p.number("width");
                spec.amplitude = p.number("amplitude", 1.0);
                spec.relative_phase = p.number("relative_phase", 0.0);
                require(spec.width >= 4.0 * grid.dx(), path + ".width", "must be at least 4 lattice spacings");
                require(spec.amplitude > 0.0, path + ".amplitude", "must be > 0");
                p.finish();
                c.initial_state.packets.push_back(spec);
            }
        } else {
            throw ConfigInvalid("initial_state.type", "must be \"plane_wave\" or \"gaussian_packets\"");
        }
        s.finish();
    }

    {
        detail::ObjectReader e(top.has("evolution") ? top.raw("evolution") : detail::empty_object(), "evolution");
        c.evolution.t_final = e.number("t_final", 10.0);
        c.evolution.dt_store = e.number("dt_store", 0.1);
        require(c.evolution.dt_store > 0.0, "evolution.dt_store", "must be > 0");
        require(c.evolution.t_final >= 0.0, "evolution.t_final", "must be >= 0");
        const double slices = c.evolution.t_final / c.evolution.dt_store;
        require(std::abs(slices - std::round(slices)) < 1e-9 * std::max(1.0, slices), "evolution.t_final",
                "must be a whole number of dt_store");
        e.finish();
    }

    if (top.has("particle")) {
        detail::ObjectReader p(top.raw("particle"), "particle");
        const std::string mode = p.string("mode", std::string("guidance"));
        if (mode == "guidance")
            c.particle.mode = ParticleMode::guidance;
        else if (mode == "general_eom")
            c.particle.mode = ParticleMode::general_eom;
        else if (mode == "none")
            c.particle.mode = ParticleMode::none;
        else
            throw ConfigInvalid("particle.mode", "must be \"guidance\", \"general_eom\" or \"none\"");
        c.particle.x0 = p.number("x0", 0.0);
        if (p.has("u0")) {
            const Json& u = p.raw("u0");
            if (u.is_string()) {
                require(u.get<std::string>() == "ubar", "particle.u0", "must be \"ubar\" or [u0, u1]");
                c.particle.u_from_flow = true;
            } else {
                c.particle.u0 = detail::parse_vector(u, "particle.u0");
                c.particle.u_from_flow = false;
                require(c.particle.u0.t > std::abs(c.particle.u0.x), "particle.u0", "must be future timelike");
                require(c.particle.mode != ParticleMode::guidance, "particle.u0",
                        "guidance mode always uses \"ubar\"");
            }
        }
        c.particle.boost_rapidity = p.number("boost_rapidity", 0.0);
        require(c.particle.boost_rapidity == 0.0 || c.particle.mode == ParticleMode::general_eom,
                "particle.boost_rapidity", "only applies to general_eom mode");
        c.particle.sigma0_width = p.number("sigma0_width", 3.0);
        require(c.particle.sigma0_width > 0.0, "particle.sigma0_width", "must be > 0");
        c.particle.dt = p.number("dt", 0.025);
        require(c.particle.dt > 0.0, "particle.dt", "must be > 0");
        c.particle.backreaction = p.boolean("backreaction", false);
        if (c.particle.backreaction) {
            require(c.wave_equation == WaveEquation::dirac, "particle.backreaction",
                    "is only available for the dirac equation");
            require(c.particle.mode == ParticleMode::general_eom, "particle.backreaction",
                    "requires mode \"general_eom\"");
        }
        p.finish();
    }

    if (top.has("ensemble")) {
        detail::ObjectReader e(top.raw("ensemble"), "ensemble");
        c.ensemble.present = true;
        c.ensemble.samples = static_cast<std::size_t>(e.unsigned_integer("samples", 1000));
        require(c.ensemble.samples >= 1, "ensemble.samples", "must be >= 1");
        c.ensemble.seed = e.unsigned_integer("seed", 1);
        c.ensemble.bins = static_cast<std::size_t>(e.unsigned_integer("bins", 64));
        require(c.ensemble.bins >= 1 && c.num_points % c.ensemble.bins == 0, "ensemble.bins",
                "must divide grid.num_points");
        c.ensemble.dt = e.number("dt", 0.1);
        require(c.ensemble.dt > 0.0, "ensemble.dt", "must be > 0");
        c.ensemble.write_samples = e.boolean("write_samples", false);
        e.finish();
    }

    if (top.has("conservation")) {
        detail::ObjectReader e(top.raw("conservation"), "conservation");
        c.conservation.refinement_study = e.boolean("refinement_study", false);
        c.conservation.write_tensor = e.boolean("write_tensor", false);
        e.finish();
    }

    if (top.has("classical")) {
        detail::ObjectReader e(top.raw("classical"), "classical");
        auto& k = c.classical;
        k.present = true;
        k.kind = e.string("kind");
        if (k.kind == "em") {
            k.background = e.string("background", std::string("uniform_electric"));
            k.charge = e.number("charge", 1.0);
            k.field = e.number("field", 1.0);
            if (k.background == "sinusoidal_electric") {
                k.wavenumber = e.number("wavenumber", 1.0);
                k.frequency = e.number("frequency", 0.0);
                require(k.wavenumber != 0.0, "classical.wavenumber", "must be nonzero");
            } else {
                require(k.background == "uniform_electric", "classical.background",
                        "must be \"uniform_electric\" or \"sinusoidal_electric\" for kind \"em\"");
            }
        } else if (k.kind == "scalar") {
            k.background = e.string("background", std::string("gaussian"));
            if (k.background == "constant") {
                k.value = e.number("value", 0.0);
            } else if (k.background == "gaussian") {
                k.amplitude = e.number("amplitude");
                k.center = e.number("center", 0.0);
                k.width = e.number("width", 1.0);
                require(k.width > 0.0, "classical.width", "must be > 0");
            } else {
                throw ConfigInvalid("classical.background", "must be \"constant\" or \"gaussian\" for kind \"scalar\"");
            }
        } else {
            throw ConfigInvalid("classical.kind", "must be \"em\" or \"scalar\"");
        }
        k.mass = e.number("mass", 1.0);
        require(k.mass > 0.0, "classical.mass", "must be > 0");
        k.x0 = e.number("x0", 0.0);
        if (e.has("u0")) k.u0 = detail::parse_vector(e.raw("u0"), "classical.u0");
        require(k.u0.t > std::abs(k.u0.x), "classical.u0", "must be future timelike");
        k.dtau = e.number("dtau", 0.01);
        require(k.dtau > 0.0, "classical.dtau", "must be > 0");
        k.tau_final = e.number("tau_final", 3.0);
        require(k.tau_final > 0.0, "classical.tau_final", "must be > 0");
        e.finish();
    }

    if (top.has("outputs")) {
        detail::ObjectReader o(top.raw("outputs"), "outputs");
        c.outputs.field_csv = o.boolean("field_csv", true);
        c.outputs.current_csv = o.boolean("current_csv", true);
        c.outputs.history_binary = o.boolean("history_binary", false);
        c.outputs.gnuplot = o.boolean("gnuplot", false);
        o.finish();
    }

    top.finish();
    return c;
}

inline ScenarioConfig parse_config_text(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigInvalid("<file>", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(root);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ScenarioConfig load_config(const std::string& path) { return parse_config_text(read_text_file(path)); }

/// Normalized config with every default filled in, for the run manifest.
inline Json to_json(const ScenarioConfig& c) {
    Json j;
    j["wave_equation"] = c.wave_equation == WaveEquation::dirac ? "dirac" : "klein_gordon";
    j["grid"] = {{"num_points", c.num_points}, {"box_length", c.box_length}};
    j["mass"] = c.mass;
    j["coupling_k"] = c.coupling_k;
    Json s;
    s["type"] = c.initial_state.type;
    if (c.initial_state.type == "plane_wave") {
        s["momentum"] = c.initial_state.momentum;
    } else {
        s["packets"] = Json::array();
        for (const auto& p : c.initial_state.packets)
            s["packets"].push_back({{"center", p.center},
                                    {"momentum", p.momentum},
                                    {"width", p.width},
                                    {"amplitude", p.amplitude},
                                    {"relative_phase", p.relative_phase}});
    }
    j["initial_state"] = s;
    j["evolution"] = {{"t_final", c.evolution.t_final}, {"dt_store", c.evolution.dt_store}};
    if (c.particle.mode != ParticleMode::none) {
        Json p;
        p["mode"] = c.particle.mode == ParticleMode::guidance ? "guidance" : "general_eom";
        p["x0"] = c.particle.x0;
        if (c.particle.u_from_flow)
            p["u0"] = "ubar";
        else
            p["u0"] = {c.particle.u0.t, c.particle.u0.x};
        p["boost_rapidity"] = c.particle.boost_rapidity;
        p["sigma0_width"] = c.particle.sigma0_width;
        p["dt"] = c.particle.dt;
        p["backreaction"] = c.particle.backreaction;
        j["particle"] = p;
    }
    if (c.ensemble.present)
        j["ensemble"] = {{"samples", c.ensemble.samples},
                         {"seed", c.ensemble.seed},
                         {"bins", c.ensemble.bins},
                         {"dt", c.ensemble.dt},
                         {"write_samples", c.ensemble.write_samples}};
    j["conservation"] = {{"refinement_study", c.conservation.refinement_study},
                         {"write_tensor", c.conservation.write_tensor}};
    if (c.classical.present) {
        const auto& k = c.classical;
        Json e{{"kind", k.kind}, {"background", k.background}, {"mass", k.mass}, {"x0", k.x0},
               {"u0", {k.u0.t, k.u0.x}}, {"dtau", k.dtau}, {"tau_final", k.tau_final}};
        if (k.kind == "em") {
            e["charge"] = k.charge;
            e["field"] = k.field;
            if (k.background == "sinusoidal_electric") {
                e["wavenumber"] = k.wavenumber;
                e["frequency"] = k.frequency;
            }
        } else if (k.background == "constant") {
            e["value"] = k.value;
        } else {
            e["amplitude"] = k.amplitude;
            e["center"] = k.center;
            e["width"] = k.width;
        }
        j["classical"] = e;
    }
    j["outputs"] = {{"field_csv", c.outputs.field_csv},
                    {"current_csv", c.outputs.current_csv},
                    {"history_binary", c.outputs.history_binary},
                    {"gnuplot", c.outputs.gnuplot}};
    return j;
}

/// Gaussian packets of the config as library packets.
inline std::vector<GaussianPacket> packets_of(const ScenarioConfig& c) {
    std::vector<GaussianPacket> out;
    for (const auto& p : c.initial_state.packets)
        out.push_back({p.center, p.momentum, p.width, std::polar(p.amplitude, p.relative_phase)});
    return out;
}

inline SpinorField initial_dirac_field(const ScenarioConfig& c) {
    const LatticeGrid grid = c.grid();
    if (c.initial_state.type == "plane_wave") return init_plane_wave(grid, c.mass, c.initial_state.momentum);
    const auto packets = packets_of(c);
    return init_gaussian_packets(grid, c.mass, packets);
}

inline ScalarFieldState initial_kg_state(const ScenarioConfig& c) {
    const LatticeGrid grid = c.grid();
    if (c.initial_state.type == "plane_wave") return init_kg_plane_wave(grid, c.mass, c.initial_state.momentum);
    const auto packets = packets_of(c);
    return init_kg_gaussian_packets(grid, c.mass, packets);
}

}  // namespace pilotwave
