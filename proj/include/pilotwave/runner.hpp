#pragma once

// Orchestration behind the command-line subcommands. Each run writes its data
// files, a JSON report and a manifest with checksums into one directory.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pilotwave/classical.hpp"
#include "pilotwave/config.hpp"
#include "pilotwave/currents.hpp"
#include "pilotwave/dirac.hpp"
#include "pilotwave/dynamics.hpp"
#include "pilotwave/ensemble.hpp"
#include "pilotwave/field_history.hpp"
#include "pilotwave/interpolation.hpp"
#include "pilotwave/io.hpp"
#include "pilotwave/klein_gordon.hpp"
#include "pilotwave/source.hpp"
#include "pilotwave/stress_energy.hpp"

namespace pilotwave {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kManifestSchema = 1;

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

/// Collects outputs of one run and writes the manifest last.
class RunRecorder {
public:
    RunRecorder(std::string subcommand, const ScenarioConfig& config, const RunOptions& options)
        : subcommand_(std::move(subcommand)), config_(to_json(config)), options_(options) {
        std::filesystem::create_directories(options_.out_dir);
        if (options_.seed) config_["seed_override"] = *options_.seed;
    }

    std::filesystem::path path(const std::string& name) {
        files_.push_back(name);
        return options_.out_dir / name;
    }

    void log(const std::string& line) const {
        if (!options_.quiet) std::cerr << "[" << subcommand_ << "] " << line << '\n';
    }

    void write_json(const std::string& name, const Json& value) {
        std::ofstream out(path(name), std::ios::binary);
        out << value.dump(2) << '\n';
    }

    Json finish(const Json& report, const std::string& report_name) {
        write_json(report_name, report);
        Json manifest;
        manifest["schema_version"] = kManifestSchema;
        manifest["tool"] = "pilotwave";
        manifest["version"] = kVersion;
        manifest["subcommand"] = subcommand_;
        manifest["config"] = config_;
        manifest["outputs"] = Json::array();
        for (const auto& f : files_)
            manifest["outputs"].push_back({{"file", f}, {"sha256", sha256_file(options_.out_dir / f)}});
        std::ofstream out(options_.out_dir / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << '\n';
        return report;
    }

    const RunOptions& options() const { return options_; }

private:
    std::string subcommand_;
    Json config_;
    RunOptions options_;
    std::vector<std::string> files_;
};

inline FieldHistory<SpinorField> dirac_history(const SpinorField& initial, double t_final, double dt_store) {
    return evolve_history(initial, t_final, dt_store,
                          [](const SpinorField& f, double dt) { return step_dirac_free(f, dt); });
}

inline FieldHistory<ScalarFieldState> kg_history(const ScalarFieldState& initial, double t_final, double dt_store) {
    return evolve_history(initial, t_final, dt_store,
                          [](const ScalarFieldState& s, double dt) { return step_klein_gordon(s, dt); });
}

template <class Field>
std::vector<CurrentField> currents_of(const FieldHistory<Field>& h) {
    std::vector<CurrentField> out;
    out.reserve(h.size());
    for (const auto& s : h.slices()) out.push_back(current_of(s));
    return out;
}

/// Calls fn with the free history of the configured wave equation.
template <class Fn>
auto with_history(const ScenarioConfig& c, double dt_store, Fn&& fn) {
    if (c.wave_equation == WaveEquation::dirac) return fn(dirac_history(initial_dirac_field(c), c.evolution.t_final, dt_store));
    return fn(kg_history(initial_kg_state(c), c.evolution.t_final, dt_store));
}

namespace detail {

inline double field_norm(const SpinorField& f) { return f.norm(); }
inline double field_norm(const ScalarFieldState& s) { return s.charge(); }

inline void gnuplot_if(RunRecorder& rec, bool enabled, const std::string& script, const std::string& data,
                       int x, int y, const std::string& xlabel, const std::string& ylabel) {
    if (!enabled) return;
    const GnuplotSeries s{data, x, y, ylabel};
    write_gnuplot_script(rec.path(script), script.substr(0, script.rfind('.')) + ".png", xlabel, ylabel,
                         std::span<const GnuplotSeries>(&s, 1));
}

/// Initial 4-velocity requested by the particle spec.
inline SpacetimeVector initial_velocity(const ParticleSpec& spec, const FlowInterpolant& flow, double t0) {
    SpacetimeVector u = spec.u_from_flow ? flow.flow_sample(t0, spec.x0).ubar() : normalize_timelike(spec.u0);
    if (spec.boost_rapidity != 0.0) u = normalize_timelike(boost(u, spec.boost_rapidity));
    return u;
}

inline double max_stationarity(const Worldline& w, const FlowInterpolant& flow) {
    double worst = 0.0;
    for (const auto& s : w.samples) {
        const FlowSample f = flow.flow_sample(s.t, s.x);
        worst = std::max(worst, component_norm(velocity_stationarity(s.u, f.rho0(), f.j)));
    }
    return worst;
}

}  // namespace detail

inline Json run_evolve(const ScenarioConfig& c, const RunOptions& options) {
    RunRecorder rec("evolve", c, options);
    return with_history(c, c.evolution.dt_store, [&](const auto& history) {
        rec.log("evolved " + std::to_string(history.size()) + " slices");
        const double n0 = detail::field_norm(history[0]);
        double drift = 0.0;
        std::size_t undefined = 0;
        for (const auto& s : history.slices()) {
            drift = std::max(drift, std::abs(detail::field_norm(s) - n0));
            undefined = std::max(undefined, current_of(s).undefined_count());
        }
        const auto& last = history.back();
        const CurrentField current = current_of(last);
        if (c.outputs.field_csv) write_field_csv(rec.path("field_final.csv"), last);
        if (c.outputs.current_csv) write_current_csv(rec.path("current_final.csv"), current);
        if (c.outputs.history_binary) write_history_binary(rec.path("history.bin"), history);
        detail::gnuplot_if(rec, c.outputs.gnuplot && c.outputs.current_csv, "current_final.gp", "current_final.csv", 1,
                           2, "x", "j0");
        Json report;
        report["slices"] = history.size();
        report["t_final"] = last.time;
        report["initial_norm"] = n0;
        report["max_norm_drift"] = drift;
        report["max_undefined_sites"] = undefined;
        return rec.finish(report, "evolve_report.json");
    });
}

namespace detail {

/// Particle and sourced Dirac field advanced together, one stored slice at a
/// time. The particle follows the general equation of motion in the flow of
/// the sourced field.
inline Json coupled_trajectory(const ScenarioConfig& c, RunRecorder& rec) {
    SpinorField field = initial_dirac_field(c);
    const double dts = c.evolution.dt_store;
    const auto slices = static_cast<std::size_t>(std::llround(c.evolution.t_final / dts));
    std::vector<CurrentField> first{dirac_current(field)};
    FlowInterpolant flow(first, dts, c.coupling_k);
    ParticleState p;
    p.t = field.time;
    p.x = c.particle.x0;
    p.mass = c.mass;
    p.u = initial_velocity(c.particle, flow, p.t);
    Worldline w;
    w.method = "general-eom-rk4-coupled";
    w.step = c.particle.dt;
    w.record(p);
    const double n0 = field.norm();
    double norm_drift = 0.0;
    for (std::size_t n = 1; n <= slices; ++n) {
        SourceParticle sp{p.x, p.u, c.particle.sigma0_width, c.coupling_k, false};
        field = step_dirac_sourced(field, dts, sp);
        field.time = static_cast<double>(n) * dts;
        norm_drift = std::max(norm_drift, std::abs(field.norm() - n0));
        flow.append(dirac_current(field));
        while (p.t + 1.5 * p.u.t * c.particle.dt <= field.time) {
            p = general_eom_step(p, flow, c.particle.dt);
            w.record(p);
        }
    }
    write_worldline_csv(rec.path("worldline.csv"), w);
    Json report;
    report["method"] = w.method;
    report["samples"] = w.size();
    report["t_end"] = w.back().t;
    report["x_end"] = w.back().x;
    report["max_normalization_error"] = w.max_normalization_error();
    report["field_norm_initial"] = n0;
    report["field_norm_max_drift"] = norm_drift;
    return report;
}

}  // namespace detail

inline Json run_trajectory(const ScenarioConfig& c, const RunOptions& options) {
    if (c.particle.mode == ParticleMode::none) throw ConfigInvalid("particle", "is required for trajectory runs");
    RunRecorder rec("trajectory", c, options);
    if (c.particle.backreaction) {
        Json report = detail::coupled_trajectory(c, rec);
        detail::gnuplot_if(rec, c.outputs.gnuplot, "worldline.gp", "worldline.csv", 2, 1, "x", "t");
        return rec.finish(report, "trajectory_report.json");
    }
    return with_history(c, c.evolution.dt_store, [&](const auto& history) {
        const auto currents = currents_of(history);
        const FlowInterpolant flow(currents, c.evolution.dt_store, c.coupling_k);
        const double t0 = history[0].time;
        const double t_end = c.evolution.t_final;
        Worldline w;
        Json report;
        if (c.particle.mode == ParticleMode::guidance) {
            w = integrate_guidance(particle_on_flow(flow, t0, c.particle.x0, c.mass), flow, c.particle.dt, t_end);
            report["max_stationarity_gradient"] = detail::max_stationarity(w, flow);
        } else {
            ParticleState p;
            p.t = t0;
            p.x = c.particle.x0;
            p.mass = c.mass;
            p.u = detail::initial_velocity(c.particle, flow, t0);
            w = integrate_general_eom(p, flow, c.particle.dt, t_end);
            if (c.particle.u_from_flow && c.particle.boost_rapidity == 0.0) {
                const Worldline g = integrate_guidance(particle_on_flow(flow, t0, c.particle.x0, c.mass), flow,
                                                       c.particle.dt / 4.0, t_end);
                double sep = 0.0;
                for (const auto& s : w.samples)
                    if (s.t <= g.back().t) sep = std::max(sep, std::abs(s.x - position_at(g, s.t)));
                report["max_separation_from_guidance"] = sep;
            }
        }
        std::vector<double> residual;
        if (w.size() >= 5) {
            const ResidualReport r = eom_residual(w, flow);
            residual = r.residual;
            report["max_eom_residual"] = r.max_residual;
            report["relative_eom_residual"] = r.relative();
            report["max_grad_rho0"] = r.max_grad_rho0;
        }
        write_worldline_csv(rec.path("worldline.csv"), w, residual);
        detail::gnuplot_if(rec, c.outputs.gnuplot, "worldline.gp", "worldline.csv", 2, 1, "x", "t");
        report["method"] = w.method;
        report["samples"] = w.size();
        report["t_end"] = w.back().t;
        report["x_end"] = w.back().x;
        report["max_normalization_error"] = w.max_normalization_error();
        rec.log("worldline with " + std::to_string(w.size()) + " samples");
        return rec.finish(report, "trajectory_report.json");
    });
}

inline Json run_ensemble(const ScenarioConfig& c, const RunOptions& options) {
    if (!c.ensemble.present) throw ConfigInvalid("ensemble", "is required for ensemble runs");
    RunRecorder rec("ensemble", c, options);
    const std::uint64_t seed = options.seed.value_or(c.ensemble.seed);
    return with_history(c, c.evolution.dt_store, [&](const auto& history) {
        const auto currents = currents_of(history);
        const FlowInterpolant flow(currents, c.evolution.dt_store, c.coupling_k);
        const auto positions = sample_initial_positions(currents.front(), c.ensemble.samples, seed);
        rec.log("propagating " + std::to_string(positions.size()) + " samples");
        EnsembleResult result = propagate_ensemble(positions, flow, c.evolution.t_final, c.ensemble.dt);
        result.seed = seed;
        const auto density = density_check(result, currents.back(), c.ensemble.bins);
        const auto current = current_check(result, currents.back(), c.ensemble.bins);
        if (c.ensemble.write_samples) {
            CsvWriter w(rec.path("samples.csv"), "initial_x,final_x,final_v,lost");
            for (std::size_t s = 0; s < result.sample_count; ++s)
                w.row(result.initial_positions[s], result.final_positions[s], result.final_velocities[s],
                      static_cast<int>(result.lost[s]));
        }
        {
            CsvWriter w(rec.path("histogram.csv"), "bin_left,empirical,expected,rho_v,j1,noise,count");
            const Binning b(currents.back().grid, c.ensemble.bins);
            for (std::size_t k = 0; k < c.ensemble.bins; ++k)
                w.row(b.grid.x_min() + static_cast<double>(k) * b.width(), density.empirical[k],
                      density.expected[k], current.empirical[k], current.expected[k], current.noise[k],
                      current.counts[k]);
        }
        detail::gnuplot_if(rec, c.outputs.gnuplot, "histogram.gp", "histogram.csv", 1, 2, "x", "fraction");
        Json report;
        report["samples"] = result.sample_count;
        report["seed"] = seed;
        report["bins"] = c.ensemble.bins;
        report["t_final"] = result.t_final;
        report["tv_distance"] = density.tv_distance;
        report["current_match_error"] = current.max_error;
        report["current_noise_floor"] = current.noise_floor;
        report["lost_count"] = result.lost_count;
        report["lost_fraction"] = result.lost_fraction();
        report["order_preserved"] = order_preserved(result);
        return rec.finish(report, "ensemble_report.json");
    });
}

struct ConservationSeries {
    std::vector<double> times;
    std::vector<SpacetimeVector> momentum;       // total
    std::vector<SpacetimeVector> field_momentum;
    double max_divergence_total = 0.0;
    double max_divergence_field = 0.0;
    double max_asymmetry = 0.0;
    std::vector<StressEnergyField> last_parts;
};

namespace detail {

template <class Field>
StressEnergyField field_tensor_at(const FieldHistory<Field>& h, std::size_t n) {
    return field_tensor(h, n);
}

/// Guidance particle positioned at every slice time.
inline std::vector<ParticleState> guided_states(const FlowInterpolant& flow, const ParticleSpec& spec, double mass,
                                                std::size_t slices, double dts) {
    std::vector<ParticleState> out;
    ParticleState p = particle_on_flow(flow, flow.t_first(), spec.x0, mass);
    out.push_back(p);
    const auto sub = std::max<long long>(1, std::llround(dts / spec.dt));
    for (std::size_t n = 1; n < slices; ++n) {
        for (long long k = 1; k <= sub; ++k) {
            const double target = flow.t_first() + (static_cast<double>(n - 1) + static_cast<double>(k) / static_cast<double>(sub)) * dts;
            p = guidance_step(p, flow, target - p.t);
            p.t = target;
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace detail

/// Tensor bookkeeping over a stored history. Divergences are taken only where
/// every tensor involved uses centered time differences, and only for
/// slices with t in [t_lo, t_hi].
template <class Field>
ConservationSeries conservation_series(const FieldHistory<Field>& h, const ScenarioConfig& c, double t_lo,
                                       double t_hi) {
    const double dts = h.dt_store();
    const bool particle = c.particle.mode == ParticleMode::guidance;
    std::optional<FlowInterpolant> flow;
    std::vector<ParticleState> states;
    if (particle) {
        const auto currents = currents_of(h);
        flow.emplace(currents, dts, c.coupling_k);
        states = detail::guided_states(*flow, c.particle, c.mass, h.size(), dts);
    }
    ConservationSeries out;
    std::vector<StressEnergyField> totals(h.size());
    std::vector<StressEnergyField> fields(h.size());
    for (std::size_t n = 0; n < h.size(); ++n) {
        fields[n] = detail::field_tensor_at(h, n);
        out.max_asymmetry = std::max(out.max_asymmetry, fields[n].max_asymmetry());
        std::vector<StressEnergyField> parts{fields[n]};
        if (particle) {
            const double rho0 = sample_slice(current_of(h[n]), states[n].x).rho0();
            parts.push_back(
                particle_tensor(h[n].grid, h[n].time, states[n], c.particle.sigma0_width, rho0, c.coupling_k));
            parts.push_back(interaction_tensor(h, n, states[n], c.particle.sigma0_width, c.coupling_k));
        }
        totals[n] = sum_parts(parts);
        out.times.push_back(h[n].time);
        out.momentum.push_back(total_momentum(totals[n]));
        out.field_momentum.push_back(total_momentum(fields[n]));
        if (n + 1 == h.size()) {
            parts.push_back(totals[n]);
            out.last_parts = parts;
        }
    }
    const double tol = 1e-9 * dts;
    for (std::size_t n = 2; n + 2 < h.size(); ++n) {
        if (h[n].time < t_lo - tol || h[n].time > t_hi + tol) continue;
        const auto dt = max_abs(divergence(totals, n, dts));
        const auto df = max_abs(divergence(fields, n, dts));
        out.max_divergence_total = std::max({out.max_divergence_total, dt.t, dt.x});
        out.max_divergence_field = std::max({out.max_divergence_field, df.t, df.x});
    }
    return out;
}

inline Json run_conserve(const ScenarioConfig& c, const RunOptions& options) {
    if (c.particle.mode == ParticleMode::general_eom)
        throw ConfigInvalid("particle.mode", "conserve supports \"guidance\" or \"none\"");
    RunRecorder rec("conserve", c, options);
    const double dts = c.evolution.dt_store;
    const double t_lo = 2.0 * dts;
    const double t_hi = c.evolution.t_final - 2.0 * dts;
    auto run = [&](double step) {
        return with_history(c, step, [&](const auto& h) {
            if (h.size() < 5) throw InsufficientHistory("conservation needs at least five stored slices");
            return conservation_series(h, c, t_lo, t_hi);
        });
    };
    const ConservationSeries s = run(dts);
    const SpacetimeVector p0 = s.momentum.front();
    const double scale = std::max(std::abs(p0.t), std::abs(p0.x));
    SpacetimeVector drift{};
    {
        CsvWriter w(rec.path("momentum.csv"), "t,P0,P1,P0_field,P1_field");
        for (std::size_t n = 0; n < s.times.size(); ++n) {
            const auto& p = s.momentum[n];
            drift.t = std::max(drift.t, std::abs(p.t - p0.t));
            drift.x = std::max(drift.x, std::abs(p.x - p0.x));
            w.row(s.times[n], p.t, p.x, s.field_momentum[n].t, s.field_momentum[n].x);
        }
    }
    if (c.conservation.write_tensor) write_tensor_csv(rec.path("tensor_final.csv"), s.last_parts);
    detail::gnuplot_if(rec, c.outputs.gnuplot, "momentum.gp", "momentum.csv", 1, 2, "t", "P0");
    Json report;
    report["slices"] = s.times.size();
    report["initial_momentum"] = {p0.t, p0.x};
    report["momentum_drift"] = {drift.t, drift.x};
    report["momentum_drift_relative"] = {scale > 0 ? drift.t / scale : 0.0, scale > 0 ? drift.x / scale : 0.0};
    report["max_divergence_total"] = s.max_divergence_total;
    report["max_divergence_field"] = s.max_divergence_field;
    report["max_tensor_asymmetry"] = s.max_asymmetry;
    if (c.conservation.refinement_study) {
        rec.log("refinement pass at dt_store / 2");
        const ConservationSeries fine = run(0.5 * dts);
        report["refined_max_divergence_total"] = fine.max_divergence_total;
        report["refinement_ratio"] =
            fine.max_divergence_total > 0 ? s.max_divergence_total / fine.max_divergence_total : 0.0;
    }
    return rec.finish(report, "conservation_report.json");
}

inline Json run_classical(const ScenarioConfig& c, const RunOptions& options) {
    if (!c.classical.present) throw ConfigInvalid("classical", "is required for classical runs");
    RunRecorder rec("classical", c, options);
    const auto& k = c.classical;
    ParticleState p;
    p.x = k.x0;
    p.mass = k.mass;
    p.u = normalize_timelike(k.u0);
    const auto steps = static_cast<std::size_t>(std::llround(k.tau_final / k.dtau));
    Json report;
    Worldline w;
    if (k.kind == "em") {
        const EmBackground bg = k.background == "uniform_electric"
                                    ? uniform_electric(k.charge, k.field)
                                    : sinusoidal_electric(k.charge, k.field, k.wavenumber, k.frequency);
        w = integrate_classical(p, k.dtau, steps,
                                [&](const ParticleState& s, double h) { return lorentz_force_step(s, bg, h); },
                                "lorentz-rk4");
        if (k.background == "uniform_electric" && k.u0.x == 0.0) {
            double err = 0.0;
            for (const auto& s : w.samples) {
                const ParticleState exact = hyperbolic_motion(k.charge, k.field, k.mass, s.tau);
                err = std::max({err, std::abs(s.x - k.x0 - exact.x), std::abs(s.t - exact.t)});
            }
            report["max_closed_form_error"] = err;
        }
    } else {
        const ScalarBackground bg = k.background == "constant" ? constant_scalar(k.value)
                                                              : gaussian_scalar(k.amplitude, k.center, k.width);
        w = integrate_classical(p, k.dtau, steps,
                                [&](const ParticleState& s, double h) { return scalar_eom_step(s, bg, h); },
                                "scalar-rk4");
        const double e0 = scalar_energy(p, bg);
        double drift = 0.0;
        for (const auto& s : w.samples) {
            ParticleState q = p;
            q.t = s.t;
            q.x = s.x;
            q.u = s.u;
            drift = std::max(drift, std::abs(scalar_energy(q, bg) - e0));
        }
        report["initial_energy"] = e0;
        report["max_energy_drift"] = drift;
    }
    write_worldline_csv(rec.path("classical_worldline.csv"), w);
    detail::gnuplot_if(rec, c.outputs.gnuplot, "classical_worldline.gp", "classical_worldline.csv", 2, 1, "x", "t");
    report["method"] = w.method;
    report["samples"] = w.size();
    report["x_end"] = w.back().x;
    report["t_end"] = w.back().t;
    report["max_normalization_error"] = w.max_normalization_error();
    return rec.finish(report, "classical_report.json");
}

}  // namespace pilotwave
