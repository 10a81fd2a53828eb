#pragma once

// JSON scenario files: loading with field-level diagnostics, "auto" parameter
// resolution, and the resolved echo written back into every summary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"
#include "rcbf/core.hpp"
#include "rcbf/error.hpp"
#include "rcbf/filter.hpp"
#include "rcbf/plant.hpp"
#include "rcbf/sim.hpp"
#include "rcbf/sweep.hpp"

namespace rcbf {

using Json = nlohmann::json;

/// Quadrotor thrust description with angles in degrees, as written in files.
struct QuadConfig {
    double mass = 1.0;
    double gravity = 9.81;
    double phi_deg = 0.0;
    double theta_deg = 0.0;
    double f_min = 0.0;
    double f_max = 0.0;
    double w_z_max = 0.0;

    QuadAltitudeParams to_params() const
    {
        return {mass, gravity, deg_to_rad(phi_deg), deg_to_rad(theta_deg), f_min, f_max, w_z_max};
    }
};

struct ScenarioConfig {
    struct Box {
        double l_lb0 = 0.0;
        double l_ub0 = 0.0;
        double rate = 0.0;
        double l_ddot_max = 0.0;
        double t0 = 0.0;
    } box;

    // Exactly one of `quad` and `limits` is the source of the input bounds.
    std::optional<QuadConfig> quad;
    std::optional<ActuationLimits> limits;

    std::optional<double> alpha;  // nullopt: "auto"
    std::optional<double> a_max;  // nullopt: "auto"

    State2 initial;

    struct Sim {
        double t_end = 30.0;
        double dt = 1e-3;
        Integrator integrator = Integrator::rk4;
        DisturbanceModel::Kind disturbance = DisturbanceModel::Kind::constant_max;
        double amplitude = 0.0;
        double period = 1.0;
        std::uint64_t seed = 0;
        Controller::Kind controller = Controller::Kind::midpoint;
        double u_nom = 0.0;
        double violation_tol = 1e-3;
    } sim;

    struct Sweep {
        std::size_t n1 = 400;
        std::size_t n2 = 400;
        double t = 0.0;
        std::optional<std::pair<double, double>> x1_range;
        std::optional<std::pair<double, double>> x2_range;
        double margin = 0.2;
    } sweep;
};

/// Parameters after "auto" expansion.
struct ResolvedParams {
    ActuationLimits limits;
    std::optional<QuadAltitudeParams> quad;
    double a_max = 0.0;
    double alpha_min = 0.0;
    double alpha = 0.0;
    double velocity_bound = 0.0;
    bool initial_in_set = false;
};

/// alpha = kAutoAlphaFactor * alpha_min, or kAutoAlphaFallback without disturbance.
inline constexpr double kAutoAlphaFactor = 1.001;
inline constexpr double kAutoAlphaFallback = 1.0;

namespace detail {

class JsonReader {
public:
    JsonReader(const Json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object())
            fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw Error(ErrorCode::ConfigError,
                    "field '" + (path_.empty() ? std::string("<root>") : path_) + "': " + msg);
    }

    std::string child_path(const std::string& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

    bool has(const std::string& key) const
    {
        seen_.insert(key);
        return node_.contains(key);
    }

    const Json& raw(const std::string& key) const
    {
        seen_.insert(key);
        if (!node_.contains(key))
            throw Error(ErrorCode::ConfigError, "field '" + child_path(key) + "': missing");
        return node_.at(key);
    }

    double number(const std::string& key) const
    {
        const Json& v = raw(key);
        if (!v.is_number())
            throw Error(ErrorCode::ConfigError, "field '" + child_path(key) + "': expected number");
        const double d = v.get<double>();
        if (!std::isfinite(d))
            throw Error(ErrorCode::ConfigError, "field '" + child_path(key) + "': not finite");
        return d;
    }

    double number_or(const std::string& key, double fallback) const
    {
        return has(key) ? number(key) : fallback;
    }

    std::uint64_t unsigned_or(const std::string& key, std::uint64_t fallback) const
    {
        if (!has(key))
            return fallback;
        const Json& v = raw(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw Error(ErrorCode::ConfigError,
                        "field '" + child_path(key) + "': expected non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string string_or(const std::string& key, const std::string& fallback) const
    {
        if (!has(key))
            return fallback;
        const Json& v = raw(key);
        if (!v.is_string())
            throw Error(ErrorCode::ConfigError, "field '" + child_path(key) + "': expected string");
        return v.get<std::string>();
    }

    /// Number, or nullopt for the literal string "auto".
    std::optional<double> number_or_auto(const std::string& key) const
    {
        if (!has(key))
            return std::nullopt;
        const Json& v = raw(key);
        if (v.is_string() && v.get<std::string>() == "auto")
            return std::nullopt;
        return number(key);
    }

    std::optional<std::pair<double, double>> range(const std::string& key) const
    {
        if (!has(key))
            return std::nullopt;
        const Json& v = raw(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw Error(ErrorCode::ConfigError,
                        "field '" + child_path(key) + "': expected [low, high]");
        return std::pair{v[0].get<double>(), v[1].get<double>()};
    }

    JsonReader object(const std::string& key) const { return {raw(key), child_path(key)}; }

    /// Rejects keys that were never looked up.
    void finish() const
    {
        for (const auto& [key, value] : node_.items())
            if (!seen_.count(key))
                throw Error(ErrorCode::ConfigError, "field '" + child_path(key) + "': unknown key");
    }

private:
    const Json& node_;
    std::string path_;
    mutable std::set<std::string> seen_;
};

inline DisturbanceModel::Kind parse_disturbance_kind(const std::string& s, const JsonReader& r)
{
    using K = DisturbanceModel::Kind;
    for (K k : {K::constant_max, K::constant_min, K::sinusoidal, K::uniform_random, K::zero})
        if (s == to_string(k))
            return k;
    r.fail("unknown disturbance kind '" + s + "'");
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const Json& root)
{
    using detail::JsonReader;
    ScenarioConfig cfg;
    const JsonReader top(root, "");

    {
        const JsonReader box = top.object("box");
        cfg.box.l_lb0 = box.number("l_lb0");
        cfg.box.l_ub0 = box.number("l_ub0");
        cfg.box.rate = box.number_or("rate", 0.0);
        cfg.box.l_ddot_max = box.number_or("l_ddot_max", 0.0);
        cfg.box.t0 = box.number_or("t0", 0.0);
        box.finish();
        if (cfg.box.l_ub0 < cfg.box.l_lb0)
            box.fail("l_ub0 must be >= l_lb0");
        if (cfg.box.l_ddot_max < 0.0)
            box.fail("l_ddot_max must be >= 0");
    }

    {
        const JsonReader act = top.object("actuation");
        if (act.has("quad")) {
            const JsonReader q = act.object("quad");
            QuadConfig quad;
            quad.mass = q.number("mass");
            quad.gravity = q.number_or("gravity", 9.81);
            quad.phi_deg = q.number_or("phi_deg", 0.0);
            quad.theta_deg = q.number_or("theta_deg", 0.0);
            quad.f_min = q.number("f_min");
            quad.f_max = q.number("f_max");
            quad.w_z_max = q.number("w_z_max");
            q.finish();
            try {
                quad.to_params().validate();
                const auto lim = limits_from_quad(quad.to_params());
                lim.validate();
            } catch (const Error& e) {
                q.fail(e.what());
            }
            cfg.quad = quad;
        }
        if (act.has("u_lb") || act.has("u_ub") || act.has("w_max")) {
            if (cfg.quad)
                act.fail("give either quad or (u_lb, u_ub, w_max), not both");
            ActuationLimits lim{act.number("u_lb"), act.number("u_ub"), act.number("w_max")};
            try {
                lim.validate();
            } catch (const Error& e) {
                act.fail(e.what());
            }
            cfg.limits = lim;
        }
        act.finish();
        if (!cfg.quad && !cfg.limits)
            act.fail("needs quad or (u_lb, u_ub, w_max)");
    }

    if (top.has("rcbf")) {
        const JsonReader rcbf = top.object("rcbf");
        cfg.alpha = rcbf.number_or_auto("alpha");
        cfg.a_max = rcbf.number_or_auto("a_max");
        rcbf.finish();
        if (cfg.alpha && !(*cfg.alpha > 0.0))
            rcbf.fail("alpha must be > 0");
        if (cfg.a_max && !(*cfg.a_max > 0.0))
            rcbf.fail("a_max must be > 0");
    }

    {
        const JsonReader init = top.object("initial");
        cfg.initial.x1 = init.number("x1");
        cfg.initial.x2 = init.number("x2");
        init.finish();
        cfg.initial.t = cfg.box.t0;
    }

    if (top.has("sim")) {
        const JsonReader sim = top.object("sim");
        cfg.sim.t_end = sim.number_or("t_end", cfg.sim.t_end);
        cfg.sim.dt = sim.number_or("dt", cfg.sim.dt);
        const std::string integrator = sim.string_or("integrator", "rk4");
        if (integrator == "rk4")
            cfg.sim.integrator = Integrator::rk4;
        else if (integrator == "euler")
            cfg.sim.integrator = Integrator::euler;
        else
            sim.fail("integrator must be \"rk4\" or \"euler\"");
        cfg.sim.seed = sim.unsigned_or("seed", 0);
        cfg.sim.violation_tol = sim.number_or("violation_tol", cfg.sim.violation_tol);
        if (sim.has("disturbance")) {
            const Json& d = sim.raw("disturbance");
            if (d.is_string()) {
                cfg.sim.disturbance = detail::parse_disturbance_kind(d.get<std::string>(), sim);
            } else {
                const JsonReader dist = sim.object("disturbance");
                cfg.sim.disturbance =
                    detail::parse_disturbance_kind(dist.string_or("kind", "constant-max"), dist);
                cfg.sim.amplitude = dist.number_or("amplitude", 0.0);
                cfg.sim.period = dist.number_or("period", 1.0);
                dist.finish();
            }
        }
        const std::string controller = sim.string_or("controller", "midpoint");
        if (controller == "midpoint")
            cfg.sim.controller = Controller::Kind::midpoint;
        else if (controller == "min-deviation")
            cfg.sim.controller = Controller::Kind::min_deviation;
        else
            sim.fail("controller must be \"midpoint\" or \"min-deviation\"");
        cfg.sim.u_nom = sim.number_or("u_nom", 0.0);
        sim.finish();
        if (!(cfg.sim.dt > 0.0))
            sim.fail("dt must be > 0");
        if (!(cfg.sim.t_end > cfg.box.t0))
            sim.fail("t_end must exceed box.t0");
        if (!(cfg.sim.violation_tol >= 0.0))
            sim.fail("violation_tol must be >= 0");
    }

    if (top.has("sweep")) {
        const JsonReader sw = top.object("sweep");
        cfg.sweep.n1 = sw.unsigned_or("n1", cfg.sweep.n1);
        cfg.sweep.n2 = sw.unsigned_or("n2", cfg.sweep.n2);
        cfg.sweep.t = sw.number_or("t", cfg.box.t0);
        cfg.sweep.x1_range = sw.range("x1_range");
        cfg.sweep.x2_range = sw.range("x2_range");
        cfg.sweep.margin = sw.number_or("margin", cfg.sweep.margin);
        sw.finish();
        if (cfg.sweep.n1 < 2 || cfg.sweep.n2 < 2)
            sw.fail("n1 and n2 must be >= 2");
    } else {
        cfg.sweep.t = cfg.box.t0;
    }

    top.finish();
    return cfg;
}

/// Parses JSON text; syntax errors report the line number.
inline ScenarioConfig parse_scenario_text(const std::string& text)
{
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": JSON syntax error");
    }
    return parse_scenario(root);
}

inline ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot read scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

inline BoxProfile make_box(const ScenarioConfig& cfg)
{
    if (cfg.box.l_ddot_max != 0.0) {
        // Affine profiles have l'' = 0; a declared bound only enlarges the margin.
        const double rate = cfg.box.rate;
        const double t0 = cfg.box.t0;
        return BoxProfile::general(
            cfg.box.l_lb0, cfg.box.l_ub0, [rate, t0](double t) { return rate * (t - t0); },
            [rate](double) { return rate; }, [](double) { return 0.0; }, cfg.box.l_ddot_max, t0);
    }
    return BoxProfile::affine(cfg.box.l_lb0, cfg.box.l_ub0, cfg.box.rate, cfg.box.t0);
}

/// Expands "auto" entries. Throws NonPositiveMargin or DegenerateBox.
inline ResolvedParams resolve(const ScenarioConfig& cfg)
{
    ResolvedParams r;
    if (cfg.quad) {
        r.quad = cfg.quad->to_params();
        r.limits = limits_from_quad(*r.quad);
    } else {
        r.limits = *cfg.limits;
    }
    const BoxProfile box = make_box(cfg);
    r.a_max = cfg.a_max ? *cfg.a_max : derive_a_max(r.limits, cfg.box.l_ddot_max);
    r.alpha_min = alpha_min(box, r.limits, r.a_max);
    if (cfg.alpha)
        r.alpha = *cfg.alpha;
    else
        r.alpha = r.alpha_min > 0.0 ? kAutoAlphaFactor * r.alpha_min : kAutoAlphaFallback;
    const RcbfParams p{r.a_max, r.alpha};
    r.velocity_bound = velocity_bound(box, p);
    r.initial_in_set = in_restricted_set(cfg.initial, box, p, 0.0);
    return r;
}

inline Scenario make_scenario(const ScenarioConfig& cfg, const ResolvedParams& r)
{
    Scenario sc;
    sc.box = make_box(cfg);
    sc.limits = r.limits;
    sc.params = {r.a_max, r.alpha};
    sc.quad = r.quad;
    sc.disturbance = {cfg.sim.disturbance, r.limits.w_max, cfg.sim.amplitude, cfg.sim.period};
    sc.config.t_end = cfg.sim.t_end;
    sc.config.dt = cfg.sim.dt;
    sc.config.integrator = cfg.sim.integrator;
    sc.config.violation_tol = cfg.sim.violation_tol;
    sc.config.seed = cfg.sim.seed;
    sc.config.controller = cfg.sim.controller == Controller::Kind::midpoint
                               ? Controller::midpoint()
                               : Controller::min_deviation(cfg.sim.u_nom);
    sc.initial = cfg.initial;
    return sc;
}

inline GridSpec make_grid(const ScenarioConfig& cfg, const ResolvedParams& r)
{
    const BoxProfile box = make_box(cfg);
    GridSpec spec = default_grid(box, {r.a_max, r.alpha}, cfg.sweep.margin, cfg.sweep.t,
                                 cfg.sweep.n1, cfg.sweep.n2);
    if (cfg.sweep.x1_range)
        spec.x1_range = *cfg.sweep.x1_range;
    if (cfg.sweep.x2_range)
        spec.x2_range = *cfg.sweep.x2_range;
    return spec;
}

/// Scenario JSON with every "auto" replaced by its resolved value. Feeding it
/// back through parse_scenario reproduces the same run.
inline Json to_json(const ScenarioConfig& cfg, const ResolvedParams& r)
{
    Json j;
    j["box"] = {{"l_lb0", cfg.box.l_lb0},
                {"l_ub0", cfg.box.l_ub0},
                {"rate", cfg.box.rate},
                {"l_ddot_max", cfg.box.l_ddot_max},
                {"t0", cfg.box.t0}};
    if (cfg.quad) {
        const auto& q = *cfg.quad;
        j["actuation"]["quad"] = {{"mass", q.mass},       {"gravity", q.gravity},
                                  {"phi_deg", q.phi_deg}, {"theta_deg", q.theta_deg},
                                  {"f_min", q.f_min},     {"f_max", q.f_max},
                                  {"w_z_max", q.w_z_max}};
    } else {
        j["actuation"] = {{"u_lb", cfg.limits->u_lb},
                          {"u_ub", cfg.limits->u_ub},
                          {"w_max", cfg.limits->w_max}};
    }
    j["rcbf"] = {{"alpha", r.alpha}, {"a_max", r.a_max}};
    j["initial"] = {{"x1", cfg.initial.x1}, {"x2", cfg.initial.x2}};
    Json dist = {{"kind", to_string(cfg.sim.disturbance)}};
    if (cfg.sim.disturbance == DisturbanceModel::Kind::sinusoidal) {
        dist["amplitude"] = cfg.sim.amplitude;
        dist["period"] = cfg.sim.period;
    }
    j["sim"] = {{"t_end", cfg.sim.t_end},
                {"dt", cfg.sim.dt},
                {"integrator", cfg.sim.integrator == Integrator::rk4 ? "rk4" : "euler"},
                {"disturbance", dist},
                {"seed", cfg.sim.seed},
                {"controller",
                 cfg.sim.controller == Controller::Kind::midpoint ? "midpoint" : "min-deviation"},
                {"u_nom", cfg.sim.u_nom},
                {"violation_tol", cfg.sim.violation_tol}};
    j["sweep"] = {{"n1", cfg.sweep.n1}, {"n2", cfg.sweep.n2}, {"t", cfg.sweep.t},
                  {"margin", cfg.sweep.margin}};
    if (cfg.sweep.x1_range)
        j["sweep"]["x1_range"] = {cfg.sweep.x1_range->first, cfg.sweep.x1_range->second};
    if (cfg.sweep.x2_range)
        j["sweep"]["x2_range"] = {cfg.sweep.x2_range->first, cfg.sweep.x2_range->second};
    return j;
}

inline Json to_json(const ResolvedParams& r)
{
    return {{"u_lb", r.limits.u_lb},       {"u_ub", r.limits.u_ub},
            {"w_max", r.limits.w_max},     {"a_max", r.a_max},
            {"alpha_min", r.alpha_min},    {"alpha", r.alpha},
            {"velocity_bound", r.velocity_bound}, {"in_set", r.initial_in_set}};
}

}  // namespace rcbf
