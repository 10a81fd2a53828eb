#pragma once

// Fixed-step closed-loop simulation of x1' = x2, x2' = u + w with the
// control and disturbance held constant over each step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rcbf/core.hpp"
#include "rcbf/error.hpp"
#include "rcbf/filter.hpp"
#include "rcbf/plant.hpp"

namespace rcbf {

enum class Integrator { rk4, euler };

/// Input disturbance w(t) with |w(t)| <= w_max for every kind.
struct DisturbanceModel {
    enum class Kind { constant_max, constant_min, sinusoidal, uniform_random, zero };

    Kind kind = Kind::constant_max;
    double w_max = 0.0;
    double amplitude = 0.0;  // sinusoidal only
    double period = 1.0;     // sinusoidal only (s)

    static DisturbanceModel constant_max(double w_max) { return {Kind::constant_max, w_max}; }
    static DisturbanceModel constant_min(double w_max) { return {Kind::constant_min, w_max}; }
    static DisturbanceModel zero(double w_max) { return {Kind::zero, w_max}; }
    static DisturbanceModel uniform_random(double w_max) { return {Kind::uniform_random, w_max}; }
    static DisturbanceModel sinusoidal(double w_max, double amplitude, double period)
    {
        return {Kind::sinusoidal, w_max, amplitude, period};
    }

    void validate() const
    {
        if (!(w_max >= 0.0) || !std::isfinite(w_max))
            throw Error(ErrorCode::ConfigError, "disturbance w_max must be finite and >= 0");
        if (kind == Kind::sinusoidal) {
            if (!(std::abs(amplitude) <= w_max))
                throw Error(ErrorCode::ConfigError, "sinusoid amplitude exceeds w_max");
            if (!(period > 0.0))
                throw Error(ErrorCode::ConfigError, "sinusoid period must be > 0");
        }
    }
};

inline const char* to_string(DisturbanceModel::Kind kind) noexcept
{
    using K = DisturbanceModel::Kind;
    switch (kind) {
    case K::constant_max: return "constant-max";
    case K::constant_min: return "constant-min";
    case K::sinusoidal: return "sinusoidal";
    case K::uniform_random: return "uniform-random";
    case K::zero: return "zero";
    }
    return "unknown";
}

/// Stateful sampler for one run. Random draws use a fixed bit-to-double
/// mapping so output does not depend on the standard library's distributions.
class DisturbanceSource {
public:
    DisturbanceSource(const DisturbanceModel& model, std::uint64_t seed)
        : model_(model), rng_(seed)
    {
    }

    double sample(double t)
    {
        using K = DisturbanceModel::Kind;
        switch (model_.kind) {
        case K::constant_max: return model_.w_max;
        case K::constant_min: return -model_.w_max;
        case K::zero: return 0.0;
        case K::sinusoidal:
            return model_.amplitude * std::sin(2.0 * std::numbers::pi * t / model_.period);
        case K::uniform_random: {
            const double unit = static_cast<double>(rng_() >> 11) * 0x1.0p-53;  // [0, 1)
            return std::clamp((2.0 * unit - 1.0) * model_.w_max, -model_.w_max, model_.w_max);
        }
        }
        return 0.0;
    }

private:
    DisturbanceModel model_;
    std::mt19937_64 rng_;
};

struct Controller {
    enum class Kind { midpoint, min_deviation };

    Kind kind = Kind::midpoint;
    /// Nominal input for min_deviation; ignored by midpoint.
    std::function<double(const State2&)> u_nom;

    static Controller midpoint() { return {}; }
    static Controller min_deviation(std::function<double(const State2&)> u_nom)
    {
        return {Kind::min_deviation, std::move(u_nom)};
    }
    static Controller min_deviation(double u_const)
    {
        return min_deviation([u_const](const State2&) { return u_const; });
    }
};

struct SimConfig {
    double t_end = 30.0;
    double dt = 1e-3;
    Integrator integrator = Integrator::rk4;
    double violation_tol = 1e-3;
    Controller controller;
    std::uint64_t seed = 0;
};

struct Scenario {
    BoxProfile box = BoxProfile::affine(0.0, 1.0, 0.0);
    ActuationLimits limits;
    RcbfParams params;
    std::optional<QuadAltitudeParams> quad;  // enables the thrust column
    DisturbanceModel disturbance;
    SimConfig config;
    State2 initial;
};

struct TrajectoryRecord {
    double t = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double u = 0.0;
    double w = 0.0;
    std::optional<double> f_thrust;
    double h_ub = 0.0;
    double h_lb = 0.0;
    double H_ub = 0.0;
    double H_lb = 0.0;
    double phi_lb = 0.0;
    double phi_ub = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool feasible = false;
};

struct SimSummary {
    std::size_t steps = 0;
    bool initial_in_set = false;
    double max_h_ub = -std::numeric_limits<double>::infinity();
    double max_h_lb = -std::numeric_limits<double>::infinity();
    double max_H_ub = -std::numeric_limits<double>::infinity();
    double max_H_lb = -std::numeric_limits<double>::infinity();
    double min_width = std::numeric_limits<double>::infinity();
    double max_abs_u = 0.0;
    double max_rel_speed = 0.0;  // max |x2 - l'|
    std::optional<double> min_thrust;
    std::optional<double> max_thrust;
    std::size_t infeasible_steps = 0;
    bool invariance_held = false;
};

struct SimResult {
    std::vector<TrajectoryRecord> records;
    SimSummary summary;
};

/// One step of x1' = x2, x2' = accel with accel held over the step.
inline State2 step(const State2& s, double u, double w, double dt,
                   Integrator integrator = Integrator::rk4)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
    const double a = u + w;
    if (integrator == Integrator::euler)
        return {s.x1 + dt * s.x2, s.x2 + dt * a, s.t + dt};

    // Classic RK4 on y = (x1, x2), f(y) = (x2, a).
    const double k1x = s.x2, k1v = a;
    const double k2x = s.x2 + 0.5 * dt * k1v, k2v = a;
    const double k3x = s.x2 + 0.5 * dt * k2v, k3v = a;
    const double k4x = s.x2 + dt * k3v, k4v = a;
    return {s.x1 + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            s.x2 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v), s.t + dt};
}

inline void validate(const Scenario& sc)
{
    try {
        sc.limits.validate();
        sc.params.validate();
        if (sc.quad)
            sc.quad->validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    sc.disturbance.validate();
    const auto& cfg = sc.config;
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
        throw Error(ErrorCode::ConfigError, "dt must be finite and > 0");
    if (!(cfg.t_end > sc.box.t0()))
        throw Error(ErrorCode::ConfigError, "t_end must exceed t0");
    if (!(cfg.violation_tol >= 0.0))
        throw Error(ErrorCode::ConfigError, "violation_tol must be >= 0");
    if (sc.disturbance.w_max != sc.limits.w_max)
        throw Error(ErrorCode::ConfigError, "disturbance w_max differs from actuation w_max");
    if (cfg.controller.kind == Controller::Kind::min_deviation && !cfg.controller.u_nom)
        throw Error(ErrorCode::ConfigError, "min-deviation controller needs a nominal input");
    if (!is_finite(sc.initial))
        throw Error(ErrorCode::ConfigError, "initial state must be finite");
}

/// Closed-loop run. If the admissible interval is empty the clamped midpoint
/// is applied anyway and the step is counted as infeasible.
inline SimResult run(const Scenario& sc)
{
    validate(sc);
    const auto& cfg = sc.config;
    const double t0 = sc.box.t0();
    const auto n_steps = static_cast<std::size_t>(std::ceil((cfg.t_end - t0) / cfg.dt - 1e-9));

    SimResult result;
    result.records.reserve(n_steps + 1);
    SimSummary& sum = result.summary;
    sum.steps = n_steps;

    DisturbanceSource disturbance(sc.disturbance, cfg.seed);
    State2 s{sc.initial.x1, sc.initial.x2, t0};
    sum.initial_in_set = in_restricted_set(s, sc.box, sc.params, kSimMembershipTol);

    for (std::size_t k = 0; k <= n_steps; ++k) {
        const RcbfValues v = eval_H(s, sc.box, sc.params);
        const FeasibleInterval fi = phi_bounds(s, sc.box, sc.limits, sc.params);

        double u = clamped_midpoint(fi, sc.limits);
        if (cfg.controller.kind == Controller::Kind::min_deviation && !fi.empty)
            u = std::clamp(cfg.controller.u_nom(s), fi.lo, fi.hi);
        const double w = disturbance.sample(s.t);

        TrajectoryRecord rec;
        rec.t = s.t;
        rec.x1 = s.x1;
        rec.x2 = s.x2;
        rec.u = u;
        rec.w = w;
        if (sc.quad)
            rec.f_thrust = actuator_thrust(*sc.quad, u);
        rec.h_ub = v.h_ub;
        rec.h_lb = v.h_lb;
        rec.H_ub = v.H_ub;
        rec.H_lb = v.H_lb;
        rec.phi_lb = fi.phi_lb;
        rec.phi_ub = fi.phi_ub;
        rec.lo = fi.lo;
        rec.hi = fi.hi;
        rec.feasible = !fi.empty;
        result.records.push_back(rec);

        sum.max_h_ub = std::max(sum.max_h_ub, v.h_ub);
        sum.max_h_lb = std::max(sum.max_h_lb, v.h_lb);
        sum.max_H_ub = std::max(sum.max_H_ub, v.H_ub);
        sum.max_H_lb = std::max(sum.max_H_lb, v.H_lb);
        sum.min_width = std::min(sum.min_width, fi.width());
        sum.max_abs_u = std::max(sum.max_abs_u, std::abs(u));
        sum.max_rel_speed = std::max(sum.max_rel_speed, std::abs(v.hdot_ub));
        if (rec.f_thrust) {
            sum.min_thrust = std::min(sum.min_thrust.value_or(*rec.f_thrust), *rec.f_thrust);
            sum.max_thrust = std::max(sum.max_thrust.value_or(*rec.f_thrust), *rec.f_thrust);
        }
        if (fi.empty)
            ++sum.infeasible_steps;

        if (k == n_steps)
            break;
        const double t_next = (k + 1 == n_steps) ? cfg.t_end : t0 + static_cast<double>(k + 1) * cfg.dt;
        s = step(s, u, w, t_next - s.t, cfg.integrator);
        s.t = t_next;
    }

    sum.invariance_held = sum.max_h_ub <= cfg.violation_tol && sum.max_h_lb <= cfg.violation_tol;
    return result;
}

struct InvarianceReport {
    std::optional<double> first_H_ub;
    std::optional<double> first_H_lb;
    std::optional<double> first_h_ub;
    std::optional<double> first_h_lb;
    std::optional<double> first_input_violation;

    bool set_violated() const noexcept
    {
        return first_H_ub || first_H_lb || first_h_ub || first_h_lb;
    }
    bool clean() const noexcept { return !set_violated() && !first_input_violation; }
};

/// First time each restricted-set condition exceeds tol, and the first record
/// whose input leaves [u_lb, u_ub].
inline InvarianceReport check_invariance(const std::vector<TrajectoryRecord>& records,
                                         const ActuationLimits& lim, double tol)
{
    InvarianceReport report;
    auto mark = [](std::optional<double>& slot, bool hit, double t) {
        if (hit && !slot)
            slot = t;
    };
    for (const auto& r : records) {
        mark(report.first_H_ub, r.H_ub > tol, r.t);
        mark(report.first_H_lb, r.H_lb > tol, r.t);
        mark(report.first_h_ub, r.h_ub > tol, r.t);
        mark(report.first_h_lb, r.h_lb > tol, r.t);
        mark(report.first_input_violation, r.u < lim.u_lb || r.u > lim.u_ub, r.t);
    }
    return report;
}

}  // namespace rcbf
