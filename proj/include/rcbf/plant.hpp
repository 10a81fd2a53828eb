#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

#include "rcbf/core.hpp"
#include "rcbf/error.hpp"

namespace rcbf {

/// x2' = f(x) + g(x) (mu + nu). The input transform mu = (u - f) / g turns
/// this into x2' = u + w with w = g * nu.
struct AffinePlant {
    std::function<double(double, double)> f_dyn;
    std::function<double(double, double)> g_dyn;
    double nu_max = 0.0;
};

inline constexpr double kMinPlantGain = 1e-12;

inline double raw_input_from_u(const AffinePlant& plant, const State2& s, double u)
{
    const double g = plant.g_dyn(s.x1, s.x2);
    if (!(std::abs(g) >= kMinPlantGain))
        throw Error(ErrorCode::SingularGain, "|g(x)| below 1e-12");
    return (u - plant.f_dyn(s.x1, s.x2)) / g;
}

/// x2' produced by the raw input mu and raw disturbance nu.
inline double plant_accel(const AffinePlant& plant, const State2& s, double mu, double nu)
{
    return plant.f_dyn(s.x1, s.x2) + plant.g_dyn(s.x1, s.x2) * (mu + nu);
}

constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }

/// Vertical axis of a multirotor in the NED frame at fixed attitude:
///   P_z'' = gravity - (f / m) cos(phi) cos(theta) + w_z.
struct QuadAltitudeParams {
    double mass = 1.0;
    double gravity = 9.81;
    double phi = 0.0;    // roll (rad)
    double theta = 0.0;  // pitch (rad)
    double f_min = 0.0;
    double f_max = 0.0;
    double w_z_max = 0.0;

    double tilt() const noexcept { return std::cos(phi) * std::cos(theta); }

    void validate() const
    {
        if (!(mass > 0.0))
            throw Error(ErrorCode::InvalidArgument, "mass must be > 0");
        if (!(tilt() > 0.0))
            throw Error(ErrorCode::InvalidArgument, "cos(phi) cos(theta) must be > 0");
        if (!(f_min <= f_max))
            throw Error(ErrorCode::InvalidArgument, "thrust range requires f_min <= f_max");
        if (w_z_max < 0.0)
            throw Error(ErrorCode::InvalidArgument, "w_z_max must be >= 0");
    }
};

inline double thrust_from_u(const QuadAltitudeParams& q, double u)
{
    return q.mass * (q.gravity - u) / q.tilt();
}

/// Thrust delivered for a command u in [u_lb, u_ub]; clamped so round-off in the
/// inverse map never reports thrust outside [f_min, f_max].
inline double actuator_thrust(const QuadAltitudeParams& q, double u)
{
    return std::clamp(thrust_from_u(q, u), q.f_min, q.f_max);
}

inline double u_from_thrust(const QuadAltitudeParams& q, double f)
{
    return q.gravity - f * q.tilt() / q.mass;
}

/// The thrust map is decreasing, so f_max gives u_lb and f_min gives u_ub.
inline std::pair<double, double> u_bounds_from_thrust(const QuadAltitudeParams& q)
{
    return {u_from_thrust(q, q.f_max), u_from_thrust(q, q.f_min)};
}

inline ActuationLimits limits_from_quad(const QuadAltitudeParams& q)
{
    const auto [u_lb, u_ub] = u_bounds_from_thrust(q);
    return {u_lb, u_ub, q.w_z_max};
}

}  // namespace rcbf
