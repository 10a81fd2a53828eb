#pragma once

// Admissible-input bounds for the pair of robust barrier conditions
//
//   g_ub = max_{|w|<=w_max} dH_ub/dt - alpha * (-H_ub) <= 0
//   g_lb = max_{|w|<=w_max} dH_lb/dt - alpha * (-H_lb) <= 0
//
// Both are affine in u and reduce to phi_lb <= u <= phi_ub. The resulting
// interval, intersected with [u_lb, u_ub], is the set a safety filter may
// pick from.

#include <algorithm>
#include <cmath>

#include "rcbf/core.hpp"
#include "rcbf/error.hpp"

namespace rcbf {

/// Floor on |x2 - l'| inside the phi formulas, which divide by it.
inline constexpr double kSingularityEps = 1e-9;

struct FeasibleInterval {
    double phi_lb = 0.0;
    double phi_ub = 0.0;
    double lo = 0.0;  // max(phi_lb, u_lb)
    double hi = 0.0;  // min(phi_ub, u_ub)
    bool empty = true;

    double width() const noexcept { return hi - lo; }
    bool contains(double u) const noexcept { return !empty && lo <= u && u <= hi; }
};

struct SlackValues {
    double g_ub = 0.0;
    double g_lb = 0.0;
};

/// a_max = -max(u_lb + w_max + l''_max, -u_ub + w_max + l''_max).
inline double derive_a_max(const ActuationLimits& lim, double l_ddot_max)
{
    const double a_max =
        -std::max(lim.u_lb + lim.w_max + l_ddot_max, -lim.u_ub + lim.w_max + l_ddot_max);
    if (!(a_max > 0.0))
        throw Error(ErrorCode::NonPositiveMargin,
                    "input bounds cannot dominate w_max + l''_max (a_max = " +
                        std::to_string(a_max) + ")");
    return a_max;
}

/// Smallest alpha for which every state in the restricted set admits an input.
inline double alpha_min(const BoxProfile& box, const ActuationLimits& lim, double a_max)
{
    if (!(a_max > 0.0))
        throw Error(ErrorCode::InvalidArgument, "a_max must be > 0");
    const double width = box.width();
    if (!(width > 0.0))
        throw Error(ErrorCode::DegenerateBox, "l_ub0 - l_lb0 must be > 0");
    return 2.0 * lim.w_max * std::sqrt(2.0 / (width * a_max));
}

/// Convenience bundle: a_max from the limits, alpha = factor * alpha_min.
inline RcbfParams derive_params(const BoxProfile& box, const ActuationLimits& lim,
                                double alpha_factor = 1.001)
{
    const double a_max = derive_a_max(lim, box.accel_bound());
    RcbfParams p{a_max, alpha_factor * alpha_min(box, lim, a_max)};
    p.validate();
    return p;
}

inline FeasibleInterval make_interval(double phi_lb, double phi_ub, const ActuationLimits& lim)
{
    FeasibleInterval fi;
    fi.phi_lb = phi_lb;
    fi.phi_ub = phi_ub;
    fi.lo = std::max(phi_lb, lim.u_lb);
    fi.hi = std::min(phi_ub, lim.u_ub);
    fi.empty = fi.lo > fi.hi;
    return fi;
}

/// phi_lb/phi_ub at state s. |x2 - l'| is floored at kSingularityEps, which
/// only ever narrows the interval inside the restricted set.
inline FeasibleInterval phi_bounds(const State2& s, const BoxProfile& box,
                                   const ActuationLimits& lim, const RcbfParams& p)
{
    const RcbfValues v = eval_H(s, box, p);
    const double d = v.hdot_ub;
    const double dreg = std::max(std::abs(d), kSingularityEps);
    const double gain = p.a_max * p.alpha / dreg;
    const double common = -sgn(d) * p.a_max + box.accel(s.t);
    const double phi_ub = gain * (-v.H_ub) + common - lim.w_max;
    const double phi_lb = -gain * (-v.H_lb) + common + lim.w_max;
    return make_interval(phi_lb, phi_ub, lim);
}

/// Barrier-condition residuals for input u under the worst-case disturbance.
/// No regularization: at x2 = l' both residuals are independent of u.
inline SlackValues slack(const State2& s, const BoxProfile& box, const ActuationLimits& lim,
                         const RcbfParams& p, double u)
{
    const RcbfValues v = eval_H(s, box, p);
    const double d = v.hdot_ub;
    const double l_ddot = box.accel(s.t);
    const double ad = std::abs(d);
    const double worst_ub = d + ad * (u - l_ddot) / p.a_max + ad * lim.w_max / p.a_max;
    const double worst_lb = -d + ad * (l_ddot - u) / p.a_max + ad * lim.w_max / p.a_max;
    return {worst_ub - p.alpha * (-v.H_ub), worst_lb - p.alpha * (-v.H_lb)};
}

/// Midpoint of [phi_lb, phi_ub] clamped to the input bounds. Total; never throws.
inline double clamped_midpoint(const FeasibleInterval& fi, const ActuationLimits& lim)
{
    return std::clamp(0.5 * (fi.phi_lb + fi.phi_ub), lim.u_lb, lim.u_ub);
}

namespace detail {

inline FeasibleInterval checked_interval(const State2& s, const BoxProfile& box,
                                         const ActuationLimits& lim, const RcbfParams& p)
{
    if (!in_restricted_set(s, box, p, kSimMembershipTol))
        throw Error(ErrorCode::InfeasibleState, "state is outside the restricted safe set");
    FeasibleInterval fi = phi_bounds(s, box, lim, p);
    if (fi.empty)
        throw Error(ErrorCode::InfeasibleState, "admissible input interval is empty");
    return fi;
}

}  // namespace detail

/// u = (phi_lb + phi_ub) / 2 clamped to [u_lb, u_ub].
inline double control_midpoint(const State2& s, const BoxProfile& box,
                               const ActuationLimits& lim, const RcbfParams& p)
{
    return clamped_midpoint(detail::checked_interval(s, box, lim, p), lim);
}

/// Minimizer of |u - u_nom| over the admissible interval.
inline double control_min_deviation(const State2& s, const BoxProfile& box,
                                    const ActuationLimits& lim, const RcbfParams& p,
                                    double u_nom)
{
    const FeasibleInterval fi = detail::checked_interval(s, box, lim, p);
    return std::clamp(u_nom, fi.lo, fi.hi);
}

}  // namespace rcbf
