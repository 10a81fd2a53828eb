#pragma once

// Box constraints l_lb(t) <= x1 <= l_ub(t) on a double integrator and the
// robust barrier functions built on them:
//
//   h_ub = x1 - l_ub(t)             h_lb = -x1 + l_lb(t)
//   H_ub = h_ub + |d| d / (2 a_max) H_lb = h_lb - |d| d / (2 a_max)
//
// with d = x2 - l'(t) the velocity relative to the moving box. Everything in
// this header is a pure function of its arguments. Units are SI throughout.

#include <cmath>
#include <functional>
#include <utility>

#include "rcbf/error.hpp"

namespace rcbf {

/// Absolute slack used for every boundary comparison (m, m/s, m/s^2).
inline constexpr double kBoundaryTol = 1e-9;

/// Membership slack used by the simulator to absorb integration drift.
inline constexpr double kSimMembershipTol = 1e-9;

/// sgn with sgn(0) = 0.
constexpr double sgn(double v) noexcept { return (v > 0.0) - (v < 0.0); }

struct State2 {
    double x1 = 0.0;  // position (m)
    double x2 = 0.0;  // velocity (m/s)
    double t = 0.0;   // time (s)
};

inline bool is_finite(const State2& s) noexcept
{
    return std::isfinite(s.x1) && std::isfinite(s.x2) && std::isfinite(s.t);
}

/// Time-varying bounds sharing a single rate, so the width never changes.
///
/// A general profile is described by its displacement l(t) - l(t0), its rate
/// and its acceleration. The caller is responsible for these three being
/// consistent; `l_ddot_max` must bound |accel(t)|.
class BoxProfile {
public:
    using Signal = std::function<double(double)>;

    /// l(t) = l0 + rate * (t - t0), l'' = 0.
    static BoxProfile affine(double l_lb0, double l_ub0, double rate, double t0 = 0.0)
    {
        if (!std::isfinite(rate))
            throw Error(ErrorCode::InvalidArgument, "box rate must be finite");
        BoxProfile box(l_lb0, l_ub0, t0, 0.0);
        box.affine_rate_ = rate;
        box.affine_ = true;
        return box;
    }

    static BoxProfile general(double l_lb0, double l_ub0, Signal displacement, Signal rate,
                              Signal accel, double l_ddot_max, double t0 = 0.0)
    {
        if (!displacement || !rate || !accel)
            throw Error(ErrorCode::InvalidArgument, "box profile signals must be callable");
        if (!(l_ddot_max >= 0.0) || !std::isfinite(l_ddot_max))
            throw Error(ErrorCode::InvalidArgument, "l_ddot_max must be finite and >= 0");
        BoxProfile box(l_lb0, l_ub0, t0, l_ddot_max);
        box.displacement_ = std::move(displacement);
        box.rate_ = std::move(rate);
        box.accel_ = std::move(accel);
        return box;
    }

    double lower0() const noexcept { return l_lb0_; }
    double upper0() const noexcept { return l_ub0_; }
    double t0() const noexcept { return t0_; }
    double width() const noexcept { return l_ub0_ - l_lb0_; }
    double accel_bound() const noexcept { return l_ddot_max_; }
    bool is_affine() const noexcept { return affine_; }

    double displacement(double t) const
    {
        return affine_ ? affine_rate_ * (t - t0_) : displacement_(t);
    }
    double lower(double t) const { return l_lb0_ + displacement(t); }
    double upper(double t) const { return l_ub0_ + displacement(t); }
    double center(double t) const { return 0.5 * (l_lb0_ + l_ub0_) + displacement(t); }
    double rate(double t) const { return affine_ ? affine_rate_ : rate_(t); }
    double accel(double t) const { return affine_ ? 0.0 : accel_(t); }

private:
    BoxProfile(double l_lb0, double l_ub0, double t0, double l_ddot_max)
        : l_lb0_(l_lb0), l_ub0_(l_ub0), t0_(t0), l_ddot_max_(l_ddot_max)
    {
        if (!std::isfinite(l_lb0) || !std::isfinite(l_ub0) || !std::isfinite(t0))
            throw Error(ErrorCode::InvalidArgument, "box bounds and t0 must be finite");
        if (l_ub0 < l_lb0)
            throw Error(ErrorCode::InvalidArgument, "box requires l_ub0 >= l_lb0");
    }

    double l_lb0_;
    double l_ub0_;
    double t0_;
    double l_ddot_max_;
    bool affine_ = false;
    double affine_rate_ = 0.0;
    Signal displacement_;
    Signal rate_;
    Signal accel_;
};

struct ActuationLimits {
    double u_lb = 0.0;
    double u_ub = 0.0;
    double w_max = 0.0;

    void validate() const
    {
        if (!std::isfinite(u_lb) || !std::isfinite(u_ub) || !std::isfinite(w_max))
            throw Error(ErrorCode::InvalidArgument, "actuation limits must be finite");
        if (!(u_lb < u_ub))
            throw Error(ErrorCode::InvalidArgument, "actuation limits require u_lb < u_ub");
        if (w_max < 0.0)
            throw Error(ErrorCode::InvalidArgument, "w_max must be >= 0");
    }
};

/// a_max: guaranteed deceleration margin; alpha: linear class-K gain shared
/// by both barrier conditions.
struct RcbfParams {
    double a_max = 1.0;
    double alpha = 1.0;

    void validate() const
    {
        if (!(a_max > 0.0) || !std::isfinite(a_max))
            throw Error(ErrorCode::InvalidArgument, "a_max must be finite and > 0");
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw Error(ErrorCode::InvalidArgument, "alpha must be finite and > 0");
    }
};

struct ConstraintPair {
    double ub = 0.0;
    double lb = 0.0;
};

struct RcbfValues {
    double h_ub = 0.0;
    double h_lb = 0.0;
    double hdot_ub = 0.0;
    double hdot_lb = 0.0;
    double H_ub = 0.0;
    double H_lb = 0.0;
};

inline ConstraintPair eval_h(const State2& s, const BoxProfile& box)
{
    return {s.x1 - box.upper(s.t), -s.x1 + box.lower(s.t)};
}

inline ConstraintPair eval_hdot(const State2& s, const BoxProfile& box)
{
    const double d = s.x2 - box.rate(s.t);
    return {d, -d};
}

/// |d| d / (2 a_max): the distance needed to cancel the relative velocity d
/// while decelerating at a_max, signed by the direction of travel.
inline double braking_term(double d, double a_max) noexcept
{
    return std::abs(d) * d / (2.0 * a_max);
}

inline RcbfValues eval_H(const State2& s, const BoxProfile& box, const RcbfParams& p)
{
    const auto h = eval_h(s, box);
    const auto hdot = eval_hdot(s, box);
    const double q = braking_term(hdot.ub, p.a_max);
    return {h.ub, h.lb, hdot.ub, hdot.lb, h.ub + q, h.lb - q};
}

/// Time derivative of H_ub and H_lb for applied input u and disturbance w.
inline ConstraintPair eval_Hdot(const State2& s, const BoxProfile& box, const RcbfParams& p,
                                double u, double w)
{
    const double d = s.x2 - box.rate(s.t);
    const double hddot = u + w - box.accel(s.t);
    const double ub = d + std::abs(d) * hddot / p.a_max;
    return {ub, -ub};
}

inline bool in_restricted_set(const RcbfValues& v, double tol = 0.0) noexcept
{
    return v.H_ub <= tol && v.H_lb <= tol && v.h_ub <= tol && v.h_lb <= tol;
}

/// Membership in the restricted safe set {H_ub, H_lb, h_ub, h_lb <= tol}.
inline bool in_restricted_set(const State2& s, const BoxProfile& box, const RcbfParams& p,
                              double tol = 0.0)
{
    if (tol < 0.0)
        throw Error(ErrorCode::InvalidArgument, "membership tolerance must be >= 0");
    return in_restricted_set(eval_H(s, box, p), tol);
}

/// Largest |x2 - l'| attainable inside the restricted set.
inline double velocity_bound(const BoxProfile& box, const RcbfParams& p)
{
    return std::sqrt(2.0 * p.a_max * box.width());
}

}  // namespace rcbf
