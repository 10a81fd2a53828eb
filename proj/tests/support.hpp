#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the phi/slack/projection code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rcbf/core.hpp"
#include "rcbf/plant.hpp"

namespace rcbf::test {

/// Vertical quadrotor scenario: m = 1 kg, phi = 0, theta = -5 deg,
/// f in [-15, 15] N, w_max = 5 m/s^2, box [0, 20] m climbing at 1 m/s.
struct QuadFixture {
    QuadAltitudeParams quad{1.0, 9.81, 0.0, deg_to_rad(-5.0), -15.0, 15.0, 5.0};
    ActuationLimits limits = limits_from_quad(quad);
    BoxProfile box = BoxProfile::affine(0.0, 20.0, 1.0, 0.0);
    // a_max = -max(u_lb + w_max, -u_ub + w_max) evaluated by hand.
    double a_max = -std::max(limits.u_lb + 5.0, -limits.u_ub + 5.0);
    State2 initial{5.0, 0.0, 0.0};
};

/// Rejection sampler for the restricted set at time t: uniform over a box
/// twice the size of the constraint box in x1 and the relative speed bound
/// widened by 50 % in x2.
template <typename Rng>
std::vector<State2> sample_restricted_set(const BoxProfile& box, const RcbfParams& p, double t,
                                          std::size_t count, Rng& rng)
{
    const double w = box.width();
    const double vb = std::sqrt(2.0 * p.a_max * w);
    std::uniform_real_distribution<double> dx1(box.lower(t) - 0.5 * w, box.upper(t) + 0.5 * w);
    std::uniform_real_distribution<double> dx2(box.rate(t) - 1.5 * vb, box.rate(t) + 1.5 * vb);
    std::vector<State2> out;
    out.reserve(count);
    while (out.size() < count) {
        const State2 s{dx1(rng), dx2(rng), t};
        // Direct evaluation of the four set conditions.
        const double d = s.x2 - box.rate(t);
        const double q = std::abs(d) * d / (2.0 * p.a_max);
        const double h_ub = s.x1 - box.upper(t);
        const double h_lb = box.lower(t) - s.x1;
        if (h_ub <= 0.0 && h_lb <= 0.0 && h_ub + q <= 0.0 && h_lb - q <= 0.0)
            out.push_back(s);
    }
    return out;
}

/// Maximum of f over n equally spaced samples of [lo, hi] (endpoints included).
template <typename F>
double sampled_max(F&& f, double lo, double hi, int n)
{
    double best = -INFINITY;
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        best = std::max(best, f(x));
    }
    return best;
}

/// Centered difference of f at t.
template <typename F>
double centered_difference(F&& f, double t, double dt)
{
    return (f(t + dt) - f(t - dt)) / (2.0 * dt);
}

}  // namespace rcbf::test
