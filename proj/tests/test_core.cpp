#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "rcbf/core.hpp"
#include "support.hpp"

using namespace rcbf;
using Catch::Approx;

TEST_CASE("sgn maps zero to zero")
{
    CHECK(sgn(0.0) == 0.0);
    CHECK(sgn(-0.0) == 0.0);
    CHECK(sgn(3.0) == 1.0);
    CHECK(sgn(-1e-300) == -1.0);
}

TEST_CASE("BoxProfile validation and shared rate")
{
    CHECK_THROWS_AS(BoxProfile::affine(1.0, 0.0, 0.0), Error);
    CHECK_THROWS_AS(BoxProfile::affine(0.0, NAN, 0.0), Error);
    CHECK_NOTHROW(BoxProfile::affine(2.0, 2.0, 0.0));

    const auto box = BoxProfile::general(
        -1.0, 3.0, [](double t) { return 0.5 * std::sin(t); },
        [](double t) { return 0.5 * std::cos(t); }, [](double t) { return -0.5 * std::sin(t); },
        0.5, 0.0);
    for (int k = 0; k <= 1000; ++k) {
        const double t = 0.01 * k;
        CHECK(box.upper(t) - box.lower(t) == Approx(4.0).margin(1e-12));
        CHECK(std::abs(box.accel(t)) <= box.accel_bound());
    }
}

TEST_CASE("eval_h")
{
    const auto box = BoxProfile::affine(0.0, 20.0, 1.0);

    const auto h = eval_h({5.0, 0.0, 0.0}, box);
    CHECK(h.ub == -15.0);
    CHECK(h.lb == -5.0);

    CHECK(eval_h({box.upper(7.3), 0.0, 7.3}, box).ub == 0.0);

    const auto h3 = eval_h({10.0, 0.0, 3.0}, box);
    CHECK(h3.ub == Approx(-13.0).margin(1e-12));
    CHECK(h3.lb == Approx(-7.0).margin(1e-12));
}

TEST_CASE("eval_hdot")
{
    const auto box = BoxProfile::affine(0.0, 20.0, 1.0);
    const auto matched = eval_hdot({3.0, 1.0, 2.0}, box);
    CHECK(matched.ub == 0.0);
    CHECK(matched.lb == 0.0);

    const auto still = eval_hdot({5.0, 0.0, 0.0}, box);
    CHECK(still.ub == -1.0);
    CHECK(still.lb == 1.0);
}

TEST_CASE("eval_H")
{
    const auto box = BoxProfile::affine(0.0, 20.0, 1.0);
    const RcbfParams p{0.13292, 8.7};

    SECTION("quadratic term vanishes at matched rate")
    {
        const auto v = eval_H({4.0, 1.0, 0.5}, box, p);
        CHECK(v.H_ub == v.h_ub);
        CHECK(v.H_lb == v.h_lb);
    }

    SECTION("initial quadrotor state")
    {
        const auto v = eval_H({5.0, 0.0, 0.0}, box, p);
        CHECK(v.H_ub == Approx(-18.761661149563647).epsilon(1e-12));
        CHECK(v.H_lb == Approx(-1.238338850436353).epsilon(1e-12));
        CHECK(v.H_ub + v.H_lb == Approx(-20.0).margin(1e-12));
        CHECK(v.hdot_ub == -1.0);
        CHECK(v.hdot_lb == 1.0);
    }
}

TEST_CASE("Identities hold for random states")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux1(-40.0, 60.0), ux2(-10.0, 10.0), ut(0.0, 30.0),
        ua(0.01, 5.0);
    const auto box = BoxProfile::affine(0.0, 20.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const State2 s{ux1(rng), ux2(rng), ut(rng)};
        const RcbfParams p{ua(rng), 1.0};
        const auto v = eval_H(s, box, p);
        // Conservation: H_ub + H_lb = h_ub + h_lb = l_lb - l_ub.
        const double target = box.lower(s.t) - box.upper(s.t);
        const double scale = std::abs(v.H_ub) + std::abs(v.H_lb) + std::abs(target);
        REQUIRE(std::abs((v.H_ub + v.H_lb) - target) <=
                4 * std::numeric_limits<double>::epsilon() * scale);
        REQUIRE(std::abs((v.h_ub + v.h_lb) - target) <= 1e-12);

        const State2 matched{s.x1, box.rate(s.t), s.t};
        const auto m = eval_H(matched, box, p);
        REQUIRE(m.H_ub == m.h_ub);
        REQUIRE(m.H_lb == m.h_lb);
    }
}

TEST_CASE("in_restricted_set")
{
    const auto box = BoxProfile::affine(0.0, 20.0, 1.0);
    const RcbfParams p{0.1329204713761829, 8.7};

    CHECK(in_restricted_set({5.0, 0.0, 0.0}, box, p));
    CHECK_FALSE(in_restricted_set({21.0, 1.0, 0.0}, box, p));
    CHECK_THROWS_AS(in_restricted_set({5.0, 0.0, 0.0}, box, p, -1.0), Error);

    SECTION("membership implies the box constraints")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ux1(-10.0, 30.0);
        const double vb = velocity_bound(box, p);
        std::uniform_real_distribution<double> ux2(1.0 - 2.0 * vb, 1.0 + 2.0 * vb);
        std::size_t members = 0;
        for (int i = 0; i < 100000; ++i) {
            const State2 s{ux1(rng), ux2(rng), 0.0};
            if (!in_restricted_set(s, box, p))
                continue;
            ++members;
            const auto h = eval_h(s, box);
            REQUIRE(h.ub <= 0.0);
            REQUIRE(h.lb <= 0.0);
        }
        CHECK(members > 1000);
    }
}

TEST_CASE("velocity_bound")
{
    CHECK(velocity_bound(BoxProfile::affine(3.0, 3.0, 0.0), {0.5, 1.0}) == 0.0);

    const auto box = BoxProfile::affine(0.0, 20.0, 1.0);
    CHECK(velocity_bound(box, {0.13292, 1.0}) == Approx(2.3058187266131744).epsilon(1e-12));

    SECTION("Monte-Carlo: members never exceed the bound")
    {
        const RcbfParams p{0.1329204713761829, 8.7};
        std::mt19937_64 rng(3);
        const auto states = test::sample_restricted_set(box, p, 0.0, 100000, rng);
        const double vb = velocity_bound(box, p);
        double seen = 0.0;
        for (const auto& s : states) {
            REQUIRE(in_restricted_set(s, box, p, 0.0));
            const double rel = std::abs(s.x2 - box.rate(s.t));
            REQUIRE(rel <= vb + 1e-12);
            seen = std::max(seen, rel);
        }
        // The bound is attained at the box corners, so samples get close.
        CHECK(seen > 0.95 * vb);
    }
}

namespace {

// Smooth trajectory with a strictly positive relative velocity against a
// sinusoidally moving box:
//   x1 = 2t + 0.5 sin t,  x2 = 2 + 0.5 cos t,  x2' = -0.5 sin t
//   l(t) = l0 + 0.3 sin t
struct SmoothCase {
    BoxProfile box = BoxProfile::general(
        -5.0, 15.0, [](double t) { return 0.3 * std::sin(t); },
        [](double t) { return 0.3 * std::cos(t); }, [](double t) { return -0.3 * std::sin(t); },
        0.3, 0.0);
    RcbfParams p{0.7, 1.0};

    State2 at(double t) const { return {2.0 * t + 0.5 * std::sin(t), 2.0 + 0.5 * std::cos(t), t}; }
    double accel(double t) const { return -0.5 * std::sin(t); }
};

template <typename Value, typename Deriv>
double max_fd_error(Value value, Deriv deriv, double dt)
{
    double err = 0.0;
    for (int k = 1; k <= 40; ++k) {
        const double t = 0.1 * k;
        err = std::max(err, std::abs(test::centered_difference(value, t, dt) - deriv(t)));
    }
    return err;
}

}  // namespace

TEST_CASE("Analytic derivatives match centered differences at second order")
{
    const SmoothCase c;

    auto h_ub = [&](double t) { return eval_h(c.at(t), c.box).ub; };
    auto hdot_ub = [&](double t) { return eval_hdot(c.at(t), c.box).ub; };
    auto H_ub = [&](double t) { return eval_H(c.at(t), c.box, c.p).H_ub; };
    auto H_lb = [&](double t) { return eval_H(c.at(t), c.box, c.p).H_lb; };
    // The trajectory's acceleration is split as u = x2'', w = 0.
    auto Hdot_ub = [&](double t) { return eval_Hdot(c.at(t), c.box, c.p, c.accel(t), 0.0).ub; };
    auto Hdot_lb = [&](double t) { return eval_Hdot(c.at(t), c.box, c.p, c.accel(t), 0.0).lb; };

    auto order = [](double e_coarse, double e_fine) { return std::log10(e_coarse / e_fine); };

    const double eh3 = max_fd_error(h_ub, hdot_ub, 1e-3);
    const double eh4 = max_fd_error(h_ub, hdot_ub, 1e-4);
    CHECK(eh3 < 1e-6);
    CHECK(order(eh3, eh4) >= 1.9);

    const double eu3 = max_fd_error(H_ub, Hdot_ub, 1e-3);
    const double eu4 = max_fd_error(H_ub, Hdot_ub, 1e-4);
    CHECK(eu3 < 1e-5);
    CHECK(order(eu3, eu4) >= 1.9);

    const double el3 = max_fd_error(H_lb, Hdot_lb, 1e-3);
    const double el4 = max_fd_error(H_lb, Hdot_lb, 1e-4);
    CHECK(order(el3, el4) >= 1.9);
}
