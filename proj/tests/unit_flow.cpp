#include <doctest.h>

#include <cmath>
#include <random>

#include "hpsqg/biot_savart.hpp"
#include "hpsqg/fit.hpp"
#include "hpsqg/flow.hpp"
#include "hpsqg/presets.hpp"

using namespace hpsqg;

TEST_CASE("integrate_flow: rest and uniform translation") {
    const VelocityProvider zero = [](double, Vec2) { return Vec2{0.0, 0.0}; };
    const FlowTrajectory still = integrate_flow(zero, HalfPlanePoint(0.4, -0.2), 0.0, 1.0, 0.1);
    for (const Vec2& p : still.positions) {
        CHECK(p.x1 == 0.4);
        CHECK(p.x2 == -0.2);
    }

    const VelocityProvider up = [](double, Vec2) { return Vec2{0.0, 1.0}; };
    const FlowTrajectory t = integrate_flow(up, HalfPlanePoint(0.3, 0.0), 0.0, 0.5, 0.05);
    CHECK(t.positions.back().x1 == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(t.positions.back().x2 == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("integrate_flow: rigid rotation is 4th order over one period") {
    const Vec2 c{1.0, 0.0};
    const VelocityProvider rot = [c](double, Vec2 x) {
        return Vec2{-(x.x2 - c.x2), x.x1 - c.x1};
    };
    const HalfPlanePoint seed(1.5, 0.3);
    std::vector<double> dts, errs;
    for (double dt : {1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512}) {
        const FlowTrajectory t = integrate_flow(rot, seed, 0.0, 2.0 * M_PI, dt);
        errs.push_back(norm(t.positions.back() - seed.vec()));
        dts.push_back(dt);
    }
    const LineFit f = fit_loglog(dts, errs);
    CHECK(std::abs(f.slope - 4.0) < 0.3);
}

TEST_CASE("inverse_flow_foot: trivial cases and round trips") {
    const VelocityProvider zero = [](double, Vec2) { return Vec2{0.0, 0.0}; };
    const HalfPlanePoint foot0 = inverse_flow_foot(zero, HalfPlanePoint(0.7, 0.1), 0.5, 0.05);
    CHECK(foot0.x1 == 0.7);
    CHECK(foot0.x2 == 0.1);

    const VelocityProvider up = [](double, Vec2) { return Vec2{0.0, 1.0}; };
    const HalfPlanePoint foot = inverse_flow_foot(up, HalfPlanePoint(0.4, 0.3), 0.25, 0.05);
    CHECK(foot.x1 == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(foot.x2 == doctest::Approx(0.05).epsilon(1e-12));

    // frozen smooth field: forward then backward returns to the seed
    auto axes = GridAxes::uniform(64, 1.6, 64, -1.2, 1.2);
    const InitialData b = make_preset("interior_bump", {});
    const ScalarField th(axes, b.value, b.support_radius, false);
    const VelocityEvaluator eval(axes, Alpha(0.5), QuadratureConfig{});
    const VelocityGrid u = eval.snapshot(th);
    const VelocityProvider prov = frozen_provider(u);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u1(0.1, 1.0), u2(-0.8, 0.8);
    const double dt = 1.0 / 256;
    for (int k = 0; k < 50; ++k) {
        const HalfPlanePoint seed(u1(rng), u2(rng));
        const FlowTrajectory fwd = integrate_flow(prov, seed, 0.0, 0.2, dt);
        const Vec2 end = fwd.positions.back();
        const FlowTrajectory bwd =
            integrate_flow(prov, HalfPlanePoint(std::max(end.x1, 0.0), end.x2), 0.2, 0.0, dt);
        CHECK(norm(bwd.positions.back() - seed.vec()) < 1e-6);
    }
}

TEST_CASE("integrate_flow: group property at 4th order") {
    const Vec2 c{1.0, 0.0};
    const VelocityProvider rot = [c](double, Vec2 x) {
        return Vec2{-(x.x2 - c.x2), x.x1 - c.x1};
    };
    const HalfPlanePoint seed(1.4, 0.2);
    const double dt = 1.0 / 128;
    const FlowTrajectory full = integrate_flow(rot, seed, 0.0, 1.0, dt);
    const FlowTrajectory half1 = integrate_flow(rot, seed, 0.0, 0.5, dt);
    const Vec2 mid = half1.positions.back();
    const FlowTrajectory half2 =
        integrate_flow(rot, HalfPlanePoint(mid.x1, mid.x2), 0.5, 1.0, dt);
    CHECK(norm(half2.positions.back() - full.positions.back()) < 1e-9);
}

TEST_CASE("integrate_flow: boundary seeds stay pinned, wall pushes clamp") {
    const VelocityProvider skew = [](double, Vec2 x) { return Vec2{0.5 * x.x1, 1.0}; };
    const FlowTrajectory t = integrate_flow(skew, HalfPlanePoint(0.0, 0.0), 0.0, 1.0, 0.1);
    for (const Vec2& p : t.positions) CHECK(p.x1 == 0.0);
    CHECK(t.positions.back().x2 == doctest::Approx(1.0).epsilon(1e-12));

    const VelocityProvider push = [](double, Vec2) { return Vec2{-1.0, 0.0}; };
    const FlowTrajectory w = integrate_flow(push, HalfPlanePoint(0.05, 0.0), 0.0, 1.0, 0.01);
    CHECK(w.clamp_events > 0);
    CHECK(w.unreliable);
    for (const Vec2& p : w.positions) CHECK(p.x1 >= 0.0);
}

TEST_CASE("check_phi1_envelope: zero velocity and synthetic exponential") {
    const VelocityProvider zero = [](double, Vec2) { return Vec2{0.0, 0.0}; };
    const FlowTrajectory still = integrate_flow(zero, HalfPlanePoint(0.3, 0.0), 0.0, 1.0, 0.1);
    std::vector<double> times, norms;
    for (double t = 0.0; t <= 1.0 + 1e-12; t += 0.1) {
        times.push_back(t);
        norms.push_back(2.0);
    }
    CHECK(check_phi1_envelope(still, times, norms).C == 0.0);

    // synthetic x1(t) = x1(0) exp(k t) with constant norm N: C = k / N
    const double k = 0.7, N = 2.0;
    FlowTrajectory synth;
    synth.seed = {0.2, 0.0};
    for (double t = 0.0; t <= 1.0 + 1e-12; t += 0.1) {
        synth.times.push_back(t);
        synth.positions.push_back({0.2 * std::exp(k * t), 0.0});
        synth.velocities.push_back({0.0, 0.0});
    }
    const EnvelopeReport rep = check_phi1_envelope(synth, times, norms);
    CHECK(rep.C == doctest::Approx(k / N).epsilon(1e-10));
}
