#include <doctest.h>

#include <cmath>
#include <random>

#include "hpsqg/geometry.hpp"
#include "hpsqg/presets.hpp"

using namespace hpsqg;

TEST_CASE("reflect: boundary fixed, definition, involution") {
    CHECK(reflect(HalfPlanePoint(0.0, 3.0)).x1 == 0.0);
    CHECK(reflect(HalfPlanePoint(0.0, 3.0)).x2 == 3.0);
    const Vec2 m = reflect(HalfPlanePoint(1.0, -2.0));
    CHECK(m.x1 == -1.0);
    CHECK(m.x2 == -2.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-5.0, 5.0);
    for (int k = 0; k < 100; ++k) {
        const Vec2 p{uni(rng), uni(rng)};
        const Vec2 q = reflect(reflect(p));
        CHECK(q.x1 == p.x1);
        CHECK(q.x2 == p.x2);
    }
}

TEST_CASE("HalfPlanePoint rejects negative x1") {
    CHECK_THROWS_AS(HalfPlanePoint(-0.1, 0.0), std::domain_error);
}

TEST_CASE("eval reproduces constants, node values, and linears") {
    auto axes = GridAxes::uniform(32, 1.0, 32, -1.0, 1.0);
    const ScalarField c(axes, [](double, double) { return 4.25; }, 2.0, false);
    CHECK(c.eval(Vec2{0.3, 0.41}) == doctest::Approx(4.25).epsilon(1e-14));

    const ScalarField lin(axes, [](double, double x2) { return x2; }, 2.0, false);
    CHECK(lin.eval(Vec2{0.5, 0.37}) == doctest::Approx(0.37).epsilon(1e-12));

    // node values reproduced bit-exactly
    for (int i : {0, 7, 31})
        for (int j : {0, 13, 31})
            CHECK(lin.eval(Vec2{axes->x1()[i], axes->x2()[j]}) == lin.node(i, j));
}

TEST_CASE("eval: gaussian bump at h=1/128 is 4th-order accurate") {
    auto axes = GridAxes::uniform(129, 1.0, 257, -1.0, 1.0); // h1 = 1/128
    const InitialData g = make_preset("gaussian", {{"center1", 0.5}, {"center2", 0.0},
                                                   {"sigma", 0.15}});
    const ScalarField f(axes, g.value, g.support_radius, false);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u1(0.2, 0.8), u2(-0.5, 0.5);
    // tolerance calibrated against the analytic source: h^4 * |d4 f| scale
    const double tol = 5e-6;
    for (int k = 0; k < 200; ++k) {
        const Vec2 p{u1(rng), u2(rng)};
        CHECK(std::abs(f.eval(p) - g.value(p.x1, p.x2)) < tol);
    }
}

TEST_CASE("eval: out-of-grid behaviour") {
    auto axes = GridAxes::uniform(16, 1.0, 16, -1.0, 1.0);
    const ScalarField bare(axes, [](double, double) { return 1.0; }, 2.0, false);
    CHECK_THROWS_AS(bare.eval(Vec2{1.5, 0.0}), std::domain_error);
    const ScalarField with(axes, [](double a, double b) { return a + b; }, 2.0, true);
    CHECK(with.eval(Vec2{1.5, 0.25}) == doctest::Approx(1.75));
    CHECK(bare.eval_or_zero(Vec2{1.5, 0.0}) == 0.0);
}

TEST_CASE("finite_diff_gradient on linear and smooth fields") {
    auto axes = GridAxes::uniform(129, 2.0, 129, -2.0, 2.0);
    const ScalarField fx1(axes, [](double x1, double) { return x1; }, 4.0, false);
    for (const Vec2 p : {Vec2{0.01, 0.0}, Vec2{0.5, 0.7}, Vec2{1.5, -1.0}}) {
        const Vec2 g = fx1.finite_diff_gradient(p);
        CHECK(std::abs(g.x1 - 1.0) < 1e-10);
        CHECK(std::abs(g.x2) < 1e-10);
    }
    const ScalarField fs(axes, [](double, double x2) { return std::sin(x2); }, 4.0, false);
    const Vec2 g = fs.finite_diff_gradient({1.0, 0.0});
    CHECK(std::abs(g.x1) < 1e-10);
    CHECK(std::abs(g.x2 - 1.0) < 1e-5); // O(h2^4)
}

TEST_CASE("finite_diff_gradient: one-sided stencil on x1^beta") {
    // documents the reduced accuracy of one-sided stencils on x1^0.5 near
    // the boundary; h chosen so 0.25 < 2 h1 triggers the one-sided rule
    auto axes = GridAxes::uniform(10, 1.1295, 16, -1.0, 1.0); // h1 = 0.1255
    const ScalarField f(axes, [](double x1, double) { return std::sqrt(x1); }, 2.0, true);
    const Vec2 g = f.finite_diff_gradient({0.25, 0.0});
    const double exact = 0.5 * std::pow(0.25, -0.5);
    CHECK(std::abs(g.x1 - exact) / exact < 0.05);
}

TEST_CASE("odd extension parity") {
    auto axes = GridAxes::uniform(33, 1.0, 33, -1.0, 1.0);
    const ScalarField f(axes, [](double x1, double x2) { return (1.0 + x1) * std::cos(x2); },
                        2.0, false);
    const EvenOddExtension odd(f, Parity::odd);
    const EvenOddExtension even(f, Parity::even);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 0.9);
    for (int k = 0; k < 50; ++k) {
        const double a = u(rng), b = u(rng) - 0.5;
        CHECK(odd.eval({-a, b}) == doctest::Approx(-odd.eval({a, b})).epsilon(1e-14));
        CHECK(even.eval({-a, b}) == doctest::Approx(even.eval({a, b})).epsilon(1e-14));
    }
}

TEST_CASE("stretched axes: geometry and local spacing") {
    auto axes = GridAxes::stretched_x1(0.002, 1.1, 0.05, 1.5, 64, -1.0, 1.0);
    CHECK(axes->x1().front() == 0.0);
    CHECK(axes->x1_max() >= 1.5);
    CHECK(axes->h1_min() == doctest::Approx(0.002));
    for (std::size_t i = 0; i + 1 < axes->x1().size(); ++i) {
        const double h = axes->x1()[i + 1] - axes->x1()[i];
        CHECK(h <= 0.05 * 1.0000001);
    }
    CHECK(axes->h1_local(0.0005) == doctest::Approx(0.002));
}

TEST_CASE("field csv round trip") {
    auto axes = GridAxes::uniform(16, 1.0, 20, -1.0, 1.0);
    const InitialData g = make_preset("interior_bump", {});
    const ScalarField f(axes, g.value, g.support_radius, false);
    write_field_csv(f, "/tmp/hpsqg_field.csv", 0.5, "/tmp/hpsqg_field.meta.json");
    const ScalarField back = read_field_csv("/tmp/hpsqg_field.csv", "/tmp/hpsqg_field.meta.json");
    CHECK(back.axes().n1() == 16);
    CHECK(back.support_radius() == f.support_radius());
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 20; ++j) CHECK(back.node(i, j) == f.node(i, j));
}
