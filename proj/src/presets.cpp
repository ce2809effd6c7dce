#include "hpsqg/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace hpsqg {

double smoothstep(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstep_deriv(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

double plateau(double r, double r0, double r1) {
    if (r <= r0) return 1.0;
    if (r >= r1) return 0.0;
    return 1.0 - smoothstep((r - r0) / (r1 - r0));
}

double plateau_deriv(double r, double r0, double r1) {
    if (r <= r0 || r >= r1) return 0.0;
    return -smoothstep_deriv((r - r0) / (r1 - r0)) / (r1 - r0);
}

namespace {

double get(const nlohmann::json& p, const char* key, double dflt) {
    return p.contains(key) ? p.at(key).get<double>() : dflt;
}

InitialData radial_bump(double c1, double c2, double r0, double r1, double amp) {
    InitialData d;
    d.value = [=](double x1, double x2) {
        return amp * plateau(std::hypot(x1 - c1, x2 - c2), r0, r1);
    };
    d.gradient = [=](double x1, double x2) -> Vec2 {
        const double dx = x1 - c1, dy = x2 - c2;
        const double r = std::hypot(dx, dy);
        if (r <= r0 || r >= r1) return {0.0, 0.0};
        const double dp = amp * plateau_deriv(r, r0, r1) / r;
        return {dp * dx, dp * dy};
    };
    d.support_radius = std::hypot(c1, c2) + r1;
    return d;
}

} // namespace

InitialData make_preset(const std::string& name, const nlohmann::json& p) {
    InitialData d;
    d.name = name;
    if (name == "zero") {
        d.value = [](double, double) { return 0.0; };
        d.gradient = [](double, double) -> Vec2 { return {0.0, 0.0}; };
        d.support_radius = 0.1;
        return d;
    }
    if (name == "gaussian") {
        const double c1 = get(p, "center1", 0.8), c2 = get(p, "center2", 0.0);
        const double s = get(p, "sigma", 0.12), a = get(p, "amplitude", 1.0);
        d.value = [=](double x1, double x2) {
            const double q = ((x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2)) / (2 * s * s);
            return a * std::exp(-q);
        };
        d.gradient = [=](double x1, double x2) -> Vec2 {
            const double q = ((x1 - c1) * (x1 - c1) + (x2 - c2) * (x2 - c2)) / (2 * s * s);
            const double v = a * std::exp(-q);
            return {-v * (x1 - c1) / (s * s), -v * (x2 - c2) / (s * s)};
        };
        d.support_radius = std::hypot(c1, c2) + 8 * s;
        d.name = name;
        return d;
    }
    if (name == "interior_bump") {
        d = radial_bump(get(p, "center1", 0.55), get(p, "center2", 0.0),
                        get(p, "r0", 0.15), get(p, "r1", 0.35), get(p, "amplitude", 1.0));
        d.name = name;
        return d;
    }
    if (name == "boundary_bump") {
        d = radial_bump(0.0, 0.0, get(p, "r0", 0.35), get(p, "r1", 0.8),
                        get(p, "amplitude", 1.0));
        d.name = name;
        return d;
    }
    if (name == "kink_trace") {
        // Boundary bump whose trace has a Lipschitz crease at x2 = 0:
        // bounded d2 theta with a jump, the case driving the sharp dU2 rate.
        const double r0 = get(p, "r0", 0.35), r1 = get(p, "r1", 0.8);
        const double k = get(p, "kink", 0.75);
        d.value = [=](double x1, double x2) {
            return plateau(std::hypot(x1, x2), r0, r1) * (1.0 - k * std::abs(x2));
        };
        d.gradient = [=](double x1, double x2) -> Vec2 {
            const double r = std::hypot(x1, x2);
            const double qp = (r > 0) ? plateau_deriv(r, r0, r1) / r : 0.0;
            const double g = 1.0 - k * std::abs(x2);
            const double sgn = (x2 > 0) - (x2 < 0);
            return {qp * x1 * g, qp * x2 * g - k * sgn * plateau(r, r0, r1)};
        };
        d.support_radius = r1;
        d.name = name;
        return d;
    }
    if (name == "inflation_canonical") {
        // Anchor convention theta0(0,0)=1, d2 theta0(0,0)=tilt>0.
        const double r0 = get(p, "r0", 0.45), r1 = get(p, "r1", 0.9);
        const double tilt = get(p, "tilt", 1.0);
        d.value = [=](double x1, double x2) {
            return plateau(std::hypot(x1, x2), r0, r1) * (1.0 + tilt * x2);
        };
        d.gradient = [=](double x1, double x2) -> Vec2 {
            const double r = std::hypot(x1, x2);
            const double qp = (r > 0) ? plateau_deriv(r, r0, r1) / r : 0.0;
            const double g = 1.0 + tilt * x2;
            return {qp * x1 * g, qp * x2 * g + tilt * plateau(r, r0, r1)};
        };
        d.support_radius = r1;
        d.name = name;
        return d;
    }
    if (name == "inflation_control") {
        // Same macroscopic shape but vanishing identically near the boundary.
        const double r0 = get(p, "r0", 0.45), r1 = get(p, "r1", 0.9);
        const double tilt = get(p, "tilt", 1.0);
        const double a = get(p, "lift0", 0.05), b = get(p, "lift1", 0.25);
        d.value = [=](double x1, double x2) {
            return plateau(std::hypot(x1, x2), r0, r1) * (1.0 + tilt * x2) *
                   smoothstep((x1 - a) / (b - a));
        };
        d.gradient = [=](double x1, double x2) -> Vec2 {
            const double r = std::hypot(x1, x2);
            const double qp = (r > 0) ? plateau_deriv(r, r0, r1) / r : 0.0;
            const double q = plateau(r, r0, r1);
            const double g = 1.0 + tilt * x2;
            const double u = smoothstep((x1 - a) / (b - a));
            const double du = smoothstep_deriv((x1 - a) / (b - a)) / (b - a);
            return {(qp * x1 * g) * u + q * g * du, (qp * x2 * g + tilt * q) * u};
        };
        d.support_radius = r1;
        d.name = name;
        return d;
    }
    if (name == "two_bump") {
        const double c1 = get(p, "c1", 0.3), c2 = get(p, "c2", 0.35);
        const double r0 = get(p, "r0", 0.1), r1 = get(p, "r1", 0.26);
        const double a = get(p, "amplitude", 1.0);
        const InitialData up = radial_bump(c1, c2, r0, r1, a);
        const InitialData dn = radial_bump(c1, -c2, r0, r1, a);
        d.value = [=](double x1, double x2) { return up.value(x1, x2) + dn.value(x1, x2); };
        d.gradient = [=](double x1, double x2) -> Vec2 {
            const Vec2 g1 = up.gradient(x1, x2), g2 = dn.gradient(x1, x2);
            return {g1.x1 + g2.x1, g1.x2 + g2.x2};
        };
        d.support_radius = std::max(up.support_radius, dn.support_radius);
        d.name = name;
        return d;
    }
    throw std::invalid_argument("make_preset: unknown preset '" + name + "'");
}

} // namespace hpsqg
