#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "hpsqg/geometry.hpp"

namespace hpsqg {

/// Analytic initial-data preset: value, exact gradient, and the radius of a
/// ball at the origin containing the support.
struct InitialData {
    AnalyticFn value;
    std::function<Vec2(double, double)> gradient;
    double support_radius = 0.0;
    std::string name;
};

/// Quintic smoothstep: 0 for s<=0, 1 for s>=1, C^2 across the seams.
double smoothstep(double s);
double smoothstep_deriv(double s);

/// Radial plateau profile: 1 on [0,r0], smooth descent to 0 at r1.
double plateau(double r, double r0, double r1);
double plateau_deriv(double r, double r0, double r1);

/// Available presets:
///   zero
///   gaussian          (center1, center2, sigma, amplitude)
///   interior_bump     (center1, center2, r0, r1, amplitude) - clear of the boundary
///   boundary_bump     (r0, r1, amplitude) - centered at the origin, even trace
///   kink_trace        (r0, r1, kink) - boundary bump with a |x2| crease in the trace
///   inflation_canonical (r0, r1, tilt) - trace 1 + tilt*x2 near the anchor (0,0)
///   inflation_control   (same, lift0, lift1) - canonical shape vanishing near x1=0
///   two_bump          (c1, c2, r0, r1, amplitude) - mirror pair straddling x2=0
InitialData make_preset(const std::string& name, const nlohmann::json& params);

} // namespace hpsqg
