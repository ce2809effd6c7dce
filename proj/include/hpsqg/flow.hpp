#pragma once

#include <functional>
#include <vector>

#include "hpsqg/biot_savart.hpp"
#include "hpsqg/geometry.hpp"

namespace hpsqg {

/// Velocity source for trajectory integration: u(t, x). Implementations
/// must be safe for concurrent read-only evaluation.
using VelocityProvider = std::function<Vec2(double, Vec2)>;

VelocityProvider frozen_provider(const VelocityGrid& u);
/// Linear interpolation in time between two snapshots.
VelocityProvider pair_provider(const VelocityGrid& a, const VelocityGrid& b);
/// Linear interpolation across a time-sorted snapshot series (clamped ends).
VelocityProvider series_provider(const std::vector<VelocityGrid>& series);

/// Time-stamped Lagrangian marker path with per-step velocity records.
struct FlowTrajectory {
    Vec2 seed{};
    std::vector<double> times;
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;
    int clamp_events = 0;
    bool unreliable = false; // more than 10 clamp events
};

/// One classical RK4 stage over [t_from, t_to] (either direction).
Vec2 rk4_step(const VelocityProvider& u, double t_from, double t_to, Vec2 x);

/// Integrate dPhi/dt = u(t, Phi) from t0 to t1 (t1 < t0 integrates backward).
/// Steps that would cross the boundary are retried at dt/2 down to dt/16 and
/// then clamped to x1 = 0 with an event record; seeds exactly on x1 = 0 stay
/// on the boundary with u1 = 0 enforced analytically.
FlowTrajectory integrate_flow(const VelocityProvider& u, const HalfPlanePoint& seed,
                              double t0, double t1, double dt);

/// Backward foot point: integrates from (t, x) to time 0.
HalfPlanePoint inverse_flow_foot(const VelocityProvider& u, const HalfPlanePoint& x,
                                 double t, double dt);

/// Smallest C with x1 exp(-C * int norm) <= Phi1(t) <= x1 exp(+C * int norm)
/// at every recorded time; norm_history carries the per-time X^alpha norm.
struct EnvelopeReport {
    double C = 0.0;
    int violations = 0; // instantaneous rate above the fitted envelope
    bool boundary_seed = false;
};
EnvelopeReport check_phi1_envelope(const FlowTrajectory& traj,
                                   const std::vector<double>& times,
                                   const std::vector<double>& x_alpha_norms);

void write_trajectory_csv(const FlowTrajectory& t, const std::string& path);

} // namespace hpsqg
