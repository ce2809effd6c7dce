#include "hpsqg/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace hpsqg {

VelocityProvider frozen_provider(const VelocityGrid& u) {
    return [&u](double, Vec2 x) { return u.eval(x); };
}

VelocityProvider pair_provider(const VelocityGrid& a, const VelocityGrid& b) {
    return [&a, &b](double t, Vec2 x) {
        const double span = b.time - a.time;
        const double w = span > 0.0 ? std::clamp((t - a.time) / span, 0.0, 1.0) : 0.0;
        const Vec2 ua = a.eval(x), ub = b.eval(x);
        return Vec2{(1.0 - w) * ua.x1 + w * ub.x1, (1.0 - w) * ua.x2 + w * ub.x2};
    };
}

VelocityProvider series_provider(const std::vector<VelocityGrid>& series) {
    if (series.empty()) throw std::invalid_argument("series_provider: empty series");
    return [&series](double t, Vec2 x) {
        if (t <= series.front().time || series.size() == 1) return series.front().eval(x);
        if (t >= series.back().time) return series.back().eval(x);
        std::size_t hi = 1;
        while (series[hi].time < t) ++hi;
        const VelocityGrid& a = series[hi - 1];
        const VelocityGrid& b = series[hi];
        const double w = (t - a.time) / (b.time - a.time);
        const Vec2 ua = a.eval(x), ub = b.eval(x);
        return Vec2{(1.0 - w) * ua.x1 + w * ub.x1, (1.0 - w) * ua.x2 + w * ub.x2};
    };
}

Vec2 rk4_step(const VelocityProvider& u, double t_from, double t_to, Vec2 x) {
    const double h = t_to - t_from;
    const Vec2 k1 = u(t_from, x);
    const Vec2 k2 = u(t_from + 0.5 * h, x + (0.5 * h) * k1);
    const Vec2 k3 = u(t_from + 0.5 * h, x + (0.5 * h) * k2);
    const Vec2 k4 = u(t_to, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

// Boundary-pinned variant: x1 = 0 is invariant (u1 vanishes there), so only
// the tangential coordinate moves.
Vec2 rk4_step_boundary(const VelocityProvider& u, double t_from, double t_to, double x2) {
    const double h = t_to - t_from;
    const double k1 = u(t_from, {0.0, x2}).x2;
    const double k2 = u(t_from + 0.5 * h, {0.0, x2 + 0.5 * h * k1}).x2;
    const double k3 = u(t_from + 0.5 * h, {0.0, x2 + 0.5 * h * k2}).x2;
    const double k4 = u(t_to, {0.0, x2 + h * k3}).x2;
    return {0.0, x2 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)};
}

} // namespace

FlowTrajectory integrate_flow(const VelocityProvider& u, const HalfPlanePoint& seed,
                              double t0, double t1, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_flow: dt must be positive");
    FlowTrajectory traj;
    traj.seed = seed.vec();
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const bool pinned = seed.x1 == 0.0;

    double t = t0;
    Vec2 x = seed.vec();
    traj.times.push_back(t);
    traj.positions.push_back(x);
    traj.velocities.push_back(pinned ? Vec2{0.0, u(t, x).x2} : u(t, x));

    while (dir * (t1 - t) > 1e-14 * std::max(1.0, std::abs(t1))) {
        const double h = std::min(dt, dir * (t1 - t));
        const double tn = t + dir * h;
        Vec2 xn;
        if (pinned) {
            xn = rk4_step_boundary(u, t, tn, x.x2);
        } else {
            xn = rk4_step(u, t, tn, x);
            if (xn.x1 < 0.0) {
                // retry with halved sub-steps before clamping
                double sub = 0.5;
                bool ok = false;
                for (; sub >= 1.0 / 16.0 - 1e-12; sub *= 0.5) {
                    Vec2 y = x;
                    double s = t;
                    bool neg = false;
                    while (dir * (tn - s) > 1e-16) {
                        const double hs = std::min(sub * h, dir * (tn - s));
                        y = rk4_step(u, s, s + dir * hs, y);
                        s += dir * hs;
                        if (y.x1 < 0.0) {
                            neg = true;
                            break;
                        }
                    }
                    if (!neg) {
                        xn = y;
                        ok = true;
                        break;
                    }
                }
                if (!ok) {
                    xn.x1 = 0.0;
                    ++traj.clamp_events;
                }
            }
        }
        t = tn;
        x = xn;
        traj.times.push_back(t);
        traj.positions.push_back(x);
        traj.velocities.push_back(pinned ? Vec2{0.0, u(t, x).x2} : u(t, x));
    }
    traj.unreliable = traj.clamp_events > 10;
    return traj;
}

HalfPlanePoint inverse_flow_foot(const VelocityProvider& u, const HalfPlanePoint& x,
                                 double t, double dt) {
    const FlowTrajectory back = integrate_flow(u, x, t, 0.0, dt);
    const Vec2 p = back.positions.back();
    return HalfPlanePoint(std::max(p.x1, 0.0), p.x2);
}

EnvelopeReport check_phi1_envelope(const FlowTrajectory& traj,
                                   const std::vector<double>& times,
                                   const std::vector<double>& x_alpha_norms) {
    if (times.size() != x_alpha_norms.size() || times.size() < 2)
        throw std::invalid_argument("check_phi1_envelope: norm history too short");
    EnvelopeReport rep;
    const double x10 = traj.positions.front().x1;
    if (x10 == 0.0) {
        rep.boundary_seed = true;
        return rep;
    }
    // integrated norm along the trajectory time stamps
    auto norm_at = [&](double t) {
        if (t <= times.front()) return x_alpha_norms.front();
        if (t >= times.back()) return x_alpha_norms.back();
        std::size_t hi = 1;
        while (times[hi] < t) ++hi;
        const double w = (t - times[hi - 1]) / (times[hi] - times[hi - 1]);
        return (1.0 - w) * x_alpha_norms[hi - 1] + w * x_alpha_norms[hi];
    };
    std::vector<double> cum(traj.times.size(), 0.0);
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double a = traj.times[k - 1], b = traj.times[k];
        cum[k] = cum[k - 1] + 0.5 * (norm_at(a) + norm_at(b)) * std::abs(b - a);
    }
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        if (cum[k] <= 0.0) continue;
        const double ratio = std::abs(std::log(traj.positions[k].x1 / x10));
        rep.C = std::max(rep.C, ratio / cum[k]);
    }
    // instantaneous rate violations against the fitted envelope
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double dn = cum[k] - cum[k - 1];
        if (dn <= 0.0) continue;
        const double rate = std::abs(std::log(traj.positions[k].x1 / traj.positions[k - 1].x1));
        if (rate > rep.C * dn * (1.0 + 1e-9) + 1e-13) ++rep.violations;
    }
    return rep;
}

void write_trajectory_csv(const FlowTrajectory& t, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
    os << "t,x1,x2,u1,u2\n" << std::setprecision(17);
    for (std::size_t k = 0; k < t.times.size(); ++k)
        os << t.times[k] << ',' << t.positions[k].x1 << ',' << t.positions[k].x2 << ','
           << t.velocities[k].x1 << ',' << t.velocities[k].x2 << '\n';
}

} // namespace hpsqg
