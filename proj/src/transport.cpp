#include "hpsqg/transport.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "hpsqg/fit.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hpsqg {

namespace {

double support_threshold(double lo, double hi) {
    return 1e-10 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
}

} // namespace

TransportSolver::TransportSolver(AxesPtr axes, Alpha alpha, double beta, QuadratureConfig q,
                                 SolverOptions opts)
    : axes_(axes), alpha_(alpha), beta_(beta), q_(q), opts_(std::move(opts)),
      eval_(axes, alpha, q) {
    if (!(beta > 0.0) || !(beta <= 1.0))
        throw std::invalid_argument("TransportSolver: beta must lie in (0, 1]");
    const bool certified = alpha_.value <= 0.5 && beta_ >= alpha_.value &&
                           beta_ <= 1.0 - alpha_.value;
    if (!certified) {
        if (!opts_.exploratory)
            throw std::invalid_argument(
                "TransportSolver: outside the certified window alpha <= 1/2, "
                "beta in [alpha, 1-alpha]; set exploratory mode to proceed");
        std::cerr << "[hpsqg] warning: exploratory run outside the certified "
                     "(alpha, beta) window; no accuracy guarantees\n";
    }
}

SolverState TransportSolver::initial_state(const ScalarField& theta0) const {
    if (theta0.axes_ptr().get() != axes_.get())
        throw std::invalid_argument("TransportSolver: theta0 lives on a different grid");
    SolverState s;
    s.t = 0.0;
    s.theta = std::make_shared<ScalarField>(theta0);
    s.velocity = std::make_shared<VelocityGrid>(eval_.snapshot(theta0, 0.0));
    s.range_lo = theta0.min_value();
    s.range_hi = theta0.max_value();
    s.norm_beta = weighted_x_norm(theta0, beta_, opts_.pair_budget, opts_.seed);
    s.norm_alpha = weighted_x_norm(theta0, alpha_.value, opts_.pair_budget, opts_.seed);
    s.blowup = {0.0, s.norm_alpha.d2_sup, s.norm_alpha.weighted_d1};
    s.support_radius_est =
        theta0.support_radius_estimate(support_threshold(s.range_lo, s.range_hi));
    return s;
}

void TransportSolver::validate_cfl_and_support(const SolverState& s, double dt) const {
    const double vmax = s.velocity->max_speed();
    const double hmin = std::min(axes_->h1_min(), axes_->h2());
    if (dt * vmax > 0.5 * hmin) {
        std::ostringstream os;
        os << "TransportSolver::step: CFL accuracy bound violated: dt*|u| = " << dt * vmax
           << " > 0.5*min(h1,h2) = " << 0.5 * hmin << "; suggested dt <= "
           << 0.5 * hmin / vmax;
        throw std::runtime_error(os.str());
    }
    // support must stay clear of the outflow edges of the grid
    const GridAxes& g = *axes_;
    const double thr = support_threshold(s.range_lo, s.range_hi);
    const int n1 = g.n1(), n2 = g.n2();
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            if (std::abs(s.theta->node(i, j)) > thr &&
                (i >= n1 - 2 || j <= 1 || j >= n2 - 2)) {
                std::ostringstream os;
                os << "TransportSolver::step: support reached the grid edge near ("
                   << g.x1()[i] << ", " << g.x2()[j] << "); enlarge the grid box";
                throw std::runtime_error(os.str());
            }
}

std::vector<double> TransportSolver::semi_lagrangian_values(
    const ScalarField& theta, const VelocityProvider& provider, double t0, double t1,
    double lo, double hi, double* overshoot) const {
    const GridAxes& g = *axes_;
    const int n1 = g.n1(), n2 = g.n2();
    std::vector<double> vals(static_cast<std::size_t>(n1) * n2);
    double over = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : over)
#endif
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const Vec2 x{g.x1()[i], g.x2()[j]};
            Vec2 foot;
            if (x.x1 == 0.0) {
                // boundary is invariant under the flow
                const double h = t0 - t1;
                const double k1 = provider(t1, x).x2;
                const double k2 = provider(t1 + 0.5 * h, {0.0, x.x2 + 0.5 * h * k1}).x2;
                const double k3 = provider(t1 + 0.5 * h, {0.0, x.x2 + 0.5 * h * k2}).x2;
                const double k4 = provider(t0, {0.0, x.x2 + h * k3}).x2;
                foot = {0.0, x.x2 + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)};
            } else {
                foot = rk4_step(provider, t1, t0, x);
                if (foot.x1 < 0.0) foot.x1 = 0.0;
            }
            double v = theta.eval_or_zero(foot);
            if (v > hi) {
                over = std::max(over, v - hi);
                v = hi;
            } else if (v < lo) {
                over = std::max(over, lo - v);
                v = lo;
            }
            vals[static_cast<std::size_t>(i) * n2 + j] = v;
        }
    }
    if (overshoot) *overshoot = over;
    return vals;
}

ScalarField TransportSolver::advect(const ScalarField& theta, const VelocityProvider& u,
                                    double t0, double t1) const {
    std::vector<double> vals = semi_lagrangian_values(theta, u, t0, t1, theta.min_value(),
                                                      theta.max_value(), nullptr);
    return ScalarField(axes_, std::move(vals), theta.support_radius());
}

SolverState TransportSolver::step(const SolverState& s, double dt) const {
    if (!(dt > 0.0)) throw std::invalid_argument("TransportSolver::step: dt must be positive");
    validate_cfl_and_support(s, dt);
    const double t0 = s.t, t1 = s.t + dt;

    // predictor: frozen velocity
    const VelocityProvider frozen = frozen_provider(*s.velocity);
    std::vector<double> pred =
        semi_lagrangian_values(*s.theta, frozen, t0, t1, s.range_lo, s.range_hi, nullptr);
    const ScalarField theta_pred(axes_, std::move(pred), s.theta->support_radius());
    const VelocityGrid u_pred = eval_.snapshot(theta_pred, t1);

    // corrector: velocity linear in time across the step
    const VelocityProvider timeinterp = pair_provider(*s.velocity, u_pred);
    double overshoot = 0.0;
    std::vector<double> vals = semi_lagrangian_values(*s.theta, timeinterp, t0, t1,
                                                      s.range_lo, s.range_hi, &overshoot);

    SolverState out;
    out.t = t1;
    out.range_lo = s.range_lo;
    out.range_hi = s.range_hi;
    out.overshoot = overshoot;
    out.theta = std::make_shared<ScalarField>(axes_, std::move(vals), s.theta->support_radius());
    out.velocity = std::make_shared<VelocityGrid>(eval_.snapshot(*out.theta, t1));
    if (opts_.diagnostics_every_step) {
        out.norm_beta = weighted_x_norm(*out.theta, beta_, opts_.pair_budget, opts_.seed);
        out.norm_alpha = weighted_x_norm(*out.theta, alpha_.value, opts_.pair_budget, opts_.seed);
    }
    out.blowup = {t1, out.norm_alpha.d2_sup, out.norm_alpha.weighted_d1};
    out.support_radius_est =
        out.theta->support_radius_estimate(support_threshold(s.range_lo, s.range_hi));
    return out;
}

std::vector<SolverState> TransportSolver::simulate(const ScalarField& theta0, double T,
                                                   double dt) const {
    if (!(T > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("TransportSolver::simulate: T and dt must be positive");
    std::vector<SolverState> states;
    SolverState cur = initial_state(theta0);
    states.push_back(cur);
    int k = 0;
    double t = 0.0;
    while (t < T - 1e-12 * std::max(1.0, T)) {
        const double h = std::min(dt, T - t);
        SolverState next = step(cur, h);
        ++k;
        t = next.t;
        if (opts_.observer) {
            StepContext ctx{k, cur.t, next.t, *cur.velocity, *next.velocity, *next.theta};
            opts_.observer(ctx);
        }
        const bool store = (k % std::max(1, opts_.store_stride) == 0) || t >= T - 1e-12;
        if (store) states.push_back(next);
        cur = std::move(next);
    }
    return states;
}

TransportSolver::LinearRun TransportSolver::advect_linear(
    const ScalarField& theta0, const std::vector<VelocityGrid>& u_series, double T,
    double dt) const {
    LinearRun run;
    const double lo = theta0.min_value(), hi = theta0.max_value();
    auto cur = std::make_shared<const ScalarField>(theta0);
    run.fields.push_back(cur);
    run.times.push_back(0.0);
    const VelocityProvider prov = series_provider(u_series);
    double t = 0.0;
    while (t < T - 1e-12 * std::max(1.0, T)) {
        const double h = std::min(dt, T - t);
        std::vector<double> vals =
            semi_lagrangian_values(*cur, prov, t, t + h, lo, hi, nullptr);
        cur = std::make_shared<const ScalarField>(axes_, std::move(vals),
                                                  theta0.support_radius());
        t += h;
        run.fields.push_back(cur);
        run.times.push_back(t);
    }
    return run;
}

std::vector<PicardRecord> TransportSolver::picard(const ScalarField& theta0, double T,
                                                  double dt, int n_max) const {
    if (n_max < 3) throw std::invalid_argument("TransportSolver::picard: n_max must be >= 3");
    const double norm0 = weighted_x_norm(theta0, beta_, opts_.pair_budget, opts_.seed).x_beta_norm;

    // theta^(0) is constant in time: one snapshot replicated over the grid
    const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
    std::vector<double> times(steps + 1);
    for (int k = 0; k <= steps; ++k) times[k] = std::min(T, k * dt);

    std::vector<VelocityGrid> u_series(steps + 1);
    {
        const VelocityGrid u0 = eval_.snapshot(theta0, 0.0);
        for (int k = 0; k <= steps; ++k) {
            u_series[k] = u0;
            u_series[k].time = times[k];
        }
    }

    std::vector<std::shared_ptr<const ScalarField>> prev_fields(steps + 1,
        std::make_shared<const ScalarField>(theta0));

    std::vector<PicardRecord> records;
    for (int n = 0; n < n_max; ++n) {
        LinearRun run = advect_linear(theta0, u_series, T, dt);

        for (std::size_t k = 0; k < run.fields.size(); ++k) {
            const double nb =
                weighted_x_norm(*run.fields[k], beta_, opts_.pair_budget, opts_.seed).x_beta_norm;
            if (nb > 10.0 * norm0) {
                std::ostringstream os;
                os << "TransportSolver::picard: inductive bound violated at iterate n = "
                   << n + 1 << " (X^beta norm " << nb << " > 10 * " << norm0 << ")";
                throw std::runtime_error(os.str());
            }
        }

        PicardRecord rec;
        rec.n = n;
        rec.l2_diff = l2_distance(*run.fields.back(), *prev_fields.back());
        rec.x_beta =
            weighted_x_norm(*run.fields.back(), beta_, opts_.pair_budget, opts_.seed).x_beta_norm;
        records.push_back(rec);

        // refresh the velocity history from the new iterate
        for (int k = 0; k <= steps; ++k)
            u_series[k] = eval_.snapshot(*run.fields[static_cast<std::size_t>(k)], times[k]);
        prev_fields = run.fields;
    }
    return records;
}

BlowupFit blowup_fit(const std::vector<BlowupMonitor>& history, double t_lo, double t_hi) {
    std::vector<double> t, y;
    for (const auto& m : history)
        if (m.t >= t_lo && m.t <= t_hi) {
            t.push_back(m.t);
            y.push_back(m.d2_sup);
        }
    if (t.size() < 5)
        throw std::runtime_error("blowup_fit: need at least 5 samples in the window");
    for (std::size_t k = 1; k < y.size(); ++k)
        if (!(y[k] > y[k - 1]))
            throw std::runtime_error("blowup_fit: d2_sup not strictly increasing; fit refused");

    // least squares over (eta, T): line fit of log y vs log(T - t), T scanned
    const double span = t.back() - t.front();
    BlowupFit best;
    best.residual = 1e300;
    for (int pass = 0; pass < 2; ++pass) {
        const double lo = (pass == 0) ? t.back() + 1e-6 * span : best.T_fit - 0.05 * span;
        const double hi = (pass == 0) ? t.back() + 10.0 * span : best.T_fit + 0.05 * span;
        const int npts = (pass == 0) ? 400 : 200;
        for (int i = 0; i <= npts; ++i) {
            const double T = lo + (hi - lo) * i / npts;
            if (T <= t.back()) continue;
            std::vector<double> lx(t.size()), ly(t.size());
            for (std::size_t k = 0; k < t.size(); ++k) {
                lx[k] = std::log(T - t[k]);
                ly[k] = std::log(y[k]);
            }
            const LineFit f = fit_line(lx, ly);
            if (f.residual_rms < best.residual) {
                best.residual = f.residual_rms;
                best.eta = -f.slope;
                best.T_fit = T;
            }
        }
    }
    return best;
}

double l2_distance(const ScalarField& a, const ScalarField& b) {
    if (a.axes_ptr().get() != b.axes_ptr().get())
        throw std::invalid_argument("l2_distance: fields live on different grids");
    const GridAxes& g = a.axes();
    double acc = 0.0;
    for (int i = 0; i < g.n1(); ++i) {
        const double wi = g.w1()[i];
        double row = 0.0;
        for (int j = 0; j < g.n2(); ++j) {
            const double d = a.node(i, j) - b.node(i, j);
            row += d * d * g.w2(j);
        }
        acc += wi * row;
    }
    return std::sqrt(acc);
}

} // namespace hpsqg
