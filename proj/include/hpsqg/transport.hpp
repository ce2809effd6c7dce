#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hpsqg/biot_savart.hpp"
#include "hpsqg/flow.hpp"
#include "hpsqg/geometry.hpp"
#include "hpsqg/norms.hpp"

namespace hpsqg {

struct BlowupMonitor {
    double t = 0.0;
    double d2_sup = 0.0;    // sup |d2 theta|
    double wd1_alpha = 0.0; // sup x1^(1-alpha) |d1 theta|
};

struct SolverState {
    double t = 0.0;
    std::shared_ptr<const ScalarField> theta;
    std::shared_ptr<const VelocityGrid> velocity;
    NormReport norm_beta;
    NormReport norm_alpha;
    BlowupMonitor blowup;
    double support_radius_est = 0.0;
    double overshoot = 0.0; // interpolation overshoot magnitude before clipping
    double range_lo = 0.0, range_hi = 0.0; // initial-data range used for clipping
};

struct PicardRecord {
    int n = 0;
    double l2_diff = 0.0; // ||theta^(n+1) - theta^(n)||_L2 at the final time
    double x_beta = 0.0;
};

struct BlowupFit {
    double eta = 0.0;
    double T_fit = 0.0;
    double residual = 0.0;
};

/// Per-step hook: both snapshots bracketing the step and the updated field.
struct StepContext {
    int step_index;
    double t_before, t_after;
    const VelocityGrid& u_before;
    const VelocityGrid& u_after;
    const ScalarField& theta_after;
};

struct SolverOptions {
    int store_stride = 1; // keep every k-th state in the returned sequence
    bool exploratory = false;
    int pair_budget = 20000;
    std::uint64_t seed = 12345;
    std::function<void(const StepContext&)> observer;
    bool diagnostics_every_step = true;
};

/// Semi-Lagrangian transport of theta under its own reflected Biot-Savart
/// velocity. The scheme mirrors theta(t) = theta0 o Phi_t^{-1}: backward RK4
/// feet, bicubic interpolation at the feet, clipping to the initial range,
/// and a predictor-corrector velocity refresh (two snapshots per step).
class TransportSolver {
public:
    TransportSolver(AxesPtr axes, Alpha alpha, double beta, QuadratureConfig q,
                    SolverOptions opts = {});

    const VelocityEvaluator& evaluator() const { return eval_; }
    double beta() const { return beta_; }
    Alpha alpha() const { return alpha_; }

    /// Initial state with diagnostics and velocity snapshot at t = 0.
    SolverState initial_state(const ScalarField& theta0) const;

    /// One step: CFL and support-margin validation, predictor-corrector
    /// feet, range clipping, fresh velocity snapshot, diagnostics.
    SolverState step(const SolverState& s, double dt) const;

    /// Linear transport kernel: one semi-Lagrangian step of theta under a
    /// given velocity, clipped to theta's own range. Used by the Picard
    /// iterates and directly testable against exact transports.
    ScalarField advect(const ScalarField& theta, const VelocityProvider& u, double t0,
                       double t1) const;

    /// March to time T with steps of dt (final step shortened to land on T).
    std::vector<SolverState> simulate(const ScalarField& theta0, double T, double dt) const;

    /// Picard iteration: each iterate solves the linear transport problem
    /// against the previous iterate's frozen velocity history; records
    /// ||D^(n)||_L2 at the final time. Aborts when an iterate's X^beta norm
    /// exceeds 10x the initial one.
    std::vector<PicardRecord> picard(const ScalarField& theta0, double T, double dt,
                                     int n_max) const;

private:
    struct LinearRun {
        std::vector<std::shared_ptr<const ScalarField>> fields; // at step times
        std::vector<double> times;
    };
    LinearRun advect_linear(const ScalarField& theta0, const std::vector<VelocityGrid>& u_series,
                            double T, double dt) const;
    std::vector<double> semi_lagrangian_values(const ScalarField& theta,
                                               const VelocityProvider& provider,
                                               double t0, double t1, double lo, double hi,
                                               double* overshoot) const;
    void validate_cfl_and_support(const SolverState& s, double dt) const;

    AxesPtr axes_;
    Alpha alpha_;
    double beta_;
    QuadratureConfig q_;
    SolverOptions opts_;
    VelocityEvaluator eval_;
};

/// Least-squares fit of log d2_sup against -eta log(T - t) over the window;
/// refuses non-monotone histories.
BlowupFit blowup_fit(const std::vector<BlowupMonitor>& history, double t_lo, double t_hi);

/// L2 distance of two fields on the same axes (half-plane cell measure).
double l2_distance(const ScalarField& a, const ScalarField& b);

} // namespace hpsqg
