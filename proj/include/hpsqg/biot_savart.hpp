#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "hpsqg/geometry.hpp"

namespace hpsqg {

/// Fractional order of the velocity law. alpha = 1 (the SQG endpoint) is
/// only conditionally integrable and must be acknowledged explicitly.
struct Alpha {
    double value;
    bool log_lipschitz_ack;
    explicit Alpha(double v, bool ack = false);
    bool is_endpoint() const { return value == 1.0; }
};

struct QuadratureConfig {
    /// Polar desingularization radius in units of the local source spacing.
    double inner_radius = 4.0;
    int polar_rings = 16;
    int polar_sectors = 32;
    double far_tolerance = 1e-8;
    void validate() const;
};

/// Velocity at a point with the boundary potential U2 carried separately.
struct VelocitySample {
    double u1 = 0.0;
    double u2_regular = 0.0; // u2 - U2
    double U2 = 0.0;
    double u2() const { return u2_regular + U2; }
    Vec2 total() const { return {u1, u2_regular + U2}; }
};

/// Velocity snapshot on the field grid. Components are interpolated with
/// the same bicubic rule as scalar fields.
struct VelocityGrid {
    AxesPtr axes;
    std::vector<double> u1, u2;
    std::vector<double> U2; // empty unless requested
    double time = 0.0;

    Vec2 eval(Vec2 p) const;
    double max_speed() const;
};

/// C_alpha = 2 * int (1+z^2)^(-(alpha/2+1)) dz, to 1e-10 absolute.
double c_alpha(double alpha);

/// Boundary potential U2(x) = -(2/alpha) * int trace(y2) / |x-(0,y2)|^alpha dy2.
/// Uses the analytic trace when the field carries one, otherwise cubic
/// interpolation of the first grid row. At x1 = 0 the integral converges
/// only for alpha < 1; otherwise a divergent-integral error is thrown.
double boundary_U2(const ScalarField& theta, Vec2 x, Alpha alpha,
                   double abs_tol = 1e-8);

/// Smooth boundary cutoff profile evaluated at z: 1 on [0,16], quintic
/// smoothstep down to 0 at 18.
using BoundaryProfile = std::function<double(double)>;
BoundaryProfile canonical_cutoff_profile();

/// Cutoff boundary potential f(x) = -(2/alpha) int |x-(0,z)|^(-alpha) phi(z) dz.
double f_cutoff(Vec2 x, double alpha, const BoundaryProfile& phi,
                double abs_tol = 1e-10);

/// C_alpha(x) = 2 int (1+z^2)^(-(1+alpha/2)) phi(x2 + x1 z) dz.
double c_alpha_at(Vec2 x, double alpha, const BoundaryProfile& phi,
                  double abs_tol = 1e-10);

/// Residual of the identity d1 f(x) = C_alpha(x) x1^(-alpha), with d1 f by a
/// centered difference. Exposed as a self-test of the cutoff pair.
double f_cutoff_identity_residual(Vec2 x, double alpha, const BoundaryProfile& phi);

/// Velocity of the reflected Biot-Savart law at one point: far zone by
/// tensor-grid quadrature of the smoothly split kernel, near zone by polar
/// desingularization with radial nodes graded as r ~ s^(1/(1-alpha)).
VelocitySample velocity(const ScalarField& theta, const HalfPlanePoint& x,
                        Alpha alpha, const QuadratureConfig& q);

/// Pure pointwise map over a target list; results are independent of the
/// worker count and bit-identical under permutation of the targets.
std::vector<VelocitySample> velocity_field(const ScalarField& theta,
                                           const std::vector<HalfPlanePoint>& targets,
                                           Alpha alpha, const QuadratureConfig& q);

/// Grid-snapshot evaluator used by the transport solver. Shares the far-zone
/// quadrature with velocity() through a cached per-grid kernel table driven
/// by row FFT convolutions; the near zone uses the same polar patch close to
/// the boundary and a gradient-based closure of the patch integral in the
/// interior. Cross-checked against velocity() in the test suite.
class VelocityEvaluator {
public:
    VelocityEvaluator(AxesPtr axes, Alpha alpha, QuadratureConfig q);
    ~VelocityEvaluator();
    VelocityEvaluator(const VelocityEvaluator&) = delete;
    VelocityEvaluator& operator=(const VelocityEvaluator&) = delete;

    VelocityGrid snapshot(const ScalarField& theta, double time = 0.0,
                          bool fill_U2 = false) const;

    const GridAxes& axes() const { return *axes_; }
    AxesPtr axes_ptr() const { return axes_; }
    Alpha alpha() const { return alpha_; }
    const QuadratureConfig& config() const { return q_; }

private:
    AxesPtr axes_;
    Alpha alpha_;
    QuadratureConfig q_;
    struct Table;
    std::unique_ptr<Table> table_;
};

void write_velocity_csv(const VelocityGrid& v, const std::string& path);

} // namespace hpsqg
