#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hpsqg {

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
double norm(Vec2 a);

/// Point in the closed right half-plane; construction rejects x1 < 0.
struct HalfPlanePoint {
    double x1;
    double x2;
    HalfPlanePoint(double a, double b);
    Vec2 vec() const { return {x1, x2}; }
};

/// Mirror across the boundary {x1 = 0}. An involution on the full plane.
inline Vec2 reflect(Vec2 p) { return {-p.x1, p.x2}; }
inline Vec2 reflect(const HalfPlanePoint& p) { return {-p.x1, p.x2}; }

/// Tensor grid over [x1.front(), x1.back()] x [x2.front(), x2.back()].
/// x1 may be geometrically stretched toward the boundary; x2 is uniform.
class GridAxes {
public:
    static std::shared_ptr<const GridAxes> uniform(int n1, double x1max,
                                                   int n2, double x2min, double x2max);
    /// Stretched x1 axis: first cell h1min, geometric growth by `ratio`
    /// capped at h1max, extended to cover x1max. x2 uniform.
    static std::shared_ptr<const GridAxes> stretched_x1(double h1min, double ratio,
                                                        double h1max, double x1max,
                                                        int n2, double x2min, double x2max);
    static std::shared_ptr<const GridAxes> from_nodes(std::vector<double> x1_nodes,
                                                      int n2, double x2min, double x2max);

    const std::vector<double>& x1() const { return x1_; }
    const std::vector<double>& x2() const { return x2_; }
    int n1() const { return static_cast<int>(x1_.size()); }
    int n2() const { return static_cast<int>(x2_.size()); }
    double h2() const { return h2_; }
    double h1_min() const { return h1_min_; }
    double h1_max() const { return h1_max_; }
    /// Local x1 spacing at coordinate v (size of the enclosing cell).
    double h1_local(double v) const;
    bool x1_uniform() const { return x1_uniform_; }

    double x1_max() const { return x1_.back(); }
    double x2_min() const { return x2_.front(); }
    double x2_max() const { return x2_.back(); }
    bool contains(Vec2 p) const;

    /// Index of the cell containing v along the given axis (clamped).
    int cell_x1(double v) const;
    int cell_x2(double v) const;

    /// Trapezoid weights for half-plane integrals; boundary row carries a
    /// half-cell weight, consistent with the odd-extension convention.
    const std::vector<double>& w1() const { return w1_; }
    double w2(int j) const;

private:
    GridAxes() = default;
    void finalize();
    std::vector<double> x1_, x2_, w1_;
    double h2_ = 0.0, h1_min_ = 0.0, h1_max_ = 0.0;
    bool x1_uniform_ = true;
};

using AxesPtr = std::shared_ptr<const GridAxes>;

/// Cubic Lagrange interpolation weights for 4 consecutive nodes t[0..3]
/// evaluated at v. Exact for cubics; 4th-order on smooth data.
std::array<double, 4> cubic_weights(const double* t, double v);

/// Fornberg finite-difference weights: derivative of given order at z from
/// the nodes t[0..m-1]. Used for the non-uniform derivative sweeps.
std::vector<double> fd_weights(double z, const double* t, int m, int order);

/// Bicubic interpolation of a node array on the given axes; coordinates are
/// clamped into the grid box.
double interp_bicubic(const GridAxes& g, const double* values, Vec2 p);

using AnalyticFn = std::function<double(double, double)>;

/// Grid-sampled active scalar on the half-plane with compact-support
/// metadata. Immutable after construction: every evaluation is pure and
/// safe to call concurrently.
class ScalarField {
public:
    ScalarField(AxesPtr axes, std::vector<double> values, double support_radius,
                AnalyticFn analytic = nullptr);
    ScalarField(AxesPtr axes, const AnalyticFn& f, double support_radius,
                bool keep_analytic = true);

    const GridAxes& axes() const { return *axes_; }
    AxesPtr axes_ptr() const { return axes_; }
    const std::vector<double>& values() const { return values_; }
    double node(int i1, int i2) const { return values_[static_cast<std::size_t>(i1) * axes_->n2() + i2]; }
    double support_radius() const { return support_radius_; }
    const AnalyticFn& analytic() const { return analytic_; }

    /// Bicubic interpolation inside the grid box; exact at nodes. Outside
    /// the box, falls back to the analytic source when attached, otherwise
    /// throws std::domain_error.
    double eval(Vec2 p) const;
    double eval(const HalfPlanePoint& p) const { return eval(p.vec()); }
    /// Quadrature helper: zero outside the grid box (valid under the
    /// compact-support invariant), no analytic fallback.
    double eval_or_zero(Vec2 p) const;

    /// Gradient by finite differences of eval(): 4th-order centered in the
    /// interior, 2nd-order one-sided in x1 within two cells of the boundary.
    Vec2 finite_diff_gradient(Vec2 p) const;

    double min_value() const;
    double max_value() const;
    double sup_norm() const;
    /// Discrete L2 with the half-plane cell measure.
    double l2_norm() const;
    /// Radius of the smallest ball at the origin containing all nodes with
    /// |value| > threshold.
    double support_radius_estimate(double threshold) const;

    /// Boundary trace theta(0, x2): analytic source when attached, else
    /// cubic interpolation along the first grid row.
    double trace(double y2) const;

private:
    double interp(Vec2 p) const;
    AxesPtr axes_;
    std::vector<double> values_;
    double support_radius_;
    AnalyticFn analytic_;
};

/// Even or odd extension of a field across {x1 = 0}.
enum class Parity { odd, even };

class EvenOddExtension {
public:
    EvenOddExtension(const ScalarField& base, Parity parity)
        : base_(&base), parity_(parity) {}
    double eval(Vec2 p) const {
        if (p.x1 >= 0.0) return base_->eval_or_zero(p);
        const double v = base_->eval_or_zero({-p.x1, p.x2});
        return parity_ == Parity::odd ? -v : v;
    }
    Parity parity() const { return parity_; }

private:
    const ScalarField* base_;
    Parity parity_;
};

/// CSV serialization: header `x1,x2,value`, row-major grid order, plus a
/// JSON sidecar (grid bounds, spacings, support radius, alpha of the run).
void write_field_csv(const ScalarField& f, const std::string& path,
                     double alpha, const std::string& sidecar_path);
ScalarField read_field_csv(const std::string& path, const std::string& sidecar_path);

} // namespace hpsqg
