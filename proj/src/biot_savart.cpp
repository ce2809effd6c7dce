#include "hpsqg/biot_savart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "hpsqg/fft.hpp"
#include "hpsqg/presets.hpp"
#include "hpsqg/quad1d.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hpsqg {

using fft::cplx;

Alpha::Alpha(double v, bool ack) : value(v), log_lipschitz_ack(ack) {
    if (!(v > 0.0) || !(v <= 1.0))
        throw std::domain_error("Alpha: value must lie in (0, 1], got " + std::to_string(v));
}

void QuadratureConfig::validate() const {
    if (inner_radius < 2.0)
        throw std::invalid_argument("QuadratureConfig: inner_radius must be >= 2 source cells");
    if (polar_rings < 8 || polar_sectors < 8)
        throw std::invalid_argument("QuadratureConfig: polar_rings and polar_sectors must be >= 8");
    if (!(far_tolerance > 0.0))
        throw std::invalid_argument("QuadratureConfig: far_tolerance must be positive");
}

namespace {

void require_supported(Alpha a) {
    if (a.is_endpoint() && !a.log_lipschitz_ack)
        throw std::runtime_error(
            "unsupported-mode: alpha = 1 requires the log_lipschitz mode acknowledgement");
}

// Kernel splitting blend: 0 at the singularity, 1 beyond the patch radius,
// C^3 at both seams so the far-zone trapezoid sum stays high order.
inline double chi(double rho) {
    if (rho <= 0.0) return 0.0;
    if (rho >= 1.0) return 1.0;
    const double r2 = rho * rho;
    return r2 * r2 * (35.0 + rho * (-84.0 + rho * (70.0 - 20.0 * rho)));
}

inline double patch_radius(const GridAxes& g, double x1, const QuadratureConfig& q) {
    return q.inner_radius * std::max(g.h1_local(std::clamp(x1, 0.0, g.x1_max())), g.h2());
}

// Polar node pattern of the near-zone patch around x: radius R, radial
// nodes equi-distributing the r^(-alpha) weight, rings crossing the
// boundary split at the intersection angles. emit(z, w1, w2) receives the
// offset and the component weights so that the patch equals
// sum w_c * thetabar(x + z).
template <class F>
void polar_pattern(Vec2 x, double R, Alpha a, const QuadratureConfig& q, F&& emit) {
    const int K = q.polar_rings, J = q.polar_sectors;
    if (a.is_endpoint()) {
        // conditionally integrable kernel: pair opposite sectors so the odd
        // part cancels analytically
        const double dr = R / K;
        const int JP = std::max(4, J / 2);
        const double dphi = M_PI / JP;
        for (int k = 0; k < K; ++k) {
            const double r = (k + 0.5) * dr;
            const double wr = (1.0 - chi(r / R)) / r * dr;
            for (int j = 0; j < JP; ++j) {
                const double phi = (j + 0.5) * dphi;
                const double c = std::cos(phi), s = std::sin(phi);
                const double w = wr * dphi;
                emit(Vec2{r * c, r * s}, s * w, -c * w);
                emit(Vec2{-r * c, -r * s}, -s * w, c * w);
            }
        }
        return;
    }
    const double one_m_a = 1.0 - a.value;
    const double S = std::pow(R, one_m_a);
    const double ds = S / K;
    for (int k = 0; k < K; ++k) {
        const double s = (k + 0.5) * ds;
        const double r = std::pow(s, 1.0 / one_m_a);
        const double wr = ds / one_m_a * (1.0 - chi(r / R));
        if (wr == 0.0) continue;
        auto arc = [&](double phi0, double phi1, int n) {
            const double dphi = (phi1 - phi0) / n;
            for (int j = 0; j < n; ++j) {
                const double phi = phi0 + (j + 0.5) * dphi;
                const double c = std::cos(phi), sn = std::sin(phi);
                const double w = wr * dphi;
                emit(Vec2{r * c, r * sn}, sn * w, -c * w);
            }
        };
        if (x.x1 >= r) {
            arc(-M_PI, M_PI, J);
        } else {
            const double phis = std::acos(std::clamp(-x.x1 / r, -1.0, 1.0));
            const int jr = std::clamp(static_cast<int>(std::lround(J * phis / M_PI)), 2, J - 2);
            arc(-phis, phis, jr);
            arc(phis, 2.0 * M_PI - phis, J - jr);
        }
    }
}

Vec2 near_patch(const ScalarField& th, Vec2 x, double R, Alpha a,
                const QuadratureConfig& q) {
    const EvenOddExtension ext(th, Parity::odd);
    double acc1 = 0.0, acc2 = 0.0;
    polar_pattern(x, R, a, q, [&](Vec2 z, double w1, double w2) {
        const double v = ext.eval(x + z);
        acc1 += w1 * v;
        acc2 += w2 * v;
    });
    return {acc1, acc2};
}

// Far zone: tensor-grid trapezoid sum of the chi-split kernel over the
// sources and their mirror images.
Vec2 far_sum(const ScalarField& th, Vec2 x, Alpha a, double R) {
    const GridAxes& g = th.axes();
    const int n1 = g.n1(), n2 = g.n2();
    const double ex = 1.0 + 0.5 * a.value;
    double acc1 = 0.0, acc2 = 0.0;
    for (int i = 0; i < n1; ++i) {
        const double y1 = g.x1()[i];
        const double da = x.x1 - y1;
        const double db = x.x1 + y1;
        const double wi = g.w1()[i];
        for (int j = 0; j < n2; ++j) {
            const double v = th.node(i, j);
            if (v == 0.0) continue;
            const double w = wi * g.w2(j) * v;
            const double d2 = x.x2 - g.x2()[j];
            const double r2a = da * da + d2 * d2;
            if (r2a > 0.0) {
                const double Ma = chi(std::sqrt(r2a) / R) / std::pow(r2a, ex);
                acc1 -= d2 * Ma * w;
                acc2 += da * Ma * w;
            }
            const double r2b = db * db + d2 * d2;
            if (r2b > 0.0) {
                const double Mb = chi(std::sqrt(r2b) / R) / std::pow(r2b, ex);
                acc1 += d2 * Mb * w;
                acc2 -= db * Mb * w;
            }
        }
    }
    return {acc1, acc2};
}

double trace_integral_smooth(const ScalarField& th, Vec2 x, double a, double tol) {
    // x1 > 0: peaked but regular integrand, split at the peak.
    const double Rs = th.support_radius();
    auto f = [&](double y2) {
        const double d = x.x2 - y2;
        return th.trace(y2) * std::pow(x.x1 * x.x1 + d * d, -0.5 * a);
    };
    if (x.x2 > -Rs && x.x2 < Rs)
        return quad1d::adaptive(f, -Rs, x.x2, 0.5 * tol) +
               quad1d::adaptive(f, x.x2, Rs, 0.5 * tol);
    return quad1d::adaptive(f, -Rs, Rs, tol);
}

double trace_integral_boundary(const ScalarField& th, Vec2 x, double a, double tol) {
    // x1 = 0, alpha < 1: |x2-y2|^(-a) endpoint singularity removed by the
    // substitution u = s^(1-a) on each side of the peak.
    const double Rs = th.support_radius();
    const double oma = 1.0 - a;
    double total = 0.0;
    const double right = Rs - x.x2;
    if (right > 0.0) {
        auto fr = [&](double u) { return th.trace(x.x2 + std::pow(u, 1.0 / oma)); };
        total += quad1d::adaptive(fr, 0.0, std::pow(right, oma), 0.5 * tol) / oma;
    }
    const double left = x.x2 + Rs;
    if (left > 0.0) {
        auto fl = [&](double u) { return th.trace(x.x2 - std::pow(u, 1.0 / oma)); };
        total += quad1d::adaptive(fl, 0.0, std::pow(left, oma), 0.5 * tol) / oma;
    }
    return total;
}

} // namespace

double c_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw std::domain_error("c_alpha: alpha must lie in (0, 1]");
    const double ex = 1.0 + 0.5 * alpha;
    auto core = [&](double z) { return std::pow(1.0 + z * z, -ex); };
    auto tail = [&](double w) { return std::pow(w, alpha) * std::pow(1.0 + w * w, -ex); };
    const double inner = quad1d::adaptive(core, -1.0, 1.0, 1e-12);
    const double outer = quad1d::adaptive(tail, 0.0, 1.0, 1e-12);
    return 2.0 * inner + 4.0 * outer;
}

double boundary_U2(const ScalarField& theta, Vec2 x, Alpha alpha, double abs_tol) {
    if (x.x1 < 0.0) throw std::domain_error("boundary_U2: x1 must be >= 0");
    const double a = alpha.value;
    const double scaled_tol = std::max(abs_tol * a / 2.0, 1e-14);
    double integral;
    if (x.x1 > 0.0) {
        integral = trace_integral_smooth(theta, x, a, scaled_tol);
    } else {
        if (a >= 1.0 && theta.trace(x.x2) != 0.0)
            throw std::domain_error(
                "boundary_U2: divergent integral at x1 = 0 with nonzero trace for alpha >= 1");
        if (a < 1.0)
            integral = trace_integral_boundary(theta, x, a, scaled_tol);
        else
            integral = trace_integral_smooth(theta, x, a, scaled_tol);
    }
    return -2.0 / a * integral;
}

BoundaryProfile canonical_cutoff_profile() {
    return [](double z) { return plateau(std::abs(z), 16.0, 18.0); };
}

double f_cutoff(Vec2 x, double alpha, const BoundaryProfile& phi, double abs_tol) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw std::domain_error("f_cutoff: alpha must lie in (0, 1]");
    if (x.x1 < 0.0) throw std::domain_error("f_cutoff: x1 must be >= 0");
    const double B = 18.0;
    const double tol = std::max(abs_tol * alpha / 2.0, 1e-14);
    double integral;
    if (x.x1 > 0.0) {
        auto f = [&](double z) {
            const double d = x.x2 - z;
            return phi(z) * std::pow(x.x1 * x.x1 + d * d, -0.5 * alpha);
        };
        if (x.x2 > -B && x.x2 < B)
            integral = quad1d::adaptive(f, -B, x.x2, 0.5 * tol) +
                       quad1d::adaptive(f, x.x2, B, 0.5 * tol);
        else
            integral = quad1d::adaptive(f, -B, B, tol);
    } else {
        if (alpha >= 1.0 && phi(x.x2) != 0.0)
            throw std::domain_error("f_cutoff: divergent integral at x1 = 0 for alpha >= 1");
        const double oma = 1.0 - alpha;
        integral = 0.0;
        if (B - x.x2 > 0.0) {
            auto fr = [&](double u) { return phi(x.x2 + std::pow(u, 1.0 / oma)); };
            integral += quad1d::adaptive(fr, 0.0, std::pow(B - x.x2, oma), 0.5 * tol) / oma;
        }
        if (B + x.x2 > 0.0) {
            auto fl = [&](double u) { return phi(x.x2 - std::pow(u, 1.0 / oma)); };
            integral += quad1d::adaptive(fl, 0.0, std::pow(B + x.x2, oma), 0.5 * tol) / oma;
        }
    }
    return -2.0 / alpha * integral;
}

double c_alpha_at(Vec2 x, double alpha, const BoundaryProfile& phi, double abs_tol) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw std::domain_error("c_alpha_at: alpha must lie in (0, 1]");
    if (x.x1 == 0.0) return c_alpha(alpha) * phi(x.x2);
    auto f = [&](double psi) {
        const double c = std::cos(psi);
        return std::pow(c, alpha) * phi(x.x2 + x.x1 * std::tan(psi));
    };
    return 2.0 * quad1d::adaptive(f, -0.5 * M_PI, 0.5 * M_PI, 0.5 * abs_tol);
}

double f_cutoff_identity_residual(Vec2 x, double alpha, const BoundaryProfile& phi) {
    if (!(x.x1 > 0.0)) throw std::domain_error("f_cutoff_identity_residual: needs x1 > 0");
    const double d = 1e-4 * x.x1;
    const double fd = (f_cutoff({x.x1 + d, x.x2}, alpha, phi) -
                       f_cutoff({x.x1 - d, x.x2}, alpha, phi)) / (2.0 * d);
    return fd - c_alpha_at(x, alpha, phi) * std::pow(x.x1, -alpha);
}

VelocitySample velocity(const ScalarField& theta, const HalfPlanePoint& x, Alpha alpha,
                        const QuadratureConfig& q) {
    q.validate();
    require_supported(alpha);
    if (!theta.axes().contains(x.vec()))
        throw std::domain_error("velocity: target point outside the grid box");
    const double R = patch_radius(theta.axes(), x.x1, q);
    const Vec2 far = far_sum(theta, x.vec(), alpha, R);
    const Vec2 near = near_patch(theta, x.vec(), R, alpha, q);
    VelocitySample s;
    s.u1 = far.x1 + near.x1;
    const double u2_total = far.x2 + near.x2;
    s.U2 = boundary_U2(theta, x.vec(), alpha, q.far_tolerance);
    s.u2_regular = u2_total - s.U2;
    return s;
}

std::vector<VelocitySample> velocity_field(const ScalarField& theta,
                                           const std::vector<HalfPlanePoint>& targets,
                                           Alpha alpha, const QuadratureConfig& q) {
    std::vector<VelocitySample> out(targets.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(targets.size()); ++k)
        out[static_cast<std::size_t>(k)] = velocity(theta, targets[static_cast<std::size_t>(k)], alpha, q);
    return out;
}

Vec2 VelocityGrid::eval(Vec2 p) const {
    return {interp_bicubic(*axes, u1.data(), p), interp_bicubic(*axes, u2.data(), p)};
}

double VelocityGrid::max_speed() const {
    double m = 0.0;
    for (std::size_t k = 0; k < u1.size(); ++k)
        m = std::max(m, std::hypot(u1[k], u2[k]));
    return m;
}

// ---------------------------------------------------------------------------
// Grid-snapshot evaluator
// ---------------------------------------------------------------------------

// The near-zone patch at a grid node is a fixed linear functional of the
// nearby node values: every polar node evaluates the bicubic interpolant of
// the (odd-extended) field, so folding the interpolation weights through
// the quadrature weights gives one stencil per target row. Rows share the
// stencil across columns because the x2 axis is uniform; columns too close
// to the x2 edges fall back to the runtime polar patch.
struct NearStencil {
    int row_lo = 0;  // absolute first x1 row touched
    int rows = 0;
    int dj_lo = 0;   // relative x2 offset of the first column touched
    int cols = 0;
    std::vector<double> w1, w2; // (rows x cols), row-major
};

struct VelocityEvaluator::Table {
    std::size_t L = 0;
    std::size_t nbins = 0;
    bool uniform = false;
    // uniform x1 axis: direct spectra indexed by i-j+n1-1, mirror by i+j
    std::vector<std::vector<cplx>> d1, d2, m1, m2;
    // stretched x1 axis: per-pair combined spectra at i*n1+j
    std::vector<std::vector<cplx>> p1, p2;
    std::vector<double> R; // patch radius per target row
    std::vector<NearStencil> near;
};

namespace {

// Kernel row over tangential offsets for a fixed (target row, source row)
// separation pair; direct part a = x1-y1, mirror part b = x1+y1 subtracted.
void kernel_row(double a, double b, double h2, int n2, double R, double ex,
                std::vector<double>& k1, std::vector<double>& k2) {
    const int len = 2 * n2 - 1;
    k1.assign(len, 0.0);
    k2.assign(len, 0.0);
    for (int idx = 0; idx < len; ++idx) {
        const double d2 = (idx - (n2 - 1)) * h2;
        const double r2a = a * a + d2 * d2;
        const double r2b = b * b + d2 * d2;
        double v1 = 0.0, v2 = 0.0;
        if (r2a > 0.0) {
            const double Ma = chi(std::sqrt(r2a) / R) / std::pow(r2a, ex);
            v1 -= d2 * Ma;
            v2 += a * Ma;
        }
        if (r2b > 0.0) {
            const double Mb = chi(std::sqrt(r2b) / R) / std::pow(r2b, ex);
            v1 += d2 * Mb;
            v2 -= b * Mb;
        }
        k1[idx] = v1;
        k2[idx] = v2;
    }
}

void kernel_row_single(double a, double h2, int n2, double R, double ex, double sign,
                       std::vector<double>& k1, std::vector<double>& k2) {
    const int len = 2 * n2 - 1;
    k1.assign(len, 0.0);
    k2.assign(len, 0.0);
    for (int idx = 0; idx < len; ++idx) {
        const double d2 = (idx - (n2 - 1)) * h2;
        const double r2 = a * a + d2 * d2;
        if (r2 > 0.0) {
            const double M = sign * chi(std::sqrt(r2) / R) / std::pow(r2, ex);
            k1[idx] = -d2 * M;
            k2[idx] = a * M;
        }
    }
}

// One stencil per target row: replays the polar pattern at a reference
// column far from the x2 edges and accumulates interpolation weights.
NearStencil build_near_stencil(const GridAxes& g, int i, double R, Alpha a,
                               const QuadratureConfig& q) {
    const int n1 = g.n1(), n2 = g.n2();
    const int jref = n2 / 2;
    const Vec2 x{g.x1()[i], g.x2()[jref]};
    struct Acc {
        int s1, s2;
        std::array<double, 4> w1, w2;
        double c1, c2;
        double sign;
    };
    std::vector<Acc> accs;
    polar_pattern(x, R, a, q, [&](Vec2 z, double w1c, double w2c) {
        Vec2 p = x + z;
        double sign = 1.0;
        if (p.x1 < 0.0) {
            p.x1 = -p.x1;
            sign = -1.0;
        }
        if (!g.contains(p)) return;
        Acc ac;
        ac.sign = sign;
        ac.c1 = w1c;
        ac.c2 = w2c;
        ac.s1 = std::clamp(g.cell_x1(p.x1) - 1, 0, n1 - 4);
        ac.s2 = std::clamp(g.cell_x2(p.x2) - 1, 0, n2 - 4);
        ac.w1 = cubic_weights(g.x1().data() + ac.s1, p.x1);
        ac.w2 = cubic_weights(g.x2().data() + ac.s2, p.x2);
        accs.push_back(ac);
    });
    NearStencil st;
    if (accs.empty()) return st;
    int r_lo = n1, r_hi = 0, c_lo = n2, c_hi = 0;
    for (const auto& ac : accs) {
        r_lo = std::min(r_lo, ac.s1);
        r_hi = std::max(r_hi, ac.s1 + 3);
        c_lo = std::min(c_lo, ac.s2);
        c_hi = std::max(c_hi, ac.s2 + 3);
    }
    st.row_lo = r_lo;
    st.rows = r_hi - r_lo + 1;
    st.dj_lo = c_lo - jref;
    st.cols = c_hi - c_lo + 1;
    st.w1.assign(static_cast<std::size_t>(st.rows) * st.cols, 0.0);
    st.w2.assign(static_cast<std::size_t>(st.rows) * st.cols, 0.0);
    for (const auto& ac : accs)
        for (int a1 = 0; a1 < 4; ++a1)
            for (int a2 = 0; a2 < 4; ++a2) {
                const std::size_t k =
                    static_cast<std::size_t>(ac.s1 + a1 - r_lo) * st.cols + (ac.s2 + a2 - c_lo);
                const double w = ac.sign * ac.w1[a1] * ac.w2[a2];
                st.w1[k] += ac.c1 * w;
                st.w2[k] += ac.c2 * w;
            }
    return st;
}

} // namespace

VelocityEvaluator::VelocityEvaluator(AxesPtr axes, Alpha alpha, QuadratureConfig q)
    : axes_(std::move(axes)), alpha_(alpha), q_(q), table_(new Table) {
    q_.validate();
    require_supported(alpha_);
    const GridAxes& g = *axes_;
    const int n1 = g.n1(), n2 = g.n2();
    Table& T = *table_;
    T.L = fft::next_pow2(static_cast<std::size_t>(3 * n2 - 2));
    T.nbins = T.L / 2 + 1;
    T.uniform = g.x1_uniform();
    const double ex = 1.0 + 0.5 * alpha_.value;

    T.R.resize(n1);
    T.near.resize(n1);
    for (int i = 0; i < n1; ++i) {
        T.R[i] = patch_radius(g, g.x1()[i], q_);
        T.near[i] = build_near_stencil(g, i, T.R[i], alpha_, q_);
    }

    std::vector<double> k1, k2;
    if (T.uniform) {
        const double h1 = g.x1()[1] - g.x1()[0];
        const double R = T.R[0];
        T.d1.resize(2 * n1 - 1);
        T.d2.resize(2 * n1 - 1);
        T.m1.resize(2 * n1 - 1);
        T.m2.resize(2 * n1 - 1);
        for (int d = -(n1 - 1); d <= n1 - 1; ++d) {
            kernel_row_single(d * h1, g.h2(), n2, R, ex, 1.0, k1, k2);
            T.d1[d + n1 - 1] = fft::real_forward(k1, T.L);
            T.d2[d + n1 - 1] = fft::real_forward(k2, T.L);
        }
        for (int s = 0; s <= 2 * n1 - 2; ++s) {
            kernel_row_single(s * h1, g.h2(), n2, R, ex, 1.0, k1, k2);
            T.m1[s] = fft::real_forward(k1, T.L);
            T.m2[s] = fft::real_forward(k2, T.L);
        }
    } else {
        const std::size_t pairs = static_cast<std::size_t>(n1) * n1;
        const std::size_t bytes = pairs * T.nbins * sizeof(cplx) * 2;
        if (bytes > (3ull << 30))
            throw std::runtime_error("VelocityEvaluator: kernel table would exceed 3 GiB; "
                                     "reduce the grid size");
        T.p1.resize(pairs);
        T.p2.resize(pairs);
        for (int i = 0; i < n1; ++i) {
            for (int j = 0; j < n1; ++j) {
                kernel_row(g.x1()[i] - g.x1()[j], g.x1()[i] + g.x1()[j], g.h2(), n2,
                           T.R[i], ex, k1, k2);
                T.p1[static_cast<std::size_t>(i) * n1 + j] = fft::real_forward(k1, T.L);
                T.p2[static_cast<std::size_t>(i) * n1 + j] = fft::real_forward(k2, T.L);
            }
        }
    }
}

VelocityEvaluator::~VelocityEvaluator() = default;

VelocityGrid VelocityEvaluator::snapshot(const ScalarField& theta, double time,
                                         bool fill_U2) const {
    if (theta.axes_ptr().get() != axes_.get())
        throw std::invalid_argument("VelocityEvaluator::snapshot: field lives on a different grid");
    const GridAxes& g = *axes_;
    const int n1 = g.n1(), n2 = g.n2();
    const Table& T = *table_;

    VelocityGrid out;
    out.axes = axes_;
    out.time = time;
    out.u1.assign(static_cast<std::size_t>(n1) * n2, 0.0);
    out.u2.assign(static_cast<std::size_t>(n1) * n2, 0.0);

    // weighted source rows -> spectra
    std::vector<std::vector<cplx>> shat(n1);
    {
        std::vector<double> row(n2);
        for (int j = 0; j < n1; ++j) {
            const double wj = g.w1()[j];
            for (int m = 0; m < n2; ++m) row[m] = theta.node(j, m) * wj * g.w2(m);
            shat[j] = fft::real_forward(row, T.L);
        }
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < n1; ++i) {
        std::vector<cplx> acc1(T.nbins, cplx(0, 0)), acc2(T.nbins, cplx(0, 0));
        for (int j = 0; j < n1; ++j) {
            const cplx* s = shat[j].data();
            if (T.uniform) {
                const cplx* a1 = T.d1[i - j + n1 - 1].data();
                const cplx* a2 = T.d2[i - j + n1 - 1].data();
                const cplx* b1 = T.m1[i + j].data();
                const cplx* b2 = T.m2[i + j].data();
                for (std::size_t b = 0; b < T.nbins; ++b) {
                    acc1[b] += (a1[b] - b1[b]) * s[b];
                    acc2[b] += (a2[b] - b2[b]) * s[b];
                }
            } else {
                const cplx* a1 = T.p1[static_cast<std::size_t>(i) * n1 + j].data();
                const cplx* a2 = T.p2[static_cast<std::size_t>(i) * n1 + j].data();
                for (std::size_t b = 0; b < T.nbins; ++b) {
                    acc1[b] += a1[b] * s[b];
                    acc2[b] += a2[b] * s[b];
                }
            }
        }
        const std::vector<double> r1 = fft::real_inverse(acc1, T.L);
        const std::vector<double> r2 = fft::real_inverse(acc2, T.L);
        double* u1 = out.u1.data() + static_cast<std::size_t>(i) * n2;
        double* u2 = out.u2.data() + static_cast<std::size_t>(i) * n2;
        for (int m = 0; m < n2; ++m) {
            u1[m] = r1[m + n2 - 1];
            u2[m] = r2[m + n2 - 1];
        }
    }

    // near zone: per-row stencil form of the polar patch; edge columns use
    // the runtime patch. Rows whose stencil sees only zero values are
    // skipped via per-row nonzero column intervals.
    std::vector<int> jlo(n1, n2), jhi(n1, -1);
    int Jlo = n2, Jhi = -1;
    for (int i = 0; i < n1; ++i) {
        const double* row = theta.values().data() + static_cast<std::size_t>(i) * n2;
        int a = 0, b = n2 - 1;
        while (a < n2 && row[a] == 0.0) ++a;
        while (b >= 0 && row[b] == 0.0) --b;
        jlo[i] = a;
        jhi[i] = b;
        Jlo = std::min(Jlo, a);
        Jhi = std::max(Jhi, b);
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < n1; ++i) {
        double* u1 = out.u1.data() + static_cast<std::size_t>(i) * n2;
        double* u2 = out.u2.data() + static_cast<std::size_t>(i) * n2;
        const NearStencil& st = T.near[i];
        for (int m = 0; m < n2; ++m) {
            const bool interior = !st.w1.empty() && m + st.dj_lo >= 0 &&
                                  m + st.dj_lo + st.cols - 1 < n2;
            if (interior) {
                bool any = false;
                for (int r = 0; r < st.rows && !any; ++r) {
                    const int ri = st.row_lo + r;
                    any = jhi[ri] >= m + st.dj_lo && jlo[ri] <= m + st.dj_lo + st.cols - 1;
                }
                if (!any) continue;
                double a1 = 0.0, a2 = 0.0;
                for (int r = 0; r < st.rows; ++r) {
                    const double* src = theta.values().data() +
                                        static_cast<std::size_t>(st.row_lo + r) * n2 +
                                        (m + st.dj_lo);
                    const double* w1p = st.w1.data() + static_cast<std::size_t>(r) * st.cols;
                    const double* w2p = st.w2.data() + static_cast<std::size_t>(r) * st.cols;
                    for (int c = 0; c < st.cols; ++c) {
                        a1 += w1p[c] * src[c];
                        a2 += w2p[c] * src[c];
                    }
                }
                u1[m] += a1;
                u2[m] += a2;
            } else {
                const int W = static_cast<int>(std::ceil(T.R[i] / g.h2())) + 3;
                if (m + W < Jlo || m - W > Jhi) continue;
                const Vec2 nearv =
                    near_patch(theta, {g.x1()[i], g.x2()[m]}, T.R[i], alpha_, q_);
                u1[m] += nearv.x1;
                u2[m] += nearv.x2;
            }
        }
    }

    if (fill_U2) {
        out.U2.assign(static_cast<std::size_t>(n1) * n2, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int i = 0; i < n1; ++i)
            for (int m = 0; m < n2; ++m)
                out.U2[static_cast<std::size_t>(i) * n2 + m] =
                    boundary_U2(theta, {g.x1()[i], g.x2()[m]}, alpha_, q_.far_tolerance);
    }
    return out;
}

void write_velocity_csv(const VelocityGrid& v, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_velocity_csv: cannot open " + path);
    os << "x1,x2,u1,u2,U2\n" << std::setprecision(17);
    const GridAxes& g = *v.axes;
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * g.n2() + j;
            os << g.x1()[i] << ',' << g.x2()[j] << ',' << v.u1[k] << ',' << v.u2[k] << ','
               << (v.U2.empty() ? 0.0 : v.U2[k]) << '\n';
        }
}

} // namespace hpsqg
