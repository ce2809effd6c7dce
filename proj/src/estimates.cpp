#include "hpsqg/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hpsqg/fit.hpp"
#include "hpsqg/norms.hpp"

namespace hpsqg {

std::string estimate_name(EstimateId id) {
    switch (id) {
        case EstimateId::U1_REG: return "U1_REG";
        case EstimateId::DU2_ASYMP: return "DU2_ASYMP";
        case EstimateId::U2_D2_BOUND: return "U2_D2_BOUND";
        case EstimateId::L2_V2: return "L2_V2";
        case EstimateId::L2_WEIGHTED_V1: return "L2_WEIGHTED_V1";
        case EstimateId::FARFIELD_LIP: return "FARFIELD_LIP";
        case EstimateId::ENERGY_2THT: return "ENERGY_2THT";
    }
    return "UNKNOWN";
}

std::optional<EstimateId> parse_estimate(const std::string& name) {
    for (EstimateId id : {EstimateId::U1_REG, EstimateId::DU2_ASYMP, EstimateId::U2_D2_BOUND,
                          EstimateId::L2_V2, EstimateId::L2_WEIGHTED_V1,
                          EstimateId::FARFIELD_LIP, EstimateId::ENERGY_2THT})
        if (estimate_name(id) == name) return id;
    return std::nullopt;
}

std::vector<InitialData> random_field_family(int count, std::uint64_t seed,
                                             bool boundary_traces) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<InitialData> family;
    family.reserve(count);
    for (int f = 0; f < count; ++f) {
        const int k = 2 + static_cast<int>(uni(rng) * 3.0);
        struct Bump {
            double c1, c2, r0, r1, amp;
        };
        std::vector<Bump> bumps;
        for (int b = 0; b < k; ++b) {
            Bump bp;
            const bool touch = boundary_traces && (b == 0) && (f % 2 == 0);
            bp.c1 = touch ? 0.0 : 0.05 + 0.5 * uni(rng);
            bp.c2 = -0.45 + 0.9 * uni(rng);
            bp.r0 = 0.08 + 0.12 * uni(rng);
            bp.r1 = bp.r0 + 0.1 + 0.15 * uni(rng);
            // keep the support inside B(0;1)
            const double reach = std::hypot(bp.c1, bp.c2) + bp.r1;
            if (reach > 0.95) {
                const double s = 0.95 / reach;
                bp.c1 *= s;
                bp.c2 *= s;
                bp.r0 *= s;
                bp.r1 *= s;
            }
            bp.amp = (uni(rng) < 0.5 ? -1.0 : 1.0) * (0.3 + 0.7 * uni(rng));
            bumps.push_back(bp);
        }
        InitialData d;
        d.name = "random_" + std::to_string(f);
        d.value = [bumps](double x1, double x2) {
            double v = 0.0;
            for (const auto& b : bumps)
                v += b.amp * plateau(std::hypot(x1 - b.c1, x2 - b.c2), b.r0, b.r1);
            return v;
        };
        d.gradient = [bumps](double x1, double x2) -> Vec2 {
            Vec2 g{0.0, 0.0};
            for (const auto& b : bumps) {
                const double dx = x1 - b.c1, dy = x2 - b.c2;
                const double r = std::hypot(dx, dy);
                if (r <= b.r0 || r >= b.r1 || r == 0.0) continue;
                const double dp = b.amp * plateau_deriv(r, b.r0, b.r1) / r;
                g.x1 += dp * dx;
                g.x2 += dp * dy;
            }
            return g;
        };
        double rad = 0.0;
        for (const auto& b : bumps) rad = std::max(rad, std::hypot(b.c1, b.c2) + b.r1);
        d.support_radius = rad;
        family.push_back(std::move(d));
    }
    return family;
}

EstimateReport verify_u1_regularity(const std::vector<InitialData>& family, Alpha alpha,
                                    AxesPtr axes, const QuadratureConfig& q, double gate,
                                    std::uint64_t seed) {
    EstimateReport rep;
    rep.id = EstimateId::U1_REG;
    rep.gate = gate;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const double oma = 1.0 - alpha.value;
    for (std::size_t fi = 0; fi < family.size(); ++fi) {
        const ScalarField theta(axes, family[fi].value, family[fi].support_radius, true);
        const NormReport nr = weighted_x_norm(theta, alpha.value);
        const double rhs = nr.weighted_d1 + nr.d2_sup;
        if (rhs == 0.0) {
            rep.samples.push_back({family[fi].name, 0.0, 0.0, 0.0});
            continue;
        }
        // grad u1 at sampled points by centered differences of the
        // quadratured u1
        const double delta = 2e-3;
        auto grad_u1 = [&](Vec2 p) -> Vec2 {
            auto u1_at = [&](double a, double b) {
                return velocity(theta, HalfPlanePoint(std::max(a, 0.0), b), alpha, q).u1;
            };
            double d1;
            if (p.x1 < delta) // one-sided against the boundary
                d1 = (u1_at(p.x1 + delta, p.x2) - u1_at(p.x1, p.x2)) / delta;
            else
                d1 = (u1_at(p.x1 + delta, p.x2) - u1_at(p.x1 - delta, p.x2)) / (2 * delta);
            const double d2 =
                (u1_at(p.x1, p.x2 + delta) - u1_at(p.x1, p.x2 - delta)) / (2 * delta);
            return {d1, d2};
        };
        const int npts = 8;
        std::vector<Vec2> pts;
        std::vector<Vec2> grads;
        for (int i = 0; i < npts; ++i) {
            const Vec2 p{0.02 + 0.8 * uni(rng), -0.8 + 1.6 * uni(rng)};
            pts.push_back(p);
            grads.push_back(grad_u1(p));
        }
        double lhs = 0.0;
        for (int i = 0; i < npts; ++i)
            for (int j = i + 1; j < npts; ++j) {
                const double dist = norm(pts[i] - pts[j]);
                if (dist < 2 * delta) continue;
                const double dq = std::hypot(grads[i].x1 - grads[j].x1,
                                             grads[i].x2 - grads[j].x2) /
                                  std::pow(dist, oma);
                lhs = std::max(lhs, dq);
            }
        rep.samples.push_back({family[fi].name, lhs, rhs, lhs / rhs});
    }
    for (const auto& s : rep.samples) rep.fitted_constant = std::max(rep.fitted_constant, s.ratio);
    rep.pass = rep.fitted_constant <= gate;
    return rep;
}

EstimateReport verify_dU2_asymptotic(const ScalarField& theta, Alpha alpha,
                                     const std::vector<double>& x1_ladder, double x2_probe,
                                     double slope_target, double slope_tol) {
    EstimateReport rep;
    rep.id = EstimateId::DU2_ASYMP;
    const double tr = theta.trace(x2_probe);
    if (tr == 0.0)
        throw std::invalid_argument("verify_dU2_asymptotic: probe rejected, theta(0,x2) = 0");
    const double ca = c_alpha(alpha.value);
    std::vector<double> xs, res;
    for (double x1 : x1_ladder) {
        const double d = 1e-3 * x1;
        const double du2 = (boundary_U2(theta, {x1 + d, x2_probe}, alpha, 1e-12) -
                            boundary_U2(theta, {x1 - d, x2_probe}, alpha, 1e-12)) /
                           (2 * d);
        const double main = ca * std::pow(x1, -alpha.value) * tr;
        const double lhs = std::abs(du2 - main);
        std::ostringstream os;
        os << "x1=" << x1;
        rep.samples.push_back({os.str(), lhs, std::abs(main), lhs / std::abs(main)});
        xs.push_back(x1);
        res.push_back(lhs);
    }
    const LineFit f = fit_loglog(xs, res);
    rep.fitted_slope = f.slope;
    rep.fitted_constant = std::exp(f.intercept);
    rep.gate = slope_tol;
    rep.pass = std::abs(f.slope - slope_target) <= slope_tol;
    return rep;
}

L2BoundsResult verify_L2_bounds(const std::vector<InitialData>& family, Alpha alpha,
                                AxesPtr axes, const QuadratureConfig& q, double gate,
                                std::uint64_t seed) {
    L2BoundsResult out;
    out.v2.id = EstimateId::L2_V2;
    out.weighted_v1.id = EstimateId::L2_WEIGHTED_V1;
    out.v2.gate = out.weighted_v1.gate = gate;
    out.v2.seed = out.weighted_v1.seed = seed;
    const VelocityEvaluator eval(axes, alpha, q);
    const GridAxes& g = *axes;
    const int n1 = g.n1(), n2 = g.n2();
    for (const auto& data : family) {
        const ScalarField gf(axes, data.value, data.support_radius, false);
        const double gl2 = gf.l2_norm();
        const VelocityGrid v = eval.snapshot(gf);
        double v2acc = 0.0;
        for (int i = 0; i < n1; ++i) {
            const double wi = g.w1()[i];
            for (int j = 0; j < n2; ++j) {
                const double val = v.u2[static_cast<std::size_t>(i) * n2 + j];
                v2acc += wi * g.w2(j) * val * val;
            }
        }
        // weighted v1: cell-centered in x1 so the weight stays finite
        double v1acc = 0.0;
        for (int i = 0; i + 1 < n1; ++i) {
            const double mid = 0.5 * (g.x1()[i] + g.x1()[i + 1]);
            const double cell = g.x1()[i + 1] - g.x1()[i];
            const double w = std::pow(mid, alpha.value - 1.0);
            for (int j = 0; j < n2; ++j) {
                const double vm = 0.5 * (v.u1[static_cast<std::size_t>(i) * n2 + j] +
                                         v.u1[static_cast<std::size_t>(i + 1) * n2 + j]);
                const double t = w * vm;
                v1acc += t * t * cell * g.w2(j);
            }
        }
        const double r2 = (gl2 > 0) ? std::sqrt(v2acc) / gl2 : 0.0;
        const double r1 = (gl2 > 0) ? std::sqrt(v1acc) / gl2 : 0.0;
        out.v2.samples.push_back({data.name, std::sqrt(v2acc), gl2, r2});
        out.weighted_v1.samples.push_back({data.name, std::sqrt(v1acc), gl2, r1});
    }
    for (const auto& s : out.v2.samples)
        out.v2.fitted_constant = std::max(out.v2.fitted_constant, s.ratio);
    for (const auto& s : out.weighted_v1.samples)
        out.weighted_v1.fitted_constant = std::max(out.weighted_v1.fitted_constant, s.ratio);
    out.v2.pass = out.v2.fitted_constant <= gate;
    out.weighted_v1.pass = out.weighted_v1.fitted_constant <= gate;
    return out;
}

EstimateReport verify_farfield_lipschitz(const ScalarField& theta, Alpha alpha,
                                         const std::vector<double>& L_ladder,
                                         const QuadratureConfig& q, double slope_tol,
                                         std::uint64_t seed) {
    EstimateReport rep;
    rep.id = EstimateId::FARFIELD_LIP;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> Ls, lips;
    for (double L : L_ladder) {
        const int npts = 30;
        std::vector<Vec2> pts;
        std::vector<Vec2> us;
        for (int i = 0; i < npts; ++i) {
            // cluster just above x1 = L where the Lipschitz constant peaks
            const Vec2 p{L + 0.25 * L * uni(rng), -0.9 + 1.8 * uni(rng)};
            pts.push_back(p);
            us.push_back(velocity(theta, HalfPlanePoint(p.x1, p.x2), alpha, q).total());
        }
        double lip = 0.0;
        for (int i = 0; i < npts; ++i)
            for (int j = i + 1; j < npts; ++j) {
                const double d = norm(pts[i] - pts[j]);
                if (d < 1e-6 || d > 0.5) continue;
                lip = std::max(lip, norm(us[i] - us[j]) / d);
            }
        std::ostringstream os;
        os << "L=" << L;
        rep.samples.push_back({os.str(), lip, std::pow(L, -alpha.value),
                               lip * std::pow(L, alpha.value)});
        Ls.push_back(L);
        lips.push_back(lip);
    }
    const LineFit f = fit_loglog(Ls, lips);
    rep.fitted_slope = f.slope;
    rep.fitted_constant = std::exp(f.intercept);
    rep.gate = slope_tol;
    rep.pass = std::abs(f.slope - (-alpha.value)) <= slope_tol;
    return rep;
}

EstimateReport verify_energy_inequalities(const std::vector<SolverState>& run, Alpha alpha,
                                          double beta) {
    if (run.size() < 10)
        throw std::invalid_argument("verify_energy_inequalities: history too sparse (<10)");
    EstimateReport rep;
    rep.id = EstimateId::ENERGY_2THT;
    double c_2tht = 0.0, c_energy = 0.0;
    int reversals = 0;
    for (std::size_t k = 1; k + 1 < run.size(); ++k) {
        const double dtw = run[k + 1].t - run[k - 1].t;
        const double d2 = run[k].norm_alpha.d2_sup;
        const double wd1a = run[k].norm_alpha.weighted_d1;
        const double lhs1 = (run[k + 1].norm_alpha.d2_sup - run[k - 1].norm_alpha.d2_sup) / dtw;
        const double rhs1 = (wd1a + d2) * d2;
        if (rhs1 > 0.0) {
            c_2tht = std::max(c_2tht, std::max(lhs1, 0.0) / rhs1);
            std::ostringstream os;
            os << "2tht t=" << run[k].t;
            rep.samples.push_back({os.str(), lhs1, rhs1, std::max(lhs1, 0.0) / rhs1});
        } else if (lhs1 > 1e-12) {
            ++reversals;
        }
        const double sumb = run[k].norm_beta.weighted_d1 + run[k].norm_beta.d2_sup;
        const double sumb_next = run[k + 1].norm_beta.weighted_d1 + run[k + 1].norm_beta.d2_sup;
        const double sumb_prev = run[k - 1].norm_beta.weighted_d1 + run[k - 1].norm_beta.d2_sup;
        const double lhs2 = (sumb_next - sumb_prev) / dtw;
        const double rhs2 = (wd1a + d2) * (run[k].norm_beta.sup_norm + sumb);
        if (rhs2 > 0.0) {
            c_energy = std::max(c_energy, std::max(lhs2, 0.0) / rhs2);
            std::ostringstream os;
            os << "energy t=" << run[k].t;
            rep.samples.push_back({os.str(), lhs2, rhs2, std::max(lhs2, 0.0) / rhs2});
        }
    }
    rep.fitted_constant = std::max(c_2tht, c_energy);
    rep.gate = static_cast<double>(reversals);
    rep.pass = true; // gated on refinement stability by the caller
    (void)alpha;
    (void)beta;
    return rep;
}

void write_estimate_csv(const EstimateReport& r, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_estimate_csv: cannot open " + path);
    os << "estimate,input,lhs,rhs,ratio\n" << std::setprecision(17);
    const std::string name = estimate_name(r.id);
    for (const auto& s : r.samples)
        os << name << ',' << s.input << ',' << s.lhs << ',' << s.rhs << ',' << s.ratio << '\n';
    os << name << ",summary_constant=" << r.fitted_constant;
    if (r.fitted_slope) os << ";slope=" << *r.fitted_slope;
    os << ";pass=" << (r.pass ? 1 : 0) << ",,,\n";
}

} // namespace hpsqg
