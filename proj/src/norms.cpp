#include "hpsqg/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hpsqg {

namespace {

inline double quotient(double fa, double fb, double dist, double beta) {
    return std::abs(fa - fb) / std::pow(dist, beta);
}

} // namespace

double holder_seminorm(const ScalarField& f, double beta, int pair_budget,
                       std::uint64_t seed) {
    if (!(beta > 0.0) || !(beta <= 1.0))
        throw std::domain_error("holder_seminorm: beta must lie in (0, 1]");
    if (pair_budget < 10000)
        throw std::invalid_argument("holder_seminorm: pair_budget must be >= 10^4");
    const GridAxes& g = f.axes();
    const int n1 = g.n1(), n2 = g.n2();
    double best = 0.0;

    // (a) adjacent grid pairs
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const double v = f.node(i, j);
            if (i + 1 < n1) {
                const double d = g.x1()[i + 1] - g.x1()[i];
                best = std::max(best, quotient(v, f.node(i + 1, j), d, beta));
            }
            if (j + 1 < n2)
                best = std::max(best, quotient(v, f.node(i, j + 1), g.h2(), beta));
        }
    }

    // (c) boundary-anchored pairs: boundary-row node against the nodes above it
    const int rows_up = std::min(n1 - 1, 8);
    for (int j = 0; j < n2; ++j) {
        const double v0 = f.node(0, j);
        for (int i = 1; i <= rows_up; ++i)
            best = std::max(best, quotient(v0, f.node(i, j), g.x1()[i], beta));
    }

    // (b) seeded random node pairs
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> di(0, n1 - 1), dj(0, n2 - 1);
    for (int k = 0; k < pair_budget; ++k) {
        const int ia = di(rng), ja = dj(rng), ib = di(rng), jb = dj(rng);
        if (ia == ib && ja == jb) continue;
        const double dist = std::hypot(g.x1()[ia] - g.x1()[ib], g.x2()[ja] - g.x2()[jb]);
        best = std::max(best, quotient(f.node(ia, ja), f.node(ib, jb), dist, beta));
    }
    return best;
}

NormReport weighted_x_norm(const ScalarField& f, double beta, int pair_budget,
                           std::uint64_t seed) {
    if (!(beta > 0.0) || !(beta <= 1.0))
        throw std::domain_error("weighted_x_norm: beta must lie in (0, 1]");
    const GridAxes& g = f.axes();
    const int n1 = g.n1(), n2 = g.n2();
    NormReport r;
    r.beta = beta;
    r.sup_norm = f.sup_norm();
    r.holder_seminorm_lb = holder_seminorm(f, beta, pair_budget, seed);

    // d1 sweeps per row: staggered half-cell point next to the boundary,
    // then node stencils (one-sided within two cells of x1 = 0). Stencil
    // weights depend on the row only, so they are built once per row.
    const auto& x1 = g.x1();
    {
        const double half = 0.5 * (x1[0] + x1[1]);
        const double wh = std::pow(half, 1.0 - beta) / (x1[1] - x1[0]);
        for (int j = 0; j < n2; ++j)
            r.weighted_d1 = std::max(r.weighted_d1,
                                     wh * std::abs(f.node(1, j) - f.node(0, j)));
    }
    for (int i = 1; i < n1; ++i) {
        int s, m;
        const double hloc = g.h1_local(x1[i]);
        if (x1[i] < 2.0 * hloc && i + 2 < n1) {
            s = i;
            m = 3;
        } else {
            s = std::clamp(i - 2, 0, n1 - 5);
            m = 5;
        }
        const auto w = fd_weights(x1[i], x1.data() + s, m, 1);
        const double weight = std::pow(x1[i], 1.0 - beta);
        for (int j = 0; j < n2; ++j) {
            double d1 = 0.0;
            for (int k = 0; k < m; ++k) d1 += w[k] * f.node(s + k, j);
            r.weighted_d1 = std::max(r.weighted_d1, weight * std::abs(d1));
        }
    }

    // d2 sweep: 5-point stencils, shifted at the edges; weights per column
    const auto& x2 = g.x2();
    for (int j = 0; j < n2; ++j) {
        const int s = std::clamp(j - 2, 0, n2 - 5);
        const auto w = fd_weights(x2[j], x2.data() + s, 5, 1);
        for (int i = 0; i < n1; ++i) {
            double d2 = 0.0;
            for (int k = 0; k < 5; ++k) d2 += w[k] * f.node(i, s + k);
            r.d2_sup = std::max(r.d2_sup, std::abs(d2));
        }
    }

    r.x_beta_norm = r.sup_norm + r.holder_seminorm_lb + r.weighted_d1 + r.d2_sup;
    return r;
}

double holder_quotient(const ScalarField& f, Vec2 x, Vec2 xp, double beta) {
    const double dist = norm(x - xp);
    if (dist == 0.0) throw std::domain_error("holder_quotient: coincident points");
    return std::abs(f.eval(x) - f.eval(xp)) / std::pow(dist, beta);
}

void append_norm_csv_header(std::string& out) { out += "t,sup,holder,wd1,d2,xbeta\n"; }

void append_norm_csv_row(std::string& out, double t, const NormReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << t << ',' << r.sup_norm << ',' << r.holder_seminorm_lb << ',' << r.weighted_d1
       << ',' << r.d2_sup << ',' << r.x_beta_norm << '\n';
    out += os.str();
}

} // namespace hpsqg
