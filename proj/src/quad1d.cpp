#include "hpsqg/quad1d.hpp"

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace hpsqg {
namespace quad1d {

namespace {

// K15 nodes on [0,1] (symmetric) with Kronrod weights; G7 weights sit on the
// odd-indexed nodes.
constexpr std::array<double, 8> kx = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr std::array<double, 8> kw = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> gw = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GK {
    double kronrod;
    double err;
};

GK gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = kw[7] * f(c);
    double resg = gw[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double fl = f(c - h * kx[i]);
        const double fr = f(c + h * kx[i]);
        resk += kw[i] * (fl + fr);
        if (i % 2 == 1) resg += gw[i / 2] * (fl + fr);
    }
    return {resk * h, std::abs(resk - resg) * h};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth) {
    const GK r = gk15(f, a, b);
    if (r.err <= tol || depth <= 0) return r.kronrod;
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, depth - 1) +
           adapt(f, c, b, 0.5 * tol, depth - 1);
}

// Legendre nodes/weights by Newton iteration, cached per order.
const std::vector<std::pair<double, double>>& legendre(int n) {
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::pair<double, double>> nw(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                p0 = 1.0;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double d = n * (x * p1 - p0) / (x * x - 1.0);
                nw[i] = {x, 2.0 / ((1.0 - x * x) * d * d)};
                break;
            }
        }
    }
    return cache.emplace(n, std::move(nw)).first->second;
}

} // namespace

double adaptive(const std::function<double(double)>& f, double a, double b,
                double abs_tol, int max_depth) {
    if (!(b > a)) return 0.0;
    if (abs_tol <= 0.0) throw std::invalid_argument("quad1d::adaptive: tolerance must be positive");
    return adapt(f, a, b, abs_tol, max_depth);
}

double gauss(const std::function<double(double)>& f, double a, double b, int n) {
    const auto& nw = legendre(n);
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (const auto& [x, w] : nw) s += w * f(c + h * x);
    return s * h;
}

} // namespace quad1d
} // namespace hpsqg
