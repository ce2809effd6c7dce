#include "hpsqg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hpsqg {

double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }

HalfPlanePoint::HalfPlanePoint(double a, double b) : x1(a), x2(b) {
    if (!(x1 >= 0.0))
        throw std::domain_error("HalfPlanePoint: x1 must be >= 0, got " + std::to_string(a));
}

std::shared_ptr<const GridAxes> GridAxes::uniform(int n1, double x1max, int n2,
                                                  double x2min, double x2max) {
    if (n1 < 4 || n2 < 4) throw std::invalid_argument("GridAxes: need >= 4 nodes per axis");
    if (!(x1max > 0.0) || !(x2max > x2min)) throw std::invalid_argument("GridAxes: bad bounds");
    auto g = std::shared_ptr<GridAxes>(new GridAxes());
    g->x1_.resize(n1);
    g->x2_.resize(n2);
    for (int i = 0; i < n1; ++i) g->x1_[i] = x1max * i / (n1 - 1.0);
    for (int j = 0; j < n2; ++j) g->x2_[j] = x2min + (x2max - x2min) * j / (n2 - 1.0);
    g->x1_uniform_ = true;
    g->finalize();
    return g;
}

std::shared_ptr<const GridAxes> GridAxes::stretched_x1(double h1min, double ratio,
                                                       double h1max, double x1max,
                                                       int n2, double x2min, double x2max) {
    if (!(h1min > 0.0) || !(ratio >= 1.0) || ratio > 1.1 + 1e-12)
        throw std::invalid_argument("GridAxes: stretching ratio must be in [1, 1.1]");
    if (n2 < 4) throw std::invalid_argument("GridAxes: need >= 4 nodes per axis");
    auto g = std::shared_ptr<GridAxes>(new GridAxes());
    double x = 0.0, h = h1min;
    g->x1_.push_back(0.0);
    while (x < x1max) {
        x += h;
        g->x1_.push_back(x);
        h = std::min(h * ratio, h1max);
    }
    g->x2_.resize(n2);
    for (int j = 0; j < n2; ++j) g->x2_[j] = x2min + (x2max - x2min) * j / (n2 - 1.0);
    g->x1_uniform_ = false;
    g->finalize();
    return g;
}

std::shared_ptr<const GridAxes> GridAxes::from_nodes(std::vector<double> x1_nodes, int n2,
                                                     double x2min, double x2max) {
    if (x1_nodes.size() < 4 || n2 < 4)
        throw std::invalid_argument("GridAxes: need >= 4 nodes per axis");
    for (std::size_t i = 0; i + 1 < x1_nodes.size(); ++i)
        if (!(x1_nodes[i + 1] > x1_nodes[i]))
            throw std::invalid_argument("GridAxes: x1 nodes must be strictly increasing");
    auto g = std::shared_ptr<GridAxes>(new GridAxes());
    g->x1_ = std::move(x1_nodes);
    g->x2_.resize(n2);
    for (int j = 0; j < n2; ++j) g->x2_[j] = x2min + (x2max - x2min) * j / (n2 - 1.0);
    g->x1_uniform_ = false;
    g->finalize();
    return g;
}

void GridAxes::finalize() {
    h2_ = x2_[1] - x2_[0];
    h1_min_ = 1e300;
    h1_max_ = 0.0;
    for (std::size_t i = 0; i + 1 < x1_.size(); ++i) {
        const double h = x1_[i + 1] - x1_[i];
        h1_min_ = std::min(h1_min_, h);
        h1_max_ = std::max(h1_max_, h);
    }
    const int n = n1();
    w1_.assign(n, 0.0);
    w1_[0] = 0.5 * (x1_[1] - x1_[0]);
    w1_[n - 1] = 0.5 * (x1_[n - 1] - x1_[n - 2]);
    for (int i = 1; i + 1 < n; ++i) w1_[i] = 0.5 * (x1_[i + 1] - x1_[i - 1]);
}

double GridAxes::h1_local(double v) const {
    const int c = cell_x1(v);
    return x1_[c + 1] - x1_[c];
}

bool GridAxes::contains(Vec2 p) const {
    return p.x1 >= x1_.front() - 1e-12 && p.x1 <= x1_.back() + 1e-12 &&
           p.x2 >= x2_.front() - 1e-12 && p.x2 <= x2_.back() + 1e-12;
}

int GridAxes::cell_x1(double v) const {
    if (x1_uniform_) {
        const double h = x1_[1] - x1_[0];
        int c = static_cast<int>(std::floor((v - x1_[0]) / h));
        return std::clamp(c, 0, n1() - 2);
    }
    auto it = std::upper_bound(x1_.begin(), x1_.end(), v);
    int c = static_cast<int>(it - x1_.begin()) - 1;
    return std::clamp(c, 0, n1() - 2);
}

int GridAxes::cell_x2(double v) const {
    int c = static_cast<int>(std::floor((v - x2_.front()) / h2_));
    return std::clamp(c, 0, n2() - 2);
}

double GridAxes::w2(int j) const {
    return (j == 0 || j == n2() - 1) ? 0.5 * h2_ : h2_;
}

std::array<double, 4> cubic_weights(const double* t, double v) {
    std::array<double, 4> w;
    for (int k = 0; k < 4; ++k) {
        double num = 1.0, den = 1.0;
        for (int m = 0; m < 4; ++m) {
            if (m == k) continue;
            num *= (v - t[m]);
            den *= (t[k] - t[m]);
        }
        w[k] = num / den;
    }
    return w;
}

std::vector<double> fd_weights(double z, const double* t, int m, int order) {
    // Fornberg's recursion, single evaluation point.
    std::vector<double> c(static_cast<std::size_t>(m) * (order + 1), 0.0);
    auto C = [&](int i, int k) -> double& { return c[static_cast<std::size_t>(i) * (order + 1) + k]; };
    double c1 = 1.0;
    double c4 = t[0] - z;
    C(0, 0) = 1.0;
    for (int i = 1; i < m; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = t[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = t[i] - t[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[i] = C(i, order);
    return out;
}

ScalarField::ScalarField(AxesPtr axes, std::vector<double> values, double support_radius,
                         AnalyticFn analytic)
    : axes_(std::move(axes)), values_(std::move(values)), support_radius_(support_radius),
      analytic_(std::move(analytic)) {
    if (static_cast<int>(values_.size()) != axes_->n1() * axes_->n2())
        throw std::invalid_argument("ScalarField: value count does not match grid");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("ScalarField: non-finite node value");
}

ScalarField::ScalarField(AxesPtr axes, const AnalyticFn& f, double support_radius,
                         bool keep_analytic)
    : axes_(std::move(axes)), support_radius_(support_radius),
      analytic_(keep_analytic ? f : AnalyticFn()) {
    values_.resize(static_cast<std::size_t>(axes_->n1()) * axes_->n2());
    for (int i = 0; i < axes_->n1(); ++i)
        for (int j = 0; j < axes_->n2(); ++j)
            values_[static_cast<std::size_t>(i) * axes_->n2() + j] =
                f(axes_->x1()[i], axes_->x2()[j]);
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("ScalarField: non-finite sample");
}

double interp_bicubic(const GridAxes& g, const double* values, Vec2 p) {
    const auto& ax1 = g.x1();
    const auto& ax2 = g.x2();
    const int n1 = g.n1(), n2 = g.n2();
    const double v1 = std::clamp(p.x1, ax1.front(), ax1.back());
    const double v2 = std::clamp(p.x2, ax2.front(), ax2.back());
    int s1 = std::clamp(g.cell_x1(v1) - 1, 0, n1 - 4);
    int s2 = std::clamp(g.cell_x2(v2) - 1, 0, n2 - 4);
    const auto w1 = cubic_weights(ax1.data() + s1, v1);
    const auto w2 = cubic_weights(ax2.data() + s2, v2);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const double* row = values + static_cast<std::size_t>(s1 + a) * n2 + s2;
        acc += w1[a] * (w2[0] * row[0] + w2[1] * row[1] + w2[2] * row[2] + w2[3] * row[3]);
    }
    return acc;
}

double ScalarField::interp(Vec2 p) const {
    return interp_bicubic(*axes_, values_.data(), p);
}

double ScalarField::eval(Vec2 p) const {
    if (axes_->contains(p)) return interp(p);
    if (analytic_) return analytic_(p.x1, p.x2);
    std::ostringstream os;
    os << "ScalarField::eval: point (" << p.x1 << ", " << p.x2
       << ") outside grid box and no analytic source attached";
    throw std::domain_error(os.str());
}

double ScalarField::eval_or_zero(Vec2 p) const {
    if (axes_->contains(p)) return interp(p);
    return 0.0;
}

Vec2 ScalarField::finite_diff_gradient(Vec2 p) const {
    const double h1 = axes_->h1_local(std::max(p.x1, 0.0));
    const double h2 = axes_->h2();
    double d1;
    if (p.x1 < 2.0 * h1) {
        // one-sided 2nd order, stencil pointing away from the boundary
        d1 = (-3.0 * eval_or_zero(p) + 4.0 * eval_or_zero({p.x1 + h1, p.x2}) -
              eval_or_zero({p.x1 + 2.0 * h1, p.x2})) / (2.0 * h1);
    } else {
        const double s = std::min(h1, 0.5 * p.x1);
        d1 = (-eval_or_zero({p.x1 + 2 * s, p.x2}) + 8 * eval_or_zero({p.x1 + s, p.x2}) -
              8 * eval_or_zero({p.x1 - s, p.x2}) + eval_or_zero({p.x1 - 2 * s, p.x2})) / (12 * s);
    }
    const double d2 = (-eval_or_zero({p.x1, p.x2 + 2 * h2}) + 8 * eval_or_zero({p.x1, p.x2 + h2}) -
                       8 * eval_or_zero({p.x1, p.x2 - h2}) + eval_or_zero({p.x1, p.x2 - 2 * h2})) /
                      (12 * h2);
    return {d1, d2};
}

double ScalarField::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::l2_norm() const {
    const int n1 = axes_->n1(), n2 = axes_->n2();
    double acc = 0.0;
    for (int i = 0; i < n1; ++i) {
        const double wi = axes_->w1()[i];
        double row = 0.0;
        for (int j = 0; j < n2; ++j) {
            const double v = node(i, j);
            row += v * v * axes_->w2(j);
        }
        acc += wi * row;
    }
    return std::sqrt(acc);
}

double ScalarField::support_radius_estimate(double threshold) const {
    const int n1 = axes_->n1(), n2 = axes_->n2();
    double r = 0.0;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            if (std::abs(node(i, j)) > threshold)
                r = std::max(r, std::hypot(axes_->x1()[i], axes_->x2()[j]));
    return r;
}

double ScalarField::trace(double y2) const {
    if (analytic_) return analytic_(0.0, y2);
    if (y2 < axes_->x2_min() || y2 > axes_->x2_max()) return 0.0;
    const int n2 = axes_->n2();
    int s2 = std::clamp(axes_->cell_x2(y2) - 1, 0, n2 - 4);
    const auto w = cubic_weights(axes_->x2().data() + s2, y2);
    const double* row = values_.data() + s2;
    return w[0] * row[0] + w[1] * row[1] + w[2] * row[2] + w[3] * row[3];
}

void write_field_csv(const ScalarField& f, const std::string& path, double alpha,
                     const std::string& sidecar_path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_field_csv: cannot open " + path);
    os << "x1,x2,value\n" << std::setprecision(17);
    const auto& g = f.axes();
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j)
            os << g.x1()[i] << ',' << g.x2()[j] << ',' << f.node(i, j) << '\n';

    nlohmann::json meta;
    meta["x1_max"] = g.x1_max();
    meta["x2_min"] = g.x2_min();
    meta["x2_max"] = g.x2_max();
    meta["n1"] = g.n1();
    meta["n2"] = g.n2();
    meta["h1_min"] = g.h1_min();
    meta["h1_max"] = g.h1_max();
    meta["h2"] = g.h2();
    meta["x1_uniform"] = g.x1_uniform();
    meta["x1_nodes"] = g.x1();
    meta["support_radius"] = f.support_radius();
    meta["alpha"] = alpha;
    std::ofstream ms(sidecar_path);
    if (!ms) throw std::runtime_error("write_field_csv: cannot open " + sidecar_path);
    ms << meta.dump(2) << '\n';
}

ScalarField read_field_csv(const std::string& path, const std::string& sidecar_path) {
    std::ifstream ms(sidecar_path);
    if (!ms) throw std::runtime_error("read_field_csv: cannot open " + sidecar_path);
    nlohmann::json meta = nlohmann::json::parse(ms);
    AxesPtr axes;
    if (meta.at("x1_uniform").get<bool>()) {
        axes = GridAxes::uniform(meta.at("n1"), meta.at("x1_max"), meta.at("n2"),
                                 meta.at("x2_min"), meta.at("x2_max"));
    } else {
        axes = GridAxes::from_nodes(meta.at("x1_nodes").get<std::vector<double>>(),
                                    meta.at("n2"), meta.at("x2_min"), meta.at("x2_max"));
    }
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_field_csv: cannot open " + path);
    std::string line;
    std::getline(is, line); // header
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(axes->n1()) * axes->n2());
    while (std::getline(is, line)) {
        const auto c2 = line.rfind(',');
        vals.push_back(std::stod(line.substr(c2 + 1)));
    }
    return ScalarField(axes, std::move(vals), meta.at("support_radius"));
}

} // namespace hpsqg
