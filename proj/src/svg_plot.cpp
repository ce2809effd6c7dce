#include "hpsqg/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hpsqg {

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::vector<double>& x, const std::vector<double>& y,
                      const LineFit& fit) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("write_loglog_svg: bad data");
    const int W = 480, H = 360, M = 50;
    double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log10(x[i]);
        ly[i] = std::log10(y[i]);
        lx0 = std::min(lx0, lx[i]);
        lx1 = std::max(lx1, lx[i]);
        ly0 = std::min(ly0, ly[i]);
        ly1 = std::max(ly1, ly[i]);
    }
    const double padx = 0.05 * std::max(1e-6, lx1 - lx0);
    const double pady = 0.05 * std::max(1e-6, ly1 - ly0);
    lx0 -= padx; lx1 += padx; ly0 -= pady; ly1 += pady;
    auto px = [&](double v) { return M + (v - lx0) / (lx1 - lx0) * (W - 2 * M); };
    auto py = [&](double v) { return H - M - (v - ly0) / (ly1 - ly0) * (H - 2 * M); };

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
       << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
       << "</text>\n";
    os << "<line x1='" << M << "' y1='" << H - M << "' x2='" << W - M << "' y2='" << H - M
       << "' stroke='black'/>\n";
    os << "<line x1='" << M << "' y1='" << M << "' x2='" << M << "' y2='" << H - M
       << "' stroke='black'/>\n";
    // fitted line in natural-log space: log y = a + b log x
    const double yl = (fit.intercept + fit.slope * (lx0 * std::log(10.0))) / std::log(10.0);
    const double yr = (fit.intercept + fit.slope * (lx1 * std::log(10.0))) / std::log(10.0);
    os << "<line x1='" << px(lx0) << "' y1='" << py(yl) << "' x2='" << px(lx1) << "' y2='"
       << py(yr) << "' stroke='steelblue' stroke-width='1.5'/>\n";
    for (std::size_t i = 0; i < lx.size(); ++i)
        os << "<circle cx='" << px(lx[i]) << "' cy='" << py(ly[i])
           << "' r='4' fill='crimson'/>\n";
    os << "<text x='" << W / 2 << "' y='" << H - 12
       << "' text-anchor='middle' font-size='12'>slope = " << fit.slope << "</text>\n";
    os << "</svg>\n";

    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_loglog_svg: cannot open " + path);
    f << os.str();
}

} // namespace hpsqg
