#pragma once

#include <vector>

namespace hpsqg {

/// Least-squares line fit y = intercept + slope * x with the standard error
/// of the slope. Used for every scaling-exponent estimate in the harness.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual_rms = 0.0;
    int n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Log-log regression: fits log(y) = intercept + slope*log(x). All x,y must
/// be positive; offending samples are rejected with std::invalid_argument.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

} // namespace hpsqg
