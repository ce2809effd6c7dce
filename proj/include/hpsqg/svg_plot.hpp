#pragma once

#include <string>
#include <vector>

#include "hpsqg/fit.hpp"

namespace hpsqg {

/// Minimal log-log scatter plot with the fitted line, for the inflation
/// summary figures.
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::vector<double>& x, const std::vector<double>& y,
                      const LineFit& fit);

} // namespace hpsqg
