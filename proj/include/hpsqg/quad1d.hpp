#pragma once

#include <functional>

namespace hpsqg {

/// One-dimensional quadrature helpers shared by the boundary-potential and
/// constant evaluations. All routines are pure and deterministic.
namespace quad1d {

/// Adaptive Gauss-Kronrod (G7/K15) on [a,b] to absolute tolerance abs_tol.
/// Bisection depth is capped; integrable endpoint singularities converge
/// through the graded subdivision.
double adaptive(const std::function<double(double)>& f, double a, double b,
                double abs_tol, int max_depth = 52);

/// Fixed-order Gauss-Legendre on [a,b]. n in {16, 32, 64}.
double gauss(const std::function<double(double)>& f, double a, double b, int n);

} // namespace quad1d

} // namespace hpsqg
