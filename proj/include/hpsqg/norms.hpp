#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hpsqg/geometry.hpp"

namespace hpsqg {

/// Estimates of the anisotropic weighted norm pieces for a gridded field.
/// The pair supremum is sampled, so holder_seminorm_lb (and hence
/// x_beta_norm) is a lower bound of the true value.
struct NormReport {
    double sup_norm = 0.0;
    double holder_seminorm_lb = 0.0;
    double beta = 0.0;
    double weighted_d1 = 0.0; // sup of x1^(1-beta) |d1 f|
    double d2_sup = 0.0;      // sup of |d2 f|
    double x_beta_norm = 0.0; // sum of the four entries above
};

/// Sampled Hoelder seminorm sup |f(x)-f(x')| / |x-x'|^beta. Pairs come from
/// three deterministic-plus-seeded categories: all adjacent grid pairs,
/// seeded random node pairs, and boundary-anchored vertical pairs (the
/// boundary is where the inflation lives).
double holder_seminorm(const ScalarField& f, double beta, int pair_budget,
                       std::uint64_t seed = 12345);

/// Full anisotropic norm report. The weighted x1 derivative excludes the
/// x1 = 0 row; the first evaluation sits at the staggered half-cell point.
NormReport weighted_x_norm(const ScalarField& f, double beta,
                           int pair_budget = 20000, std::uint64_t seed = 12345);

/// Pointwise Hoelder quotient |f(x)-f(x')| / |x-x'|^beta via interpolation.
double holder_quotient(const ScalarField& f, Vec2 x, Vec2 xp, double beta);

/// One CSV row per (time, report); fixed column order `t,sup,holder,wd1,d2,xbeta`.
void append_norm_csv_header(std::string& out);
void append_norm_csv_row(std::string& out, double t, const NormReport& r);

} // namespace hpsqg
