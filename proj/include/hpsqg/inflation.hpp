#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hpsqg/fit.hpp"
#include "hpsqg/presets.hpp"
#include "hpsqg/transport.hpp"

namespace hpsqg {

/// Probe geometry for the norm-inflation experiment. The anchor sits on the
/// boundary at (0, a); each ladder member ell pairs it with
/// x = (1/ell, a - ell^-(1-gamma)). theorem3_mode replaces the anchor by
/// x' = (ell^-2, a - ell^-(2-gamma)).
struct ProbeConfig {
    double a = 0.0;
    double gamma = 0.4;
    std::vector<double> ell_ladder = {8, 16, 32, 64, 128};
    double beta_test = 0.75;
    bool theorem3_mode = false;
    bool allow_cross_mode = false; // theorem3 pairing outside alpha > 1/2
    bool control_mode = false;     // boundary-vanishing data: skip anchor checks
    double safety = 2.0;           // crossing-search horizon factor on t_ell
};

struct ProbePair {
    double ell = 0.0;
    Vec2 anchor{};
    Vec2 probe{};
};

struct InflationRecord {
    double ell = 0.0;
    ProbePair pair;
    std::optional<double> crossing_time;
    double quotient = 0.0;      // Hoelder quotient at crossing (or matched time)
    double quotient_time = 0.0; // when the quotient was evaluated
    std::vector<double> gap_times;
    std::vector<double> gaps; // Phi2(anchor) - Phi2(probe)
    double eps_fit = 0.0;
    double decay_rate = 0.0; // fitted d(gap)/dt before crossing
    int monotone_violations = 0;
};

struct GapDecayReport {
    double rate = 0.0; // fitted slope of the gap history (expected negative)
    double eps_fit = 0.0;
    int monotone_violations = 0;
};

struct InflationSummary {
    std::vector<InflationRecord> records;
    std::optional<LineFit> crossing_fit; // log t* vs log ell
    std::optional<LineFit> quotient_fit; // log quotient vs log ell
    double eps_fit_median = 0.0;
    int missing_crossings = 0;
};

/// Probe construction with the anchor-hypothesis and admissibility checks.
std::vector<ProbePair> make_probes(const InitialData& theta0, Alpha alpha,
                                   const ProbeConfig& cfg);

/// Validates that the finest ladder scale is resolvable: 1/ell >= 4 h1_min.
void validate_ladder_resolution(const ProbeConfig& cfg, const GridAxes& axes);

/// Full experiment: evolve theta with the transport solver, advect both
/// probe trajectories under the snapshot-interpolated velocity, detect the
/// tangential crossing, and evaluate the Hoelder quotient at the evolved
/// pair. Stops early once every ladder member has crossed. For records
/// without a crossing, matched_times (when provided, one per ladder entry)
/// selects the quotient evaluation time.
InflationSummary run_inflation(const InitialData& theta0, Alpha alpha,
                               const ProbeConfig& cfg, const TransportSolver& solver,
                               double T, double dt,
                               const std::vector<double>& matched_times = {});

/// Monotonicity and decay-rate fit of one record's gap history.
GapDecayReport gap_decay_check(const InflationRecord& rec, double theta0_at_anchor,
                               Alpha alpha);

void write_inflation_csv(const InflationSummary& s, const ProbeConfig& cfg,
                         const std::string& path);
void write_gap_csv(const InflationRecord& r, const std::string& path);

} // namespace hpsqg
