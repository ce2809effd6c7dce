// Command-line laboratory for half-plane alpha-SQG runs: simulation,
// estimate verification, Picard iteration, and the norm-inflation
// experiment, all driven by a resolved JSON config for bit-exact replay.
//
// Exit codes: 0 ok, 1 verification gate failed, 2 config error, 3 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hpsqg/estimates.hpp"
#include "hpsqg/inflation.hpp"
#include "hpsqg/norms.hpp"
#include "hpsqg/run_config.hpp"
#include "hpsqg/svg_plot.hpp"
#include "hpsqg/transport.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hpsqg;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int workers = -1;
    long long seed = -1;
    std::vector<std::string> overrides;
};

RunConfig resolve_config(const CommonArgs& a) {
    RunConfig cfg = a.config_path.empty() ? RunConfig::from_json(json::object())
                                          : RunConfig::load(a.config_path);
    for (const auto& ov : a.overrides) cfg.apply_override(ov);
    if (a.workers >= 0) cfg.apply_override("workers=" + std::to_string(a.workers));
    if (a.seed >= 0) cfg.apply_override("seed=" + std::to_string(a.seed));
    if (!a.out_dir.empty()) cfg.apply_override("output.dir=\"" + a.out_dir + "\"");
#ifdef _OPENMP
    if (cfg.workers() > 0) omp_set_num_threads(cfg.workers());
#endif
    return cfg;
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    const fs::path dir = cfg.data().at("output").at("dir").get<std::string>();
    fs::create_directories(dir);
    cfg.save_resolved((dir / "config.resolved.json").string());
    return dir;
}

void write_string(const fs::path& p, const std::string& s) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot open " + p.string());
    os << s;
}

int cmd_simulate(const CommonArgs& args) {
    const RunConfig cfg = resolve_config(args);
    const fs::path dir = prepare_out_dir(cfg);
    const AxesPtr axes = cfg.make_axes();
    const Alpha alpha = cfg.alpha();
    const InitialData data = cfg.make_initial_data();

    SolverOptions opts;
    opts.exploratory = cfg.exploratory();
    opts.pair_budget = cfg.data().at("solver").at("pair_budget").get<int>();
    opts.seed = cfg.seed();
    opts.store_stride = cfg.data().at("solver").at("store_stride").get<int>();
    TransportSolver solver(axes, alpha, cfg.beta(), cfg.make_quadrature(), opts);

    const ScalarField theta0(axes, data.value, data.support_radius, false);
    const auto states = solver.simulate(theta0, cfg.solver_T(), cfg.solver_dt());

    std::string norms_b, norms_a, blowup = "t,d2_sup,wd1_alpha\n";
    append_norm_csv_header(norms_b);
    append_norm_csv_header(norms_a);
    for (const auto& s : states) {
        append_norm_csv_row(norms_b, s.t, s.norm_beta);
        append_norm_csv_row(norms_a, s.t, s.norm_alpha);
        std::ostringstream os;
        os.precision(17);
        os << s.t << ',' << s.blowup.d2_sup << ',' << s.blowup.wd1_alpha << '\n';
        blowup += os.str();
    }
    write_string(dir / "norms.csv", norms_b);
    write_string(dir / "norms_alpha.csv", norms_a);
    write_string(dir / "blowup.csv", blowup);

    const int dump = cfg.data().at("solver").at("field_dump_stride").get<int>();
    if (dump > 0) {
        fs::create_directories(dir / "fields");
        for (std::size_t k = 0; k < states.size(); k += dump) {
            std::ostringstream name;
            name << "step_" << k;
            write_field_csv(*states[k].theta, (dir / "fields" / (name.str() + ".csv")).string(),
                            alpha.value, (dir / "fields" / (name.str() + ".meta.json")).string());
        }
    }

    json summary;
    summary["steps"] = states.size() - 1;
    summary["final_t"] = states.back().t;
    summary["sup_norm_initial"] = states.front().norm_beta.sup_norm;
    summary["sup_norm_final"] = states.back().norm_beta.sup_norm;
    summary["support_radius_final"] = states.back().support_radius_est;
    summary["max_overshoot"] = [&] {
        double m = 0;
        for (const auto& s : states) m = std::max(m, s.overshoot);
        return m;
    }();
    // Lip-in-time estimate of sup |theta(t)-theta(s)| / |t-s|
    double lip = 0.0;
    for (std::size_t k = 1; k < states.size(); ++k) {
        double diff = 0.0;
        for (std::size_t n = 0; n < states[k].theta->values().size(); ++n)
            diff = std::max(diff, std::abs(states[k].theta->values()[n] -
                                           states[k - 1].theta->values()[n]));
        lip = std::max(lip, diff / (states[k].t - states[k - 1].t));
    }
    summary["time_lipschitz_sup"] = lip;
    write_string(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "simulate: " << states.size() - 1 << " stored states, final t = "
              << states.back().t << ", outputs in " << dir << "\n";
    return 0;
}

int cmd_verify(const CommonArgs& args, const std::vector<std::string>& ids_flag) {
    const RunConfig cfg = resolve_config(args);
    const fs::path dir = prepare_out_dir(cfg);
    std::vector<std::string> ids = ids_flag;
    if (ids.empty())
        ids = cfg.data().at("estimates").at("ids").get<std::vector<std::string>>();

    std::vector<EstimateId> parsed;
    for (const auto& s : ids) {
        const auto id = parse_estimate(s);
        if (!id) throw ConfigError("verify: unknown estimate_id `" + s + "`");
        parsed.push_back(*id);
    }

    const Alpha alpha = cfg.alpha();
    const QuadratureConfig q = cfg.make_quadrature();
    const int n = cfg.data().at("estimates").at("grid_n").get<int>();
    const AxesPtr axes = GridAxes::uniform(n, 1.6, n, -1.3, 1.3);
    const int family_size = cfg.data().at("estimates").at("family_size").get<int>();
    const double gate = cfg.data().at("gates").at("ratio_max").get<double>();
    const std::uint64_t seed = cfg.seed();

    bool all_pass = true;
    auto emit = [&](const EstimateReport& r) {
        write_estimate_csv(r, (dir / (estimate_name(r.id) + ".csv")).string());
        std::cout << estimate_name(r.id) << ": constant = " << r.fitted_constant;
        if (r.fitted_slope) std::cout << ", slope = " << *r.fitted_slope;
        std::cout << (r.pass ? " [pass]" : " [FAIL]") << "\n";
        all_pass = all_pass && r.pass;
    };

    for (EstimateId id : parsed) {
        switch (id) {
            case EstimateId::U1_REG: {
                const auto family = random_field_family(
                    cfg.data().at("estimates").value("u1_family", 10), seed, true);
                emit(verify_u1_regularity(family, alpha, axes, q, gate, seed));
                break;
            }
            case EstimateId::DU2_ASYMP:
            case EstimateId::U2_D2_BOUND: {
                const InitialData kink = make_preset("kink_trace", json::object());
                const AxesPtr fine = GridAxes::uniform(16, 0.5, 1024, -1.2, 1.2);
                const ScalarField theta(fine, kink.value, kink.support_radius, true);
                std::vector<double> ladder;
                for (int k = 3; k <= 9; ++k) ladder.push_back(std::pow(2.0, -k));
                emit(verify_dU2_asymptotic(theta, alpha, ladder, 0.0, 1.0 - alpha.value,
                                           cfg.data().at("gates").at("du2_slope_tol")));
                break;
            }
            case EstimateId::L2_V2:
            case EstimateId::L2_WEIGHTED_V1: {
                const auto family = random_field_family(family_size, seed, true);
                const L2BoundsResult r = verify_L2_bounds(family, alpha, axes, q, gate, seed);
                emit(id == EstimateId::L2_V2 ? r.v2 : r.weighted_v1);
                break;
            }
            case EstimateId::FARFIELD_LIP: {
                const InitialData bump = make_preset("boundary_bump", json::object());
                const ScalarField theta(axes, bump.value, bump.support_radius, true);
                emit(verify_farfield_lipschitz(
                    theta, alpha, {0.1, 0.2, 0.4, 0.8}, q,
                    cfg.data().at("gates").at("farfield_slope_tol"), seed));
                break;
            }
            case EstimateId::ENERGY_2THT: {
                SolverOptions opts;
                opts.exploratory = cfg.exploratory();
                opts.seed = seed;
                TransportSolver solver(cfg.make_axes(), alpha, cfg.beta(),
                                       cfg.make_quadrature(), opts);
                const InitialData data = cfg.make_initial_data();
                const ScalarField theta0(cfg.make_axes(), data.value, data.support_radius,
                                         false);
                // runs on the config grid; keep the run short
                const auto states =
                    solver.simulate(theta0, cfg.solver_T(), cfg.solver_dt());
                emit(verify_energy_inequalities(states, alpha, cfg.beta()));
                break;
            }
        }
    }
    return all_pass ? 0 : 1;
}

int cmd_inflation(const CommonArgs& args) {
    const RunConfig cfg = resolve_config(args);
    const fs::path dir = prepare_out_dir(cfg);
    const AxesPtr axes = cfg.make_axes();
    const Alpha alpha = cfg.alpha();
    const ProbeConfig pc = cfg.make_probe_config();
    validate_ladder_resolution(pc, *axes); // ConfigError -> exit 2 path
    const InitialData data = cfg.make_initial_data();

    SolverOptions opts;
    opts.exploratory = cfg.exploratory();
    opts.pair_budget = cfg.data().at("solver").at("pair_budget").get<int>();
    opts.seed = cfg.seed();
    TransportSolver solver(axes, alpha, cfg.beta(), cfg.make_quadrature(), opts);

    const InflationSummary s =
        run_inflation(data, alpha, pc, solver, cfg.solver_T(), cfg.solver_dt());

    write_inflation_csv(s, pc, (dir / "inflation.csv").string());
    fs::create_directories(dir / "gaps");
    for (const auto& r : s.records) {
        std::ostringstream name;
        name << "ell_" << r.ell << ".csv";
        write_gap_csv(r, (dir / "gaps" / name.str()).string());
    }

    json summary;
    summary["eps_fit_median"] = s.eps_fit_median;
    summary["missing_crossings"] = s.missing_crossings;
    if (s.crossing_fit) {
        summary["crossing_slope"] = s.crossing_fit->slope;
        summary["crossing_slope_stderr"] = s.crossing_fit->slope_stderr;
        summary["crossing_slope_expected"] = -(alpha.value - pc.gamma);
    }
    if (s.quotient_fit) {
        summary["quotient_slope"] = s.quotient_fit->slope;
        summary["quotient_slope_stderr"] = s.quotient_fit->slope_stderr;
        summary["quotient_slope_expected"] =
            pc.beta_test * pc.gamma - (1.0 - pc.beta_test) * (1.0 - pc.gamma);
    }
    write_string(dir / "summary.json", summary.dump(2) + "\n");

    if (cfg.data().at("output").value("svg", false)) {
        std::vector<double> ells, ts, qs;
        for (const auto& r : s.records)
            if (r.crossing_time) {
                ells.push_back(r.ell);
                ts.push_back(*r.crossing_time);
            }
        if (s.crossing_fit)
            write_loglog_svg((dir / "crossing_time.svg").string(), "t* vs ell", ells, ts,
                             *s.crossing_fit);
        if (s.quotient_fit) {
            std::vector<double> le;
            for (const auto& r : s.records) {
                le.push_back(r.ell);
                qs.push_back(r.quotient);
            }
            write_loglog_svg((dir / "quotient.svg").string(), "quotient vs ell", le, qs,
                             *s.quotient_fit);
        }
    }

    std::cout << "inflation: ";
    if (s.crossing_fit) std::cout << "crossing slope = " << s.crossing_fit->slope << ", ";
    if (s.quotient_fit) std::cout << "quotient slope = " << s.quotient_fit->slope << ", ";
    std::cout << "missing crossings = " << s.missing_crossings << ", outputs in " << dir
              << "\n";
    return 0;
}

int cmd_picard(const CommonArgs& args) {
    const RunConfig cfg = resolve_config(args);
    const fs::path dir = prepare_out_dir(cfg);
    const AxesPtr axes = cfg.make_axes();
    SolverOptions opts;
    opts.exploratory = cfg.exploratory();
    opts.seed = cfg.seed();
    TransportSolver solver(axes, cfg.alpha(), cfg.beta(), cfg.make_quadrature(), opts);
    const InitialData data = cfg.make_initial_data();
    const ScalarField theta0(axes, data.value, data.support_radius, false);
    const int n_max = cfg.data().at("solver").at("picard_n_max").get<int>();
    const auto recs = solver.picard(theta0, cfg.solver_T(), cfg.solver_dt(), n_max);
    std::ostringstream os;
    os << "n,l2_diff,x_beta\n";
    os.precision(17);
    for (const auto& r : recs) os << r.n << ',' << r.l2_diff << ',' << r.x_beta << '\n';
    write_string(dir / "picard.csv", os.str());
    std::cout << "picard: " << recs.size() << " iterates, outputs in " << dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"half-plane alpha-SQG numerical laboratory"};
    app.require_subcommand(1);

    CommonArgs args;
    std::vector<std::string> estimate_ids;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON config path");
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--workers", args.workers, "worker cap (default: all cores)");
        sub->add_option("--seed", args.seed, "seed override");
        sub->add_option("--override", args.overrides, "dot-path KEY=VALUE override");
    };
    CLI::App* sim = app.add_subcommand("simulate", "evolve theta and record diagnostics");
    CLI::App* ver = app.add_subcommand("verify", "run estimate verifiers against gates");
    ver->add_option("--estimates", estimate_ids, "estimate ids (comma ok)")->delimiter(',');
    CLI::App* inf = app.add_subcommand("inflation", "norm-inflation experiment");
    CLI::App* pic = app.add_subcommand("picard", "Picard iteration records");
    add_common(sim);
    add_common(ver);
    add_common(inf);
    add_common(pic);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(args);
        if (ver->parsed()) return cmd_verify(args, estimate_ids);
        if (inf->parsed()) return cmd_inflation(args);
        if (pic->parsed()) return cmd_picard(args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
