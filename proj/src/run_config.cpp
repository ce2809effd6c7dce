#include "hpsqg/run_config.hpp"

#include <fstream>

namespace hpsqg {

using json = nlohmann::json;

json RunConfig::defaults() {
    json d;
    d["alpha"] = 0.5;
    d["beta"] = 0.5;
    d["exploratory"] = false;
    d["seed"] = 12345;
    d["workers"] = 0;
    d["grid"] = {{"type", "uniform"}, {"n1", 128},    {"x1max", 2.0},
                 {"n2", 128},         {"x2min", -1.0}, {"x2max", 1.0},
                 {"h1min", 0.0018},   {"ratio", 1.1},  {"h1max", 0.05}};
    d["quadrature"] = {{"inner_radius", 4.0},
                       {"polar_rings", 16},
                       {"polar_sectors", 32},
                       {"far_tolerance", 1e-8}};
    d["initial_data"] = {{"preset", "interior_bump"}, {"params", json::object()}};
    d["solver"] = {{"dt", 0.002},        {"T", 0.1},           {"store_stride", 1},
                   {"field_dump_stride", 0}, {"pair_budget", 20000}, {"picard_n_max", 5}};
    d["probes"] = {{"a", 0.0},
                   {"gamma", 0.4},
                   {"ell_ladder", json::array({8.0, 16.0, 32.0, 64.0, 128.0})},
                   {"beta_test", 0.75},
                   {"theorem3_mode", false},
                   {"allow_cross_mode", false},
                   {"control_mode", false},
                   {"safety", 2.0}};
    d["estimates"] = {{"ids", json::array({"L2_V2", "L2_WEIGHTED_V1"})},
                      {"family_size", 50},
                      {"grid_n", 96}};
    d["gates"] = {{"ratio_max", 1e6},
                  {"du2_slope_tol", 0.1},
                  {"farfield_slope_tol", 0.15}};
    d["output"] = {{"dir", "run_out"}, {"svg", false}};
    return d;
}

namespace {

void deep_merge(json& base, const json& over) {
    for (auto it = over.begin(); it != over.end(); ++it) {
        if (it->is_object() && base.contains(it.key()) && base[it.key()].is_object())
            deep_merge(base[it.key()], *it);
        else
            base[it.key()] = *it;
    }
}

const json& fetch(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("config: missing key `" + key + "`");
    return j.at(key);
}

} // namespace

RunConfig RunConfig::from_json(const json& user) {
    RunConfig c;
    c.j_ = defaults();
    deep_merge(c.j_, user);
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open `" + path + "`");
    json user;
    try {
        user = json::parse(is);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    return from_json(user);
}

void RunConfig::apply_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override: expected KEY=VALUE, got `" + kv + "`");
    const std::string path = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (...) {
        value = raw; // bare string
    }
    json* node = &j_;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string part = path.substr(pos, dot - pos);
        if (part.empty()) throw ConfigError("override: bad key path `" + path + "`");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            break;
        }
        node = &(*node)[part];
        pos = dot + 1;
    }
}

void RunConfig::save_resolved(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("config: cannot write `" + path + "`");
    os << j_.dump(2) << '\n';
}

double RunConfig::alpha_value() const { return fetch(j_, "alpha").get<double>(); }

Alpha RunConfig::alpha() const {
    const double a = alpha_value();
    const bool ack = j_.value("log_lipschitz_ack", false);
    try {
        return Alpha(a, ack);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: key `alpha`: ") + e.what());
    }
}

double RunConfig::beta() const { return fetch(j_, "beta").get<double>(); }
std::uint64_t RunConfig::seed() const { return fetch(j_, "seed").get<std::uint64_t>(); }
int RunConfig::workers() const { return j_.value("workers", 0); }
double RunConfig::solver_dt() const { return fetch(fetch(j_, "solver"), "dt").get<double>(); }
double RunConfig::solver_T() const { return fetch(fetch(j_, "solver"), "T").get<double>(); }
bool RunConfig::exploratory() const { return j_.value("exploratory", false); }

AxesPtr RunConfig::make_axes() const {
    const json& g = fetch(j_, "grid");
    const std::string type = fetch(g, "type").get<std::string>();
    try {
        if (type == "uniform")
            return GridAxes::uniform(fetch(g, "n1").get<int>(), fetch(g, "x1max").get<double>(),
                                     fetch(g, "n2").get<int>(), fetch(g, "x2min").get<double>(),
                                     fetch(g, "x2max").get<double>());
        if (type == "stretched")
            return GridAxes::stretched_x1(
                fetch(g, "h1min").get<double>(), fetch(g, "ratio").get<double>(),
                fetch(g, "h1max").get<double>(), fetch(g, "x1max").get<double>(),
                fetch(g, "n2").get<int>(), fetch(g, "x2min").get<double>(),
                fetch(g, "x2max").get<double>());
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: key `grid`: ") + e.what());
    }
    throw ConfigError("config: key `grid.type` must be `uniform` or `stretched`");
}

QuadratureConfig RunConfig::make_quadrature() const {
    const json& q = fetch(j_, "quadrature");
    QuadratureConfig qc;
    qc.inner_radius = fetch(q, "inner_radius").get<double>();
    qc.polar_rings = fetch(q, "polar_rings").get<int>();
    qc.polar_sectors = fetch(q, "polar_sectors").get<int>();
    qc.far_tolerance = fetch(q, "far_tolerance").get<double>();
    try {
        qc.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: key `quadrature`: ") + e.what());
    }
    return qc;
}

InitialData RunConfig::make_initial_data() const {
    const json& d = fetch(j_, "initial_data");
    const std::string preset = fetch(d, "preset").get<std::string>();
    try {
        return make_preset(preset, d.value("params", json::object()));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: key `initial_data.preset`: ") + e.what());
    }
}

ProbeConfig RunConfig::make_probe_config() const {
    const json& p = fetch(j_, "probes");
    ProbeConfig pc;
    pc.a = fetch(p, "a").get<double>();
    pc.gamma = fetch(p, "gamma").get<double>();
    pc.ell_ladder = fetch(p, "ell_ladder").get<std::vector<double>>();
    pc.beta_test = fetch(p, "beta_test").get<double>();
    pc.theorem3_mode = fetch(p, "theorem3_mode").get<bool>();
    pc.allow_cross_mode = fetch(p, "allow_cross_mode").get<bool>();
    pc.control_mode = fetch(p, "control_mode").get<bool>();
    pc.safety = fetch(p, "safety").get<double>();
    return pc;
}

} // namespace hpsqg
