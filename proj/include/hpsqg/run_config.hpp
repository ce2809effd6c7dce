#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hpsqg/biot_savart.hpp"
#include "hpsqg/geometry.hpp"
#include "hpsqg/inflation.hpp"
#include "hpsqg/presets.hpp"

namespace hpsqg {

/// Configuration problem: the CLI maps this to exit code 2. The message
/// names the offending key.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Fully resolved run configuration. Loading merges the user file over the
/// complete defaults so the resolved form replays bit-exactly.
class RunConfig {
public:
    static nlohmann::json defaults();
    static RunConfig load(const std::string& path);
    static RunConfig from_json(const nlohmann::json& user);

    /// Dot-path override, e.g. "solver.dt=0.001".
    void apply_override(const std::string& key_eq_value);

    const nlohmann::json& data() const { return j_; }
    void save_resolved(const std::string& path) const;

    double alpha_value() const;
    Alpha alpha() const;
    double beta() const;
    std::uint64_t seed() const;
    int workers() const;
    AxesPtr make_axes() const;
    QuadratureConfig make_quadrature() const;
    InitialData make_initial_data() const;
    ProbeConfig make_probe_config() const;
    double solver_dt() const;
    double solver_T() const;
    bool exploratory() const;

private:
    nlohmann::json j_;
};

} // namespace hpsqg
