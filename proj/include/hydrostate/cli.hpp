#pragma once

#include "hydrostate/estimator.hpp"
#include "hydrostate/fuzzy.hpp"
#include "hydrostate/hydraulics.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hydrostate::cli {

enum class OutputFormat { json, csv };

/// Shared run settings. Precedence: flags > config file > defaults.
struct RunConfig {
    double tol_r = 1e-8;
    double tol_x = 1e-8;
    int max_iter = 50;
    double omega = 1.0;
    double theta = kDefaultTheta;
    double gamma = kDefaultGamma;
    std::optional<std::uint64_t> seed;
    OutputFormat format = OutputFormat::json;

    /// Throws ValidationError naming the offending setting.
    void validate() const;
    /// Overlay the keys present in a config document
    /// (tol_r, tol_x, max_iter, omega, theta, gamma, seed, format).
    /// Throws SchemaError at the offending key.
    void merge(const nlohmann::json& config);
    [[nodiscard]] nlohmann::json to_json() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    [[nodiscard]] SolverOptions solver() const;
    [[nodiscard]] EstimatorOptions estimator() const;
};

/// Environment variable naming a default config file.
inline constexpr const char* kConfigEnv = "HYDROSTATE_CONFIG";

/// Runs one command line (args excludes the program name). Reports go to
/// `out`, usage text to `err`. Returns 0 on success, 1 on domain errors
/// (with a JSON error object on `out`), 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hydrostate::cli
