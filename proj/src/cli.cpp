#include "hydrostate/cli.hpp"

#include "hydrostate/error_limits.hpp"
#include "hydrostate/errors.hpp"
#include "hydrostate/report_io.hpp"
#include "hydrostate/scenario.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hydrostate::cli {

namespace {

using io::Json;

class IoError : public Error {
public:
    using Error::Error;
    [[nodiscard]] std::string kind() const override { return "IoError"; }
};

class UsageError : public Error {
public:
    using Error::Error;
    [[nodiscard]] std::string kind() const override { return "UsageError"; }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream outf(path, std::ios::binary | std::ios::trunc);
    if (!outf || !(outf << text)) throw IoError("cannot write '" + path + "'");
}

Json read_json(const std::string& path) { return io::parse_text(read_file(path)); }

// Flag values captured by CLI11; `present` tells whether each was given.
struct Flags {
    double tol_r = 0, tol_x = 0, omega = 0, theta = 0, gamma = 0;
    int max_iter = 0;
    std::uint64_t seed = 0;
    std::string format, out, config;
    CLI::Option* tol_r_opt = nullptr;
    CLI::Option* tol_x_opt = nullptr;
    CLI::Option* max_iter_opt = nullptr;
    CLI::Option* omega_opt = nullptr;
    CLI::Option* theta_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* format_opt = nullptr;
    CLI::Option* config_opt = nullptr;
};

RunConfig resolve_config(const Flags& f) {
    RunConfig cfg;
    std::string config_path;
    if (f.config_opt->count() > 0)
        config_path = f.config;
    else if (const char* env = std::getenv(kConfigEnv); env && *env)
        config_path = env;
    if (!config_path.empty()) cfg.merge(read_json(config_path));

    if (f.tol_r_opt->count()) cfg.tol_r = f.tol_r;
    if (f.tol_x_opt->count()) cfg.tol_x = f.tol_x;
    if (f.max_iter_opt->count()) cfg.max_iter = f.max_iter;
    if (f.omega_opt->count()) cfg.omega = f.omega;
    if (f.theta_opt->count()) cfg.theta = f.theta;
    if (f.gamma_opt->count()) cfg.gamma = f.gamma;
    if (f.seed_opt->count()) cfg.seed = f.seed;
    if (f.format_opt->count()) cfg.format = f.format == "csv" ? OutputFormat::csv : OutputFormat::json;
    try {
        cfg.validate();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

void emit(const std::string& text, const Flags& f, std::ostream& out) {
    if (f.out.empty())
        out << text;
    else
        write_file(f.out, text);
}

void require_json(const RunConfig& cfg, const std::string& command) {
    if (cfg.format == OutputFormat::csv)
        throw UsageError("subcommand '" + command + "' writes JSON files only; --format csv is not supported");
}

}  // namespace

void RunConfig::validate() const {
    if (!(tol_r > 0.0)) throw ValidationError("tol_r", "--tol-r must be > 0");
    if (!(tol_x > 0.0)) throw ValidationError("tol_x", "--tol-x must be > 0");
    if (max_iter < 1) throw ValidationError("max_iter", "--max-iter must be >= 1");
    if (!(omega > 0.0 && omega <= 1.5)) throw ValidationError("omega", "--omega must lie in (0, 1.5]");
    if (!(theta > 0.0 && theta <= 1.0)) throw ValidationError("theta", "--theta must lie in (0, 1]");
    if (!(gamma > 0.0)) throw ValidationError("gamma", "--gamma must be > 0");
}

void RunConfig::merge(const nlohmann::json& config) {
    if (!config.is_object()) throw SchemaError("", "config object", config.type_name());
    for (const auto& [key, value] : config.items()) {
        const std::string path = "/" + key;
        const auto number = [&](const char* expected, auto accept) {
            if (!value.is_number()) throw SchemaError(path, expected, value.type_name());
            const double v = value.get<double>();
            if (!accept(v)) throw SchemaError(path, expected, value.dump());
            return v;
        };
        const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
        if (key == "tol_r") tol_r = number("number > 0", positive);
        else if (key == "tol_x") tol_x = number("number > 0", positive);
        else if (key == "gamma") gamma = number("number > 0", positive);
        else if (key == "omega")
            omega = number("number in (0, 1.5]", [](double v) { return v > 0.0 && v <= 1.5; });
        else if (key == "theta")
            theta = number("number in (0, 1]", [](double v) { return v > 0.0 && v <= 1.0; });
        else if (key == "max_iter") {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 1 ||
                value.get<std::int64_t>() > 1000000)
                throw SchemaError(path, "integer in [1, 1000000]", value.dump());
            max_iter = value.get<int>();
        } else if (key == "seed") {
            if (!value.is_number_unsigned()) throw SchemaError(path, "non-negative integer", value.dump());
            seed = value.get<std::uint64_t>();
        } else if (key == "format") {
            if (value != "json" && value != "csv") throw SchemaError(path, "\"json\" or \"csv\"", value.dump());
            format = value == "csv" ? OutputFormat::csv : OutputFormat::json;
        } else if (key == "version") {
            if (value != 1) throw SchemaError(path, "1", value.dump());
        } else {
            throw SchemaError(path, "known config key", "\"" + key + "\"");
        }
    }
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j = {{"version", 1},       {"tol_r", tol_r}, {"tol_x", tol_x},
                        {"max_iter", max_iter}, {"omega", omega}, {"theta", theta},
                        {"gamma", gamma},
                        {"format", format == OutputFormat::csv ? "csv" : "json"}};
    if (seed) j["seed"] = *seed;
    return j;
}

SolverOptions RunConfig::solver() const {
    SolverOptions o;
    o.tol_r = tol_r;
    o.max_iter = max_iter;
    return o;
}

EstimatorOptions RunConfig::estimator() const {
    EstimatorOptions o;
    o.tol_x = tol_x;
    o.max_iter = max_iter;
    o.omega = omega;
    return o;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Water network steady state, state estimation, error limits and fuzzy anomaly "
                 "classification.",
                 "hydrostate"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    f.tol_r_opt = app.add_option("--tol-r", f.tol_r, "Residual tolerance of the steady-state solve");
    f.tol_x_opt = app.add_option("--tol-x", f.tol_x, "Step tolerance of the estimator");
    f.max_iter_opt = app.add_option("--max-iter", f.max_iter, "Iteration limit");
    f.omega_opt = app.add_option("--omega", f.omega, "Estimator over-relaxation factor in (0, 1.5]");
    f.theta_opt = app.add_option("--theta", f.theta, "Maximum cell side for training");
    f.gamma_opt = app.add_option("--gamma", f.gamma, "Fuzziness slope for training");
    f.seed_opt = app.add_option("--seed", f.seed, "Random seed (overrides the scenario spec)");
    f.format_opt = app.add_option("--format", f.format, "Report format")
                       ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", f.out, "Write the report or output file here instead of stdout");
    f.config_opt = app.add_option("--config", f.config, "JSON config file (default: $HYDROSTATE_CONFIG)");

    std::string network_path, second_path;
    auto* solve = app.add_subcommand("solve", "Steady-state hydraulic solve");
    solve->add_option("network", network_path, "Network file")->required();
    auto* estimate = app.add_subcommand("estimate", "Weighted least-squares state estimation");
    estimate->add_option("network", network_path, "Network file")->required();
    estimate->add_option("measurements", second_path, "Measurement file")->required();
    auto* bounds = app.add_subcommand("bounds", "Error limits of the estimated state");
    bounds->add_option("network", network_path, "Network file")->required();
    bounds->add_option("measurements", second_path, "Measurement file")->required();
    auto* gen = app.add_subcommand("gen", "Generate labeled interval patterns from scenarios");
    gen->add_option("network", network_path, "Network file")->required();
    gen->add_option("spec", second_path, "Scenario spec file")->required();
    auto* train = app.add_subcommand("train", "Train a fuzzy cell classifier");
    train->add_option("patterns", network_path, "Pattern file")->required();
    auto* classify_cmd = app.add_subcommand("classify", "Classify patterns with a trained model");
    classify_cmd->add_option("model", network_path, "Model file")->required();
    classify_cmd->add_option("patterns", second_path, "Pattern file")->required();

    std::vector<const char*> argv{"hydrostate"};
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        out << io::dump(Json{{"error", "UsageError"}, {"detail", e.what()}});
        return 2;
    }

    try {
        const RunConfig cfg = resolve_config(f);
        const bool csv = cfg.format == OutputFormat::csv;

        if (solve->parsed()) {
            const Network net = io::decode_network(read_json(network_path));
            const SolveReport report = solve_steady_state(net, cfg.solver());
            emit(csv ? io::csv_state(report.state, net) : io::dump(io::encode(report, net)), f, out);
        } else if (estimate->parsed()) {
            const Network net = io::decode_network(read_json(network_path));
            const MeasurementSet meas = io::decode_measurements(read_json(second_path), net);
            const EstimateReport report = estimate_state(net, meas, cfg.estimator());
            emit(csv ? io::csv_state(report.state, net) : io::dump(io::encode(report, net)), f, out);
        } else if (bounds->parsed()) {
            const Network net = io::decode_network(read_json(network_path));
            const MeasurementSet meas = io::decode_measurements(read_json(second_path), net);
            const EstimatorOptions opts = cfg.estimator();
            const EstimateReport est = estimate_state(net, meas, opts);
            const IntervalState interval = sensitivity_bound(
                net, meas, est.state, UncertaintyVector::from_measurements(net, meas), opts);
            emit(csv ? io::csv_interval(interval, net) : io::dump(io::encode(interval, net)), f, out);
        } else if (gen->parsed()) {
            require_json(cfg, "gen");
            const Network net = io::decode_network(read_json(network_path));
            ScenarioSpec spec = io::decode_scenario_spec(read_json(second_path));
            if (cfg.seed) spec.seed = *cfg.seed;
            const Dataset data = generate(net, spec, cfg.solver(), cfg.estimator());
            emit(io::dump(io::encode_patterns(data.patterns, &data.manifest)), f, out);
            if (!f.out.empty()) out << io::dump(io::encode(data.manifest));
        } else if (train->parsed()) {
            require_json(cfg, "train");
            const io::PatternFile file = io::decode_patterns(read_json(network_path));
            if (file.patterns.empty()) throw ValidationError("patterns", "pattern file is empty");
            const auto dim = static_cast<std::size_t>(file.patterns.front().pattern.size());
            Normalization norm;
            if (file.manifest) norm = file.manifest->normalization;
            const ClassifierModel model = hydrostate::train(
                ClassifierModel::make(dim, cfg.theta, cfg.gamma, norm), file.patterns);
            emit(io::dump(io::encode(model)), f, out);
            if (!f.out.empty())
                out << io::dump(Json{{"cells", model.cells.size()},
                                     {"labels", model.labels},
                                     {"examples", file.patterns.size()}});
        } else if (classify_cmd->parsed()) {
            const ClassifierModel model = io::decode_model(read_json(network_path));
            const io::PatternFile file = io::decode_patterns(read_json(second_path));
            std::vector<ClassificationResult> results;
            Json list = Json::array();
            std::size_t labeled = 0, correct = 0;
            for (const LabeledPattern& lp : file.patterns) {
                results.push_back(hydrostate::classify(model, lp.pattern));
                Json r = io::encode(results.back());
                if (!lp.label.empty()) {
                    r["expected"] = lp.label;
                    ++labeled;
                    correct += results.back().label == lp.label ? 1 : 0;
                }
                list.push_back(std::move(r));
            }
            if (csv) {
                emit(io::csv_classification(results, model.labels), f, out);
            } else {
                Json report = {{"results", list}};
                if (labeled > 0) {
                    report["labeled"] = labeled;
                    report["accuracy"] = static_cast<double>(correct) / static_cast<double>(labeled);
                }
                emit(io::dump(report), f, out);
            }
        }
        return 0;
    } catch (const UsageError& e) {
        err << e.what() << "\n\n" << app.help();
        out << io::dump(io::error_object(e));
        return 2;
    } catch (const std::exception& e) {
        out << io::dump(io::error_object(e));
        return 1;
    }
}

}  // namespace hydrostate::cli
