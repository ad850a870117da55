// End-to-end leak classification demo: generate scenarios on a network,
// split them 70/30 per class, train the cell classifier on the training part
// and print the held-out confusion matrix.

#include "hydrostate/cli.hpp"
#include "hydrostate/errors.hpp"
#include "hydrostate/evaluation.hpp"
#include "hydrostate/report_io.hpp"
#include "hydrostate/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace hydrostate;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) throw std::runtime_error("cannot write '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate, train and evaluate the leak classifier on a network."};
    std::string network_path = "data/town.json";
    std::string spec_path = "data/town-scenarios.json";
    std::string config_path = "data/demo-config.json";
    std::string model_out, pattern_out;
    double train_fraction = 0.7;
    app.add_option("--network", network_path, "Network file")->capture_default_str();
    app.add_option("--spec", spec_path, "Scenario spec file")->capture_default_str();
    app.add_option("--config", config_path, "Config file with theta and gamma")->capture_default_str();
    app.add_option("--train-fraction", train_fraction, "Per-class training share")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--model-out", model_out, "Write the trained model here");
    app.add_option("--pattern-out", pattern_out,
                   "Write one held-out pattern per class here (with expected labels)");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto start = std::chrono::steady_clock::now();
        const Network net = io::decode_network(io::parse_text(read_file(network_path)));
        const ScenarioSpec spec = io::decode_scenario_spec(io::parse_text(read_file(spec_path)));
        cli::RunConfig cfg;
        cfg.merge(io::parse_text(read_file(config_path)));

        const Dataset data = generate(net, spec, cfg.solver(), cfg.estimator());
        std::cout << "scenarios: " << data.patterns.size() << " generated, "
                  << data.manifest.failed << " failed, " << data.manifest.features.size()
                  << " features\n";

        const Split split = stratified_split(data.patterns, train_fraction, spec.seed);
        const ClassifierModel model =
            train(ClassifierModel::make(data.manifest.features.size(), cfg.theta, cfg.gamma,
                                        data.manifest.normalization),
                  split.train);
        std::cout << "train " << split.train.size() << ", test " << split.test.size() << ", cells "
                  << model.cells.size() << ", theta " << cfg.theta << ", gamma " << cfg.gamma
                  << "\n\n";

        const ConfusionMatrix confusion = evaluate(model, split.test);
        std::cout << confusion.render();
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "elapsed " << seconds << " s\n";

        if (!model_out.empty()) write_file(model_out, io::dump(io::encode(model)));
        if (!pattern_out.empty()) {
            std::vector<LabeledPattern> sample;
            for (const std::string& label : model.labels)
                for (const LabeledPattern& lp : split.test)
                    if (lp.label == label) {
                        sample.push_back(lp);
                        break;
                    }
            write_file(pattern_out, io::dump(io::encode_patterns(sample)));
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "demo failed: " << e.what() << '\n';
        return 1;
    }
}
