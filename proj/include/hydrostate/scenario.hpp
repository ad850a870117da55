#pragma once

#include "hydrostate/error_limits.hpp"
#include "hydrostate/estimator.hpp"
#include "hydrostate/fuzzy.hpp"
#include "hydrostate/hydraulics.hpp"
#include "hydrostate/network.hpp"
#include "hydrostate/random.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hydrostate {

inline constexpr const char* kNormalLabel = "normal";
inline constexpr const char* kLeakPrefix = "leak@";

/// A metered point: its kind, target, weight scale and error half-width.
struct MeterSpec {
    MeasurementKind kind = MeasurementKind::pipe_flow;
    std::string target;
    double sigma = 1.0;
    double delta = 0.0;

    friend bool operator==(const MeterSpec&, const MeterSpec&) = default;
};

struct ClassCount {
    std::string label;  // "normal" or "leak@<demand-node-id>"
    int count = 0;

    friend bool operator==(const ClassCount&, const ClassCount&) = default;
};

struct ScenarioSpec {
    std::vector<ClassCount> classes;
    double leak_min = 0.0;           // flow units
    double leak_max = 0.0;
    double demand_noise = 0.0;       // relative perturbation of each base demand, [0, 1)
    double demand_sigma = 1.0;       // estimator weight scale for continuity rows
    double demand_delta = 0.0;       // demand half-width, relative to the base demand
    std::vector<MeterSpec> meters;
    std::uint64_t seed = 0;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct DatasetManifest {
    std::vector<ClassCount> counts;     // generated patterns per class
    int failed = 0;
    std::vector<std::string> failures;  // "scenario <k>: <reason>"
    std::vector<std::string> features;  // "q:<pipe>" then "H:<node>"
    Normalization normalization;
    std::uint64_t seed = 0;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct Dataset {
    std::vector<LabeledPattern> patterns;
    std::vector<IntervalState> states;  // raw interval state of each pattern
    DatasetManifest manifest;
};

/// Throws ValidationError for bad ranges, unknown labels or unresolved meters.
void validate_scenario_spec(const Network& net, const ScenarioSpec& spec);

std::vector<std::string> feature_names(const Network& net);

/// Normalization ranges: per-dimension min/max over all bounds, padded 5% of
/// the span on each side (5% of max(|value|, 1) when the span is zero).
Normalization padded_ranges(const std::vector<IntervalState>& states);

/// The measurement set the estimator sees for one scenario: meter readings
/// taken from `truth` (plus bounded noise drawn from `rng` when non-null)
/// and base-demand predictions.
MeasurementSet synthesize_measurements(const Network& base, const ScenarioSpec& spec,
                                       const StateVector& truth, StreamRng* rng);

/// Runs every scenario through forward solve, estimation and error limits.
/// Scenario k draws all randomness from (spec.seed, k); patterns keep
/// scenario order.
Dataset generate(const Network& net, const ScenarioSpec& spec, const SolverOptions& solver = {},
                 const EstimatorOptions& estimator = {});

}  // namespace hydrostate
