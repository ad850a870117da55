#pragma once

#include "hydrostate/error_limits.hpp"
#include "hydrostate/estimator.hpp"
#include "hydrostate/fuzzy.hpp"
#include "hydrostate/hydraulics.hpp"
#include "hydrostate/network.hpp"
#include "hydrostate/scenario.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

/// JSON and CSV encodings of the domain types. Decoders validate the full
/// schema and the type invariants, throwing SchemaError located by a JSON
/// pointer. Top-level documents carry `"version": 1`; a missing version is
/// accepted.
namespace hydrostate::io {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Throws ParseError for malformed JSON text.
Json parse_text(std::string_view text);
/// Pretty-printed, key-sorted, newline-terminated.
std::string dump(const Json& j);

Json encode(const Network& net);
Network decode_network(const Json& j);

Json encode(const MeasurementSet& meas);
MeasurementSet decode_measurements(const Json& j, const Network& net);

/// {"q": {pipe: flow}, "H": {node: head}}
Json encode(const StateVector& x, const Network& net);
StateVector decode_state(const Json& j, const Network& net);

/// {"lower", "center", "upper", "halfwidth"}, each a state object.
Json encode(const IntervalState& s, const Network& net);
IntervalState decode_interval_state(const Json& j, const Network& net);

struct PatternFile {
    std::vector<LabeledPattern> patterns;
    std::optional<DatasetManifest> manifest;
};

Json encode_patterns(std::span<const LabeledPattern> patterns,
                     const DatasetManifest* manifest = nullptr);
/// Accepts a bare JSON list of patterns or {"patterns": [...], "manifest"?}.
PatternFile decode_patterns(const Json& j);

Json encode(const ClassifierModel& model);
ClassifierModel decode_model(const Json& j);

Json encode(const DatasetManifest& manifest);
DatasetManifest decode_manifest(const Json& j);

Json encode(const ScenarioSpec& spec);
ScenarioSpec decode_scenario_spec(const Json& j);

Json encode(const SolveReport& report, const Network& net);
Json encode(const EstimateReport& report, const Network& net);
Json encode(const ClassificationResult& result);

/// {"error": kind, "detail": message} (+ "path" for schema errors).
Json error_object(const std::exception& e);

std::string csv_state(const StateVector& x, const Network& net);
std::string csv_interval(const IntervalState& s, const Network& net);
std::string csv_classification(std::span<const ClassificationResult> results,
                               const std::vector<std::string>& labels);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

}  // namespace hydrostate::io
