#include "hydrostate/scenario.hpp"

#include "hydrostate/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string_view>

namespace hydrostate {

namespace {

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

// Position of the leak node among the demand nodes, or nullopt for "normal".
std::optional<std::size_t> leak_slot(const Network& net, const std::string& label) {
    if (label == kNormalLabel) return std::nullopt;
    const std::string_view prefix = kLeakPrefix;
    if (label.rfind(prefix, 0) != 0)
        throw ValidationError(label, "unknown scenario class '" + label + "'");
    const auto slot = net.head_index(std::string_view(label).substr(prefix.size()));
    if (!slot)
        throw ValidationError(label, "leak class '" + label + "' does not name a demand node");
    return slot;
}

}  // namespace

void validate_scenario_spec(const Network& net, const ScenarioSpec& spec) {
    if (spec.classes.empty()) throw ValidationError("classes", "scenario spec lists no classes");
    for (const ClassCount& c : spec.classes) {
        if (c.count < 1)
            throw ValidationError(c.label, "class '" + c.label + "' needs a count >= 1");
        leak_slot(net, c.label);
    }
    if (!(spec.leak_min >= 0.0 && spec.leak_max >= spec.leak_min) || !std::isfinite(spec.leak_max))
        throw ValidationError("leak_magnitude", "leak magnitude range must satisfy 0 <= lo <= hi");
    if (!(spec.demand_noise >= 0.0 && spec.demand_noise < 1.0))
        throw ValidationError("demand_noise", "demand noise fraction must lie in [0, 1)");
    if (!(spec.demand_sigma > 0.0) || !std::isfinite(spec.demand_sigma))
        throw ValidationError("demand_sigma", "demand_sigma must be > 0");
    if (!(spec.demand_delta >= 0.0) || !std::isfinite(spec.demand_delta))
        throw ValidationError("demand_delta", "demand_delta must be >= 0");
    for (const MeterSpec& m : spec.meters) {
        const bool resolves = m.kind == MeasurementKind::pipe_flow
                                  ? net.find_pipe(m.target).has_value()
                                  : net.head_index(m.target).has_value();
        if (!resolves) throw UnknownTarget(m.target);
        if (!(m.sigma > 0.0) || !(m.delta >= 0.0))
            throw ValidationError(m.target, "meter on '" + m.target + "' needs sigma > 0, delta >= 0");
    }
}

std::vector<std::string> feature_names(const Network& net) {
    std::vector<std::string> names;
    names.reserve(net.state_size());
    for (const Pipe& p : net.pipes()) names.push_back("q:" + p.id);
    for (const std::size_t n : net.demand_nodes()) names.push_back("H:" + net.nodes()[n].id);
    return names;
}

Normalization padded_ranges(const std::vector<IntervalState>& states) {
    if (states.empty()) return {};
    const auto n = states.front().halfwidth.size();
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    Eigen::VectorXd hi = -lo;
    for (const IntervalState& s : states) {
        lo = lo.cwiseMin(s.lower());
        hi = hi.cwiseMax(s.upper());
    }
    Normalization ranges(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double span = hi(i) - lo(i);
        const double pad = span > 0.0 ? 0.05 * span : 0.05 * std::max(std::abs(lo(i)), 1.0);
        ranges[static_cast<std::size_t>(i)] = Range{lo(i) - pad, hi(i) + pad};
    }
    return ranges;
}

MeasurementSet synthesize_measurements(const Network& base, const ScenarioSpec& spec,
                                       const StateVector& truth, StreamRng* rng) {
    MeasurementSet meas;
    meas.demand_sigma = spec.demand_sigma;
    meas.demand_delta = spec.demand_delta * base.demands();
    for (const MeterSpec& meter : spec.meters) {
        const double exact = meter.kind == MeasurementKind::pipe_flow
                                 ? truth.q(idx(*base.find_pipe(meter.target)))
                                 : truth.H(idx(*base.head_index(meter.target)));
        const double noise = rng ? rng->uniform(-meter.delta, meter.delta) : 0.0;
        meas.measurements.push_back(
            Measurement{meter.kind, meter.target, exact + noise, meter.sigma, meter.delta});
    }
    return meas;
}

Dataset generate(const Network& net, const ScenarioSpec& spec, const SolverOptions& solver,
                 const EstimatorOptions& estimator) {
    validate_scenario_spec(net, spec);

    Dataset data;
    data.manifest.seed = spec.seed;
    data.manifest.features = feature_names(net);
    std::vector<std::string> labels;

    const Eigen::VectorXd base_demands = net.demands();
    std::uint64_t index = 0;
    for (const ClassCount& cls : spec.classes) {
        const auto leak = leak_slot(net, cls.label);
        int produced = 0;
        for (int c = 0; c < cls.count; ++c, ++index) {
            StreamRng rng(spec.seed, index);
            // Fixed draw order: leak magnitude, demand noise, meter noise.
            const double magnitude = rng.uniform(spec.leak_min, spec.leak_max);
            Eigen::VectorXd demands = base_demands;
            for (Eigen::Index i = 0; i < demands.size(); ++i)
                demands(i) *= 1.0 + spec.demand_noise * rng.uniform(-1.0, 1.0);
            if (leak) demands(idx(*leak)) += magnitude;

            try {
                const Network actual = net.with_demands(demands);
                const StateVector truth = solve_steady_state(actual, solver).state;
                const MeasurementSet meas = synthesize_measurements(net, spec, truth, &rng);
                const EstimateReport est = estimate_state(net, meas, estimator);
                const IntervalState bound = sensitivity_bound(
                    net, meas, est.state, UncertaintyVector::from_measurements(net, meas),
                    estimator);
                data.states.push_back(bound);
                labels.push_back(cls.label);
                ++produced;
            } catch (const Error& e) {
                ++data.manifest.failed;
                data.manifest.failures.push_back("scenario " + std::to_string(index) + " (" +
                                                 cls.label + "): " + e.what());
            }
        }
        data.manifest.counts.push_back(ClassCount{cls.label, produced});
    }

    data.manifest.normalization = padded_ranges(data.states);
    data.patterns.reserve(data.states.size());
    for (std::size_t k = 0; k < data.states.size(); ++k)
        data.patterns.push_back(
            LabeledPattern{normalize(data.states[k], data.manifest.normalization), labels[k]});
    return data;
}

}  // namespace hydrostate
