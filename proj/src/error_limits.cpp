#include "hydrostate/error_limits.hpp"

#include "hydrostate/errors.hpp"
#include "hydrostate/random.hpp"

#include <algorithm>

namespace hydrostate {

namespace {

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

}  // namespace

UncertaintyVector UncertaintyVector::from_measurements(const Network& net,
                                                       const MeasurementSet& meas) {
    const auto l = idx(net.pipe_count());
    const auto np = idx(net.demand_count());
    const auto m = idx(meas.measurements.size());
    UncertaintyVector u{Eigen::VectorXd::Zero(l + np + m)};
    if (meas.demand_delta.size() == np) u.delta_y.segment(l, np) = meas.demand_delta;
    for (Eigen::Index k = 0; k < m; ++k)
        u.delta_y(l + np + k) = meas.measurements[static_cast<std::size_t>(k)].delta;
    return u;
}

Eigen::MatrixXd sensitivity_matrix(const Eigen::MatrixXd& a, const Eigen::VectorXd& w) {
    const Eigen::MatrixXd atw = a.transpose() * w.asDiagonal();
    const Eigen::MatrixXd normal = atw * a;
    const Eigen::VectorXd diag = normal.diagonal();
    if (!((diag.array() > 0.0).all()))
        throw RankDeficient("normal matrix has a zero diagonal entry (unobserved state)");
    const Eigen::VectorXd scale = diag.cwiseSqrt().cwiseInverse();
    const Eigen::LLT<Eigen::MatrixXd> llt(scale.asDiagonal() * normal * scale.asDiagonal());
    if (llt.info() != Eigen::Success)
        throw RankDeficient("normal matrix is not positive definite (unobservable state)");
    return scale.asDiagonal() * llt.solve(scale.asDiagonal() * atw);
}

Eigen::VectorXd error_halfwidth(const Eigen::MatrixXd& a, const Eigen::VectorXd& w,
                                const Eigen::VectorXd& delta_y) {
    if (delta_y.size() != a.rows())
        throw ValidationError("delta_y", "uncertainty vector length must equal the row count");
    return sensitivity_matrix(a, w).cwiseAbs() * delta_y.cwiseAbs();
}

IntervalState sensitivity_bound(const Network& net, const MeasurementSet& meas,
                                const StateVector& x_star, const UncertaintyVector& delta_y,
                                const EstimatorOptions& opts) {
    if (!x_star.matches(net))
        throw ValidationError("x_star", "state vector does not match the network");
    if (!((delta_y.delta_y.array() >= 0.0).all()))
        throw ValidationError("delta_y", "uncertainty half-widths must be >= 0");
    const AugmentedSystem sys = build_augmented(net, meas, opts);
    const Eigen::MatrixXd a = sys.jacobian(net, x_star, opts.flow_floor);
    return {x_star, error_halfwidth(a, sys.weights, delta_y.delta_y)};
}

double containment_fraction(const IntervalState& interval, const StateVector& estimate) {
    const Eigen::VectorXd dev = (estimate.stacked() - interval.center.stacked()).cwiseAbs();
    const auto inside = (dev.array() <= interval.halfwidth.array()).count();
    return dev.size() == 0 ? 1.0 : static_cast<double>(inside) / static_cast<double>(dev.size());
}

double monte_carlo_containment(const Network& net, const MeasurementSet& meas,
                               const UncertaintyVector& delta_y, int samples,
                               std::uint64_t seed, const EstimatorOptions& opts) {
    if (samples < 1) throw ValidationError("samples", "sample count must be >= 1");
    const auto l = idx(net.pipe_count());
    const auto np = idx(net.demand_count());
    if (delta_y.delta_y.size() != l + np + idx(meas.measurements.size()))
        throw ValidationError("delta_y", "uncertainty vector length must equal the row count");

    const EstimateReport nominal = estimate_state(net, meas, opts);
    const IntervalState bound = sensitivity_bound(net, meas, nominal.state, delta_y, opts);

    double contained = 0.0;
    for (int k = 0; k < samples; ++k) {
        StreamRng rng(seed, static_cast<std::uint64_t>(k));
        Eigen::VectorXd demands = net.demands();
        for (Eigen::Index i = 0; i < np; ++i) {
            const double d = delta_y.delta_y(l + i);
            // Demands stay non-negative; clamping keeps the draw inside the box.
            demands(i) = std::max(0.0, demands(i) + rng.uniform(-d, d));
        }
        MeasurementSet sample = meas;
        for (std::size_t m = 0; m < sample.measurements.size(); ++m) {
            const double d = delta_y.delta_y(l + np + idx(m));
            sample.measurements[m].value += rng.uniform(-d, d);
        }
        try {
            const EstimateReport est = estimate_state(net.with_demands(demands), sample, opts);
            contained += containment_fraction(bound, est.state);
        } catch (const Error&) {
            // counts as non-contained
        }
    }
    return contained / samples;
}

}  // namespace hydrostate
