#include "hydrostate/estimator.hpp"

#include "hydrostate/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hydrostate {

namespace {

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

constexpr long double kRankRcond = 10.0L * std::numeric_limits<long double>::epsilon();

}  // namespace

void validate_measurements(const Network& net, const MeasurementSet& meas) {
    if (!(meas.demand_sigma > 0.0) || !std::isfinite(meas.demand_sigma))
        throw ValidationError("demand_sigma", "demand_sigma must be > 0");
    if (meas.demand_delta.size() != 0 && meas.demand_delta.size() != idx(net.demand_count()))
        throw ValidationError("demand_delta", "demand_delta length must equal the number of "
                                              "demand nodes");
    if (meas.demand_delta.size() != 0 && !((meas.demand_delta.array() >= 0.0).all()))
        throw ValidationError("demand_delta", "demand_delta entries must be >= 0");
    for (const Measurement& m : meas.measurements) {
        if (!(m.sigma > 0.0) || !std::isfinite(m.sigma))
            throw ValidationError(m.target, "measurement on '" + m.target + "' needs sigma > 0");
        if (!(m.delta >= 0.0) || !std::isfinite(m.delta))
            throw ValidationError(m.target, "measurement on '" + m.target + "' needs delta >= 0");
        if (!std::isfinite(m.value))
            throw ValidationError(m.target, "measurement on '" + m.target + "' is not finite");
        const bool resolves = m.kind == MeasurementKind::pipe_flow
                                  ? net.find_pipe(m.target).has_value()
                                  : net.head_index(m.target).has_value();
        if (!resolves) throw UnknownTarget(m.target);
    }
}

AugmentedSystem build_augmented(const Network& net, const MeasurementSet& meas,
                                const EstimatorOptions& opts) {
    validate_measurements(net, meas);
    const auto l = idx(net.pipe_count());
    const auto np = idx(net.demand_count());
    const auto m = idx(meas.measurements.size());

    AugmentedSystem sys;
    sys.a31 = Eigen::MatrixXd::Zero(m, l);
    sys.a32 = Eigen::MatrixXd::Zero(m, np);
    sys.telemetry.resize(m);
    sys.weights.resize(l + np + m);

    double smallest_sigma = meas.demand_sigma;
    for (Eigen::Index k = 0; k < m; ++k) {
        const Measurement& reading = meas.measurements[static_cast<std::size_t>(k)];
        if (reading.kind == MeasurementKind::pipe_flow)
            sys.a31(k, idx(*net.find_pipe(reading.target))) = 1.0;
        else
            sys.a32(k, idx(*net.head_index(reading.target))) = 1.0;
        sys.telemetry(k) = reading.value;
        sys.weights(l + np + k) = 1.0 / (reading.sigma * reading.sigma);
        smallest_sigma = std::min(smallest_sigma, reading.sigma);
    }
    const double energy_sigma = opts.exact_sigma_rel * smallest_sigma;
    sys.weights.head(l).setConstant(1.0 / (energy_sigma * energy_sigma));
    sys.weights.segment(l, np).setConstant(1.0 / (meas.demand_sigma * meas.demand_sigma));
    return sys;
}

Eigen::MatrixXd AugmentedSystem::jacobian(const Network& net, const StateVector& x,
                                          double floor) const {
    const auto n = idx(net.state_size());
    Eigen::MatrixXd a(n + telemetry_rows(), n);
    a.topRows(n) = model_jacobian(net, x, floor);
    a.bottomLeftCorner(telemetry_rows(), a31.cols()) = a31;
    a.bottomRightCorner(telemetry_rows(), a32.cols()) = a32;
    return a;
}

Eigen::VectorXd AugmentedSystem::rhs(const Network& net, const StateVector& x,
                                     double floor) const {
    const auto n = idx(net.state_size());
    Eigen::VectorXd b(n + telemetry_rows());
    b.head(n) = -residual(net, x, floor);
    b.tail(telemetry_rows()) = telemetry - a31 * x.q - a32 * x.H;
    return b;
}

Eigen::VectorXd solve_normal_equations(const Eigen::MatrixXd& a, const Eigen::VectorXd& w,
                                       const Eigen::VectorXd& b) {
    // Energy rows outweigh soft rows by 1e8 or more, so A^t W A can reach a
    // condition number near 1/eps of double. Forming and factoring it in
    // extended precision keeps the soft rows' contribution representable.
    using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    // Dividing by the largest weight makes the solve see the same numbers
    // for W and alpha*W, so the step is invariant to the weight level.
    const long double w_max = w.cast<long double>().maxCoeff();
    if (!(w_max > 0.0L)) throw RankDeficient("all weights are zero");
    const MatrixL al = a.cast<long double>();
    const MatrixL atw = al.transpose() * (w.cast<long double>() / w_max).asDiagonal();
    const MatrixL normal = atw * al;
    const VectorL moment = atw * b.cast<long double>();

    // Symmetric diagonal scaling so the factorization sees O(1) entries
    // regardless of the absolute weight level.
    const VectorL diag = normal.diagonal();
    if (!((diag.array() > 0.0L).all()))
        throw RankDeficient("normal matrix has a zero diagonal entry (unobserved state)");
    const VectorL scale = diag.cwiseSqrt().cwiseInverse();
    const MatrixL scaled = scale.asDiagonal() * normal * scale.asDiagonal();

    const Eigen::LLT<MatrixL> llt(scaled);
    if (llt.info() != Eigen::Success || !(llt.rcond() > kRankRcond))
        throw RankDeficient("normal matrix is not positive definite (unobservable state)");
    const VectorL rhs = scale.asDiagonal() * moment;
    VectorL dx = scale.asDiagonal() * llt.solve(rhs);
    // Refine against A^t W (b - A dx), which avoids the cancellation already
    // baked into the formed normal matrix.
    const VectorL bl = b.cast<long double>();
    for (int k = 0; k < 3; ++k)
        dx += scale.asDiagonal() * llt.solve(scale.asDiagonal() * (atw * (bl - al * dx)));
    return dx.cast<double>();
}

EstimateReport estimate_state(const Network& net, const MeasurementSet& meas,
                              const EstimatorOptions& opts) {
    return estimate_state(net, build_augmented(net, meas, opts), opts);
}

EstimateReport estimate_state(const Network& net, const AugmentedSystem& system,
                              const EstimatorOptions& opts) {
    if (!(opts.omega > 0.0 && opts.omega <= 1.5))
        throw ValidationError("omega", "over-relaxation factor must lie in (0, 1.5]");
    if (system.row_count() != idx(net.state_size()) + system.telemetry_rows() ||
        !((system.weights.array() > 0.0).all()))
        throw ValidationError("weights", "augmented system weights must be positive, one per row");

    StateVector x = initial_state(net);
    double step_norm = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        const Eigen::MatrixXd a = system.jacobian(net, x, opts.flow_floor);
        const Eigen::VectorXd b = system.rhs(net, x, opts.flow_floor);
        const Eigen::VectorXd dx = solve_normal_equations(a, system.weights, b);
        if (opts.on_iteration) opts.on_iteration(a, system.weights, b, dx);
        if (!dx.allFinite()) break;

        x = StateVector::from_stacked(net, x.stacked() + opts.omega * dx);
        step_norm = dx.lpNorm<Eigen::Infinity>();
        if (step_norm <= opts.tol_x) {
            const Eigen::VectorXd r = system.rhs(net, x, opts.flow_floor);
            const double wnorm = std::sqrt((system.weights.array() * r.array().square()).sum());
            return {x, iter, wnorm, step_norm, true};
        }
    }
    throw NonConvergence(opts.max_iter, step_norm, "state estimation");
}

}  // namespace hydrostate
