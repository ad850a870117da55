#pragma once

#include "hydrostate/estimator.hpp"
#include "hydrostate/hydraulics.hpp"
#include "hydrostate/network.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace hydrostate {

/// Half-widths of the bounded errors, one per augmented row. Energy rows are
/// model equations and always carry 0.
struct UncertaintyVector {
    Eigen::VectorXd delta_y;

    /// (0 for energy rows | demand_delta | per-measurement delta).
    static UncertaintyVector from_measurements(const Network& net, const MeasurementSet& meas);
};

/// Symmetric box [center - halfwidth, center + halfwidth] in state space.
struct IntervalState {
    StateVector center;
    Eigen::VectorXd halfwidth;  // stacked (q; H) layout

    [[nodiscard]] Eigen::VectorXd lower() const { return center.stacked() - halfwidth; }
    [[nodiscard]] Eigen::VectorXd upper() const { return center.stacked() + halfwidth; }
};

/// S = (A^t W A)^-1 A^t W. Throws RankDeficient.
Eigen::MatrixXd sensitivity_matrix(const Eigen::MatrixXd& a, const Eigen::VectorXd& w);

/// e = |S| |delta_y|, entrywise absolute values taken before the product.
Eigen::VectorXd error_halfwidth(const Eigen::MatrixXd& a, const Eigen::VectorXd& w,
                                const Eigen::VectorXd& delta_y);

/// Error limits for a converged estimate, with the augmented Jacobian
/// evaluated at x_star.
IntervalState sensitivity_bound(const Network& net, const MeasurementSet& meas,
                                const StateVector& x_star, const UncertaintyVector& delta_y,
                                const EstimatorOptions& opts = {});

/// Fraction of state components of `estimate` that lie inside `interval`.
double containment_fraction(const IntervalState& interval, const StateVector& estimate);

/// Resample demands and telemetry uniformly inside their uncertainty boxes,
/// re-estimate, and report the fraction of state components (over all
/// samples) within the first-order bound. A sample whose estimation fails
/// counts as entirely non-contained. Sample k draws from (seed, k) only.
double monte_carlo_containment(const Network& net, const MeasurementSet& meas,
                               const UncertaintyVector& delta_y, int samples,
                               std::uint64_t seed, const EstimatorOptions& opts = {});

}  // namespace hydrostate
