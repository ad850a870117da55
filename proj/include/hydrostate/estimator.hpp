#pragma once

#include "hydrostate/hydraulics.hpp"
#include "hydrostate/network.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace hydrostate {

enum class MeasurementKind { pipe_flow, node_head };

/// One telemetry reading. `sigma` scales its weight (1 / sigma^2); `delta` is
/// the half-width of its bounded error.
struct Measurement {
    MeasurementKind kind = MeasurementKind::pipe_flow;
    std::string target;
    double value = 0.0;
    double sigma = 1.0;
    double delta = 0.0;

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct MeasurementSet {
    std::vector<Measurement> measurements;
    double demand_sigma = 1.0;
    Eigen::VectorXd demand_delta;  // length N_p; empty means all zero

    friend bool operator==(const MeasurementSet& a, const MeasurementSet& b) {
        return a.measurements == b.measurements && a.demand_sigma == b.demand_sigma &&
               a.demand_delta.size() == b.demand_delta.size() &&
               a.demand_delta == b.demand_delta;
    }
};

/// Checks sigma/delta ranges and that every target resolves (UnknownTarget).
void validate_measurements(const Network& net, const MeasurementSet& meas);

struct EstimatorOptions {
    double tol_x = 1e-8;
    int max_iter = 50;
    double omega = 1.0;               // over-relaxation factor, (0, 1.5]
    double exact_sigma_rel = 1e-4;    // energy-row sigma relative to the smallest soft sigma
    double flow_floor = kFlowFloor;

    /// Called once per iteration with the linearized matrix, weights, right
    /// side and the computed correction.
    std::function<void(const Eigen::MatrixXd&, const Eigen::VectorXd&, const Eigen::VectorXd&,
                       const Eigen::VectorXd&)>
        on_iteration;
};

/// The overdetermined system: model rows, then telemetry selector rows.
/// Row layout of `weights` and right sides: L energy rows, N_p continuity
/// rows, M telemetry rows.
struct AugmentedSystem {
    Eigen::MatrixXd a31;        // M x L
    Eigen::MatrixXd a32;        // M x N_p
    Eigen::VectorXd telemetry;  // M_t
    Eigen::VectorXd weights;    // diagonal of W

    [[nodiscard]] Eigen::Index telemetry_rows() const { return a31.rows(); }
    [[nodiscard]] Eigen::Index row_count() const { return weights.size(); }

    /// Linearized matrix A evaluated at x.
    [[nodiscard]] Eigen::MatrixXd jacobian(const Network& net, const StateVector& x,
                                           double floor = kFlowFloor) const;
    /// Right side of the linearized system at x (the negated residual).
    [[nodiscard]] Eigen::VectorXd rhs(const Network& net, const StateVector& x,
                                      double floor = kFlowFloor) const;
};

AugmentedSystem build_augmented(const Network& net, const MeasurementSet& meas,
                                const EstimatorOptions& opts = {});

struct EstimateReport {
    StateVector state;
    int iterations = 0;
    double weighted_residual_norm = 0.0;  // sqrt(r^t W r) at the estimate
    double last_step_norm = 0.0;
    bool converged = false;
};

/// Solves (A^t W A) dx = A^t W b with an SPD factorization.
/// Throws RankDeficient when A^t W A is not positive definite.
Eigen::VectorXd solve_normal_equations(const Eigen::MatrixXd& a, const Eigen::VectorXd& w,
                                       const Eigen::VectorXd& b);

/// Iterative linearized weighted least squares. Throws NonConvergence or
/// RankDeficient.
EstimateReport estimate_state(const Network& net, const MeasurementSet& meas,
                              const EstimatorOptions& opts = {});
EstimateReport estimate_state(const Network& net, const AugmentedSystem& system,
                              const EstimatorOptions& opts = {});

}  // namespace hydrostate
