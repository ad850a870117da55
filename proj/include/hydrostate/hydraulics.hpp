#pragma once

#include "hydrostate/network.hpp"

#include <Eigen/Dense>

namespace hydrostate {

/// x = (q, H): pipe flows in pipe order, heads in demand-node order.
struct StateVector {
    Eigen::VectorXd q;
    Eigen::VectorXd H;

    static StateVector zeros(const Network& net);
    /// Split a stacked (q; H) vector using the network's dimensions.
    static StateVector from_stacked(const Network& net, const Eigen::VectorXd& x);

    [[nodiscard]] Eigen::VectorXd stacked() const;
    [[nodiscard]] bool matches(const Network& net) const;
};

struct SolverOptions {
    double tol_r = 1e-8;
    int max_iter = 50;
    int max_halvings = 10;
    double flow_floor = kFlowFloor;
};

struct SolveReport {
    StateVector state;
    int iterations = 0;
    double residual_norm = 0.0;  // max-norm of the model residual
    bool converged = false;
};

/// q = 1 in every pipe, H = mean of the fixed heads.
StateVector initial_state(const Network& net);

/// [A11(q) q + A12 H + A10 Hf ; A12^t q - Q], energy rows then continuity rows.
Eigen::VectorXd residual(const Network& net, const StateVector& x, double floor = kFlowFloor);

/// Linearized model block [[A'11(q), A12], [A12^t, 0]].
Eigen::MatrixXd model_jacobian(const Network& net, const StateVector& x,
                               double floor = kFlowFloor);

/// Damped Newton solve of the square steady-state system.
/// Throws NonConvergence or SingularSystem.
SolveReport solve_steady_state(const Network& net, const SolverOptions& opts = {});

}  // namespace hydrostate
