#include "hydrostate/hydraulics.hpp"

#include "hydrostate/errors.hpp"

#include <cmath>
#include <limits>

namespace hydrostate {

namespace {

// Factorizations with a reciprocal condition estimate below this are
// treated as singular.
constexpr double kSingularRcond = 1e-14;

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

}  // namespace

StateVector StateVector::zeros(const Network& net) {
    return {Eigen::VectorXd::Zero(idx(net.pipe_count())),
            Eigen::VectorXd::Zero(idx(net.demand_count()))};
}

StateVector StateVector::from_stacked(const Network& net, const Eigen::VectorXd& x) {
    const auto l = idx(net.pipe_count());
    return {x.head(l), x.tail(x.size() - l)};
}

Eigen::VectorXd StateVector::stacked() const {
    Eigen::VectorXd x(q.size() + H.size());
    x << q, H;
    return x;
}

bool StateVector::matches(const Network& net) const {
    return q.size() == idx(net.pipe_count()) && H.size() == idx(net.demand_count()) &&
           q.allFinite() && H.allFinite();
}

StateVector initial_state(const Network& net) {
    StateVector x;
    x.q = Eigen::VectorXd::Ones(idx(net.pipe_count()));
    x.H = Eigen::VectorXd::Constant(idx(net.demand_count()), net.fixed_heads().mean());
    return x;
}

Eigen::VectorXd residual(const Network& net, const StateVector& x, double floor) {
    const auto& inc = net.incidence();
    Eigen::VectorXd r(idx(net.state_size()));
    r.head(x.q.size()) =
        headloss_diagonal(net, x.q, floor) * x.q + inc.a12 * x.H + inc.a10 * net.fixed_heads();
    r.tail(x.H.size()) = inc.a12.transpose() * x.q - net.demands();
    return r;
}

Eigen::MatrixXd model_jacobian(const Network& net, const StateVector& x, double floor) {
    const auto& inc = net.incidence();
    const auto l = idx(net.pipe_count());
    const auto np = idx(net.demand_count());
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(l + np, l + np);
    jac.topLeftCorner(l, l) = headloss_jacobian(net, x.q, floor).toDenseMatrix();
    jac.topRightCorner(l, np) = inc.a12;
    jac.bottomLeftCorner(np, l) = inc.a12.transpose();
    return jac;
}

SolveReport solve_steady_state(const Network& net, const SolverOptions& opts) {
    StateVector x = initial_state(net);
    Eigen::VectorXd r = residual(net, x, opts.flow_floor);
    double norm = r.lpNorm<Eigen::Infinity>();

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (norm <= opts.tol_r) return {x, iter, norm, true};

        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(model_jacobian(net, x, opts.flow_floor));
        if (!(lu.rcond() > kSingularRcond))
            throw SingularSystem("hydraulic Jacobian is singular (rcond " +
                                 std::to_string(lu.rcond()) + ")");
        const Eigen::VectorXd step = lu.solve(-r);

        // Backtrack until the residual max-norm does not grow.
        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= opts.max_halvings; ++halving, t *= 0.5) {
            const StateVector trial = StateVector::from_stacked(net, x.stacked() + t * step);
            Eigen::VectorXd trial_r = residual(net, trial, opts.flow_floor);
            const double trial_norm = trial_r.lpNorm<Eigen::Infinity>();
            if (std::isfinite(trial_norm) && trial_norm <= norm) {
                x = trial;
                r = std::move(trial_r);
                norm = trial_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) throw NonConvergence(iter + 1, norm, "steady-state solve (line search stalled)");
    }
    if (norm <= opts.tol_r) return {x, opts.max_iter, norm, true};
    throw NonConvergence(opts.max_iter, norm, "steady-state solve");
}

}  // namespace hydrostate
