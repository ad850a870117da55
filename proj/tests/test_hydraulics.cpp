#include "fixtures.hpp"

#include "hydrostate/errors.hpp"
#include "hydrostate/hydraulics.hpp"

#include <doctest.h>

#include <cmath>

using namespace hydrostate;

TEST_CASE("single pipe: continuity forces q and the head follows the loss law") {
    const SolveReport report = solve_steady_state(fixtures::single_pipe());
    CHECK(report.converged);
    CHECK(report.state.q(0) == 2.0);
    const double oracle = 100.0 - 10.0 * std::exp(1.852 * std::log(2.0));
    CHECK(std::abs(report.state.H(0) - oracle) <= 1e-8);
    CHECK(report.residual_norm <= 1e-8);
}

TEST_CASE("parallel identical pipes split the flow evenly") {
    const SolveReport report = solve_steady_state(fixtures::parallel_pair());
    CHECK(report.state.q(0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(report.state.q(1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(report.state.q(0) == doctest::Approx(report.state.q(1)).epsilon(1e-12));
}

TEST_CASE("residual layout and structure") {
    const Network net = fixtures::single_pipe();
    const SolveReport sol = solve_steady_state(net);
    CHECK(residual(net, sol.state).lpNorm<Eigen::Infinity>() <= 1e-8);

    SUBCASE("zero state") {
        const Eigen::VectorXd r = residual(net, StateVector::zeros(net));
        CHECK(r.size() == 2);
        CHECK(r(0) == doctest::Approx(-100.0));  // floor term times q = 0 vanishes
        CHECK(r(1) == -2.0);
    }
    SUBCASE("unit head perturbation changes one energy row by its A12 entry") {
        const Network tri = fixtures::triangle();
        const StateVector x = solve_steady_state(tri).state;
        const Eigen::VectorXd base = residual(tri, x);
        for (Eigen::Index i = 0; i < x.H.size(); ++i) {
            StateVector y = x;
            y.H(i) += 1.0;
            const Eigen::VectorXd diff = residual(tri, y) - base;
            const auto l = x.q.size();
            CHECK(diff.tail(x.H.size()).isZero(0.0));
            for (Eigen::Index j = 0; j < l; ++j)
                CHECK(diff(j) == doctest::Approx(tri.incidence().a12(j, i)).epsilon(1e-12));
        }
        StateVector bumped = sol.state;
        bumped.H(0) += 1.0;
        const Eigen::VectorXd single = residual(net, bumped) - residual(net, sol.state);
        CHECK(single(0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(single(1) == 0.0);
    }
}

TEST_CASE("model Jacobian matches central differences of the residual") {
    const Network net = fixtures::random_network(11, 8, 12);
    StateVector x = initial_state(net);
    StreamRng rng(5, 0);
    for (Eigen::Index j = 0; j < x.q.size(); ++j) x.q(j) = rng.uniform(0.2, 2.0) * (j % 2 ? 1 : -1);
    const Eigen::MatrixXd jac = model_jacobian(net, x);
    const Eigen::VectorXd x0 = x.stacked();
    const double h = 1e-6;
    for (Eigen::Index c = 0; c < x0.size(); ++c) {
        Eigen::VectorXd xp = x0, xm = x0;
        xp(c) += h;
        xm(c) -= h;
        const Eigen::VectorXd fd = (residual(net, StateVector::from_stacked(net, xp)) -
                                    residual(net, StateVector::from_stacked(net, xm))) /
                                   (2 * h);
        CHECK((fd - jac.col(c)).lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + jac.col(c).norm()));
    }
}

TEST_CASE("random networks converge with continuity satisfied") {
    for (std::uint64_t seed = 100; seed < 125; ++seed) {
        const Network net = fixtures::random_network(seed, 20, 30);
        const SolveReport report = solve_steady_state(net);
        REQUIRE(report.converged);
        const Eigen::VectorXd continuity =
            net.incidence().a12.transpose() * report.state.q - net.demands();
        CHECK(continuity.lpNorm<Eigen::Infinity>() <= 1e-8);
        CHECK(report.residual_norm <= 1e-8);
    }
}

TEST_CASE("scaling every resistance leaves flows unchanged on the triangle") {
    const SolveReport base = solve_steady_state(fixtures::triangle());
    for (const double alpha : {0.25, 3.0, 10.0}) {
        const SolveReport scaled = solve_steady_state(fixtures::triangle(alpha));
        CHECK((scaled.state.q - base.state.q).lpNorm<Eigen::Infinity>() <= 1e-7);
        // Head losses scale by alpha: 100 - H' = alpha (100 - H).
        const Eigen::VectorXd loss = 100.0 - base.state.H.array();
        const Eigen::VectorXd loss_scaled = 100.0 - scaled.state.H.array();
        CHECK((loss_scaled - alpha * loss).lpNorm<Eigen::Infinity>() <= 1e-6 * alpha);
    }
}

TEST_CASE("damped iteration never increases the residual between accepted steps") {
    // Replay the solver with growing iteration caps; the final residual of
    // each truncated run is the residual after that many accepted steps.
    const Network net = fixtures::random_network(321, 15, 25);
    double previous = residual(net, initial_state(net)).lpNorm<Eigen::Infinity>();
    const SolveReport full = solve_steady_state(net);
    for (int cap = 1; cap <= full.iterations; ++cap) {
        SolverOptions opts;
        opts.max_iter = cap;
        double current = 0.0;
        try {
            current = solve_steady_state(net, opts).residual_norm;
        } catch (const NonConvergence& e) {
            current = e.residual();
        }
        CHECK(current <= previous);
        previous = current;
    }
}

TEST_CASE("deterministic and bounded by max_iter") {
    const Network net = fixtures::random_network(42);
    const SolveReport a = solve_steady_state(net);
    const SolveReport b = solve_steady_state(net);
    CHECK(a.state.q == b.state.q);
    CHECK(a.state.H == b.state.H);
    CHECK(a.iterations == b.iterations);

    SolverOptions tight;
    tight.max_iter = 1;
    CHECK_THROWS_AS(solve_steady_state(net, tight), NonConvergence);
}
