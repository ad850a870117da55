#include "fixtures.hpp"

#include "hydrostate/errors.hpp"
#include "hydrostate/network.hpp"

#include <doctest.h>

#include <cmath>

using namespace hydrostate;

TEST_CASE("parse minimal single-pipe network") {
    const Network net = parse_network(fixtures::read_text(fixtures::data_path("demo-net.json")));
    CHECK(net.pipe_count() == 1);
    CHECK(net.demand_count() == 1);
    CHECK(net.fixed_count() == 1);
    CHECK(net.pipes()[0].exponent == doctest::Approx(1.852));
    CHECK(net.demands()(0) == 2.0);
    CHECK(net.fixed_heads()(0) == 100.0);
}

TEST_CASE("parse triangle network keeps file order") {
    const Network net = parse_network(fixtures::read_text(fixtures::data_path("triangle.json")));
    CHECK(net.pipe_count() == 3);
    CHECK(net.demand_count() == 2);
    CHECK(net.fixed_count() == 1);
    CHECK(*net.head_index("n1") == 0);
    CHECK(*net.head_index("n2") == 1);
    CHECK(*net.find_pipe("p3") == 2);
    CHECK_FALSE(net.head_index("res").has_value());
}

TEST_CASE("exponent defaults when omitted") {
    const Network net = parse_network(R"({"nodes":[{"id":"r","kind":"fixed-head","head":10},
        {"id":"a","kind":"demand","demand":1}],"pipes":[{"id":"p","from":"r","to":"a","resistance":1}]})");
    CHECK(net.pipes()[0].exponent == kDefaultExponent);
}

TEST_CASE("duplicate node id is rejected by name") {
    const std::string text = R"({"nodes":[{"id":"r","kind":"fixed-head","head":10},
        {"id":"n1","kind":"demand","demand":1},{"id":"n1","kind":"demand","demand":2}],
        "pipes":[{"id":"p","from":"r","to":"n1","resistance":1}]})";
    try {
        (void)parse_network(text);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("n1") != std::string::npos);
        CHECK(e.element() == "/nodes/2/id");
    }
    // Direct construction names the element too.
    try {
        Network({Node::reservoir("r", 1), Node::junction("n1", 1), Node::junction("n1", 1)},
                {Pipe{"p", "r", "n1", 1.0, 2.0}});
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.element() == "n1");
    }
}

TEST_CASE("validation rejects structural defects") {
    const auto r = Node::reservoir("r", 10);
    const auto a = Node::junction("a", 1);
    const auto b = Node::junction("b", 1);
    CHECK_THROWS_AS(Network({a, b}, {Pipe{"p", "a", "b", 1, 2}}), ValidationError);  // no reservoir
    CHECK_THROWS_AS(Network({r}, {}), ValidationError);                               // no demand node
    CHECK_THROWS_AS(Network({r, a, b}, {Pipe{"p", "r", "a", 1, 2}}), ValidationError);  // b isolated
    CHECK_THROWS_AS(Network({r, a}, {Pipe{"p", "r", "a", 0, 2}}), ValidationError);     // r = 0
    CHECK_THROWS_AS(Network({r, a}, {Pipe{"p", "r", "a", 1, 1}}), ValidationError);     // n = 1
    CHECK_THROWS_AS(Network({r, a}, {Pipe{"p", "a", "a", 1, 2}}), ValidationError);     // loop
    CHECK_THROWS_AS(Network({r, a}, {Pipe{"p", "r", "x", 1, 2}}), ValidationError);     // bad end
    CHECK_THROWS_AS(Network({r, Node::junction("a", -1)}, {Pipe{"p", "r", "a", 1, 2}}),
                    ValidationError);  // negative base demand
    Node both = a;
    both.head = 3.0;
    CHECK_THROWS_AS(Network({r, both}, {Pipe{"p", "r", "a", 1, 2}}), ValidationError);

    try {
        Network({r, a, b}, {Pipe{"p", "r", "a", 1, 2}});
    } catch (const ValidationError& e) {
        CHECK(e.element() == "b");
    }
}

TEST_CASE("incidence of the single-pipe network") {
    const auto inc = incidence_matrices(fixtures::single_pipe());
    // Pipe leaves the reservoir (-1) and enters the demand node (+1).
    CHECK(inc.a12.rows() == 1);
    CHECK(inc.a12.cols() == 1);
    CHECK(inc.a12(0, 0) == 1.0);
    CHECK(inc.a10(0, 0) == -1.0);
}

TEST_CASE("incidence rows are signed pairs and every demand node is connected") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Network net = seed == 1 ? fixtures::triangle() : fixtures::random_network(seed);
        const auto& inc = net.incidence();
        Eigen::MatrixXd both(inc.a12.rows(), inc.a12.cols() + inc.a10.cols());
        both << inc.a12, inc.a10;
        for (Eigen::Index j = 0; j < both.rows(); ++j) {
            CHECK(both.row(j).sum() == 0.0);
            CHECK((both.row(j).array() != 0.0).count() == 2);
        }
        for (Eigen::Index i = 0; i < inc.a12.cols(); ++i)
            CHECK((inc.a12.col(i).array() != 0.0).count() >= 1);
    }
}

TEST_CASE("head-loss diagonal values") {
    const Network two({Node::reservoir("r", 10), Node::junction("a", 1)},
                      {Pipe{"p", "r", "a", 10.0, 2.0}});
    CHECK(headloss_diagonal(two, Eigen::VectorXd::Constant(1, 3.0)).diagonal()(0) == 30.0);

    const Network hw({Node::reservoir("r", 10), Node::junction("a", 1)},
                     {Pipe{"p", "r", "a", 10.0, 1.852}});
    // Oracle: r * exp((n - 1) * ln|q|), evaluated independently of std::pow.
    const double at_floor = 10.0 * std::exp(0.852 * std::log(1e-6));
    CHECK(headloss_diagonal(hw, Eigen::VectorXd::Zero(1), 1e-6).diagonal()(0) ==
          doctest::Approx(at_floor).epsilon(1e-14));
    const double at_two = 10.0 * std::exp(0.852 * std::log(2.0));
    CHECK(headloss_diagonal(hw, Eigen::VectorXd::Constant(1, 2.0)).diagonal()(0) ==
          doctest::Approx(at_two).epsilon(1e-14));
    CHECK(at_two == doctest::Approx(18.0500145492486).epsilon(1e-12));

    CHECK(headloss_jacobian(hw, Eigen::VectorXd::Constant(1, 2.0)).diagonal()(0) ==
          doctest::Approx(1.852 * at_two).epsilon(1e-14));
}

TEST_CASE("head-loss diagonal is even and head loss is odd in q") {
    const Network net = fixtures::random_network(7);
    StreamRng rng(99, 0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd q(static_cast<Eigen::Index>(net.pipe_count()));
        for (Eigen::Index j = 0; j < q.size(); ++j) q(j) = rng.uniform(-3.0, 3.0);
        const auto d_pos = headloss_diagonal(net, q);
        const auto d_neg = headloss_diagonal(net, -q);
        CHECK(d_pos.diagonal() == d_neg.diagonal());
        const Eigen::VectorXd h_pos = d_pos * q;
        const Eigen::VectorXd h_neg = d_neg * (-q);
        CHECK(h_pos == -h_neg);
        for (Eigen::Index j = 0; j < q.size(); ++j)
            if (std::abs(q(j)) >= kFlowFloor) CHECK((h_pos(j) > 0) == (q(j) > 0));
    }
}

TEST_CASE("with_demands replaces only demands") {
    const Network net = fixtures::triangle();
    const Network bumped = net.with_demands(Eigen::Vector2d(4.0, 1.0));
    CHECK(bumped.demands() == Eigen::Vector2d(4.0, 1.0));
    CHECK(bumped.pipes() == net.pipes());
    CHECK_THROWS_AS(net.with_demands(Eigen::Vector3d(1, 1, 1)), ValidationError);
}
