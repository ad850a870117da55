#pragma once

// Shared test fixtures: small hand-built networks, a seeded random network
// generator, and measurement synthesis from a known state.

#include "hydrostate/estimator.hpp"
#include "hydrostate/fuzzy.hpp"
#include "hydrostate/hydraulics.hpp"
#include "hydrostate/network.hpp"
#include "hydrostate/random.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

using namespace hydrostate;

inline std::string data_path(const std::string& name) {
    return std::string(HYDROSTATE_DATA_DIR) + "/" + name;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Reservoir (100 m) feeding one node with demand 2 through r = 10, n = 1.852.
inline Network single_pipe() {
    return Network({Node::reservoir("res", 100.0), Node::junction("n1", 2.0)},
                   {Pipe{"p1", "res", "n1", 10.0, 1.852}});
}

/// One reservoir, two demand nodes, three pipes (same as data/triangle.json).
inline Network triangle(double resistance_scale = 1.0) {
    return Network({Node::reservoir("res", 100.0), Node::junction("n1", 3.0),
                    Node::junction("n2", 2.0)},
                   {Pipe{"p1", "res", "n1", 2.0 * resistance_scale, kDefaultExponent},
                    Pipe{"p2", "n1", "n2", 4.0 * resistance_scale, kDefaultExponent},
                    Pipe{"p3", "res", "n2", 3.0 * resistance_scale, kDefaultExponent}});
}

/// Two identical pipes in parallel from a reservoir to one node with Q = 4.
inline Network parallel_pair() {
    return Network({Node::reservoir("res", 50.0), Node::junction("n1", 4.0)},
                   {Pipe{"a", "res", "n1", 5.0, kDefaultExponent},
                    Pipe{"b", "res", "n1", 5.0, kDefaultExponent}});
}

/// Connected network with `min_nodes..max_nodes` nodes: a random spanning
/// tree plus extra loop pipes, one or two reservoirs.
inline Network random_network(std::uint64_t seed, int min_nodes = 10, int max_nodes = 30) {
    StreamRng rng(seed, 0);
    const int n = min_nodes + static_cast<int>(rng.next() % static_cast<std::uint64_t>(
                                                   max_nodes - min_nodes + 1));
    const int reservoirs = 1 + static_cast<int>(rng.next() % 2);
    std::vector<Node> nodes;
    for (int i = 0; i < n; ++i) {
        const std::string id = "n" + std::to_string(i);
        if (i < reservoirs)
            nodes.push_back(Node::reservoir(id, rng.uniform(90.0, 110.0)));
        else
            nodes.push_back(Node::junction(id, rng.uniform(0.05, 0.5)));
    }
    std::vector<Pipe> pipes;
    auto add_pipe = [&](int a, int b) {
        const double exponent = rng.uniform01() < 0.5 ? kDefaultExponent : 2.0;
        pipes.push_back(Pipe{"p" + std::to_string(pipes.size()), nodes[a].id, nodes[b].id,
                             rng.uniform(0.5, 5.0), exponent});
    };
    for (int i = 1; i < n; ++i) add_pipe(static_cast<int>(rng.next() % static_cast<std::uint64_t>(i)), i);
    const int loops = n / 3;
    for (int k = 0; k < loops; ++k) {
        const int a = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
        const int b = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
        if (a != b) add_pipe(a, b);
    }
    return Network(std::move(nodes), std::move(pipes));
}

/// Telemetry read exactly from `x`: every `stride`-th pipe flow and node head.
inline MeasurementSet exact_measurements(const Network& net, const StateVector& x,
                                         std::size_t stride = 2, double sigma = 0.01) {
    MeasurementSet meas;
    meas.demand_sigma = 0.1;
    meas.demand_delta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.demand_count()));
    for (std::size_t j = 0; j < net.pipe_count(); j += stride)
        meas.measurements.push_back(Measurement{MeasurementKind::pipe_flow, net.pipes()[j].id,
                                                x.q(static_cast<Eigen::Index>(j)), sigma, 0.0});
    const auto& demand = net.demand_nodes();
    for (std::size_t k = 0; k < demand.size(); k += stride)
        meas.measurements.push_back(Measurement{MeasurementKind::node_head,
                                                net.nodes()[demand[k]].id,
                                                x.H(static_cast<Eigen::Index>(k)), sigma, 0.0});
    return meas;
}

/// Two labels kept apart along dimension 0 ("down" below 0.4, "up" above
/// 0.6) with narrow random intervals, so training never contracts a cell.
inline std::vector<LabeledPattern> separated_examples(std::uint64_t seed, int count,
                                                      Eigen::Index dim) {
    StreamRng rng(seed, 0);
    std::vector<LabeledPattern> out;
    for (int k = 0; k < count; ++k) {
        const bool upper = rng.uniform01() < 0.5;
        Eigen::VectorXd inf(dim), sup(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double lo = i == 0 ? (upper ? 0.6 : 0.0) : 0.0;
            const double hi = i == 0 ? (upper ? 1.0 : 0.4) : 1.0;
            const double a = rng.uniform(lo, hi);
            const double w = rng.uniform(0.0, 0.05);
            inf(i) = a;
            sup(i) = std::min(hi, a + w);
        }
        out.push_back(LabeledPattern{Pattern{inf, sup}, upper ? "up" : "down"});
    }
    return out;
}

}  // namespace fixtures
