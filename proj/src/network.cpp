#include "hydrostate/network.hpp"

#include "hydrostate/errors.hpp"
#include "hydrostate/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace hydrostate {

Node Node::reservoir(std::string id, double head) {
    return Node{std::move(id), NodeKind::fixed_head, head, std::nullopt};
}

Node Node::junction(std::string id, double demand) {
    return Node{std::move(id), NodeKind::demand, std::nullopt, demand};
}

namespace {

// Union-find over node indices, used only for the connectivity check.
class Components {
public:
    explicit Components(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    void join(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

void validate_node(const Node& node) {
    if (node.id.empty()) throw ValidationError("<node>", "node with empty id");
    const bool fixed = node.kind == NodeKind::fixed_head;
    if (fixed) {
        if (!node.head || node.demand)
            throw ValidationError(node.id, "fixed-head node '" + node.id +
                                               "' must carry a head and no demand");
        if (!std::isfinite(*node.head))
            throw ValidationError(node.id, "node '" + node.id + "' has a non-finite head");
    } else {
        if (!node.demand || node.head)
            throw ValidationError(node.id, "demand node '" + node.id +
                                               "' must carry a demand and no head");
        if (!std::isfinite(*node.demand) || *node.demand < 0.0)
            throw ValidationError(node.id,
                                  "node '" + node.id + "' demand must be finite and >= 0");
    }
}

void validate_pipe(const Pipe& pipe) {
    if (pipe.id.empty()) throw ValidationError("<pipe>", "pipe with empty id");
    if (!(pipe.resistance > 0.0) || !std::isfinite(pipe.resistance))
        throw ValidationError(pipe.id, "pipe '" + pipe.id + "' resistance must be > 0");
    if (!(pipe.exponent > 1.0) || !std::isfinite(pipe.exponent))
        throw ValidationError(pipe.id, "pipe '" + pipe.id + "' exponent must be > 1");
    if (pipe.from == pipe.to)
        throw ValidationError(pipe.id, "pipe '" + pipe.id + "' connects node '" + pipe.from +
                                           "' to itself");
}

}  // namespace

Network::Network(std::vector<Node> nodes, std::vector<Pipe> pipes)
    : nodes_(std::move(nodes)), pipes_(std::move(pipes)) {
    head_slot_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& node = nodes_[i];
        validate_node(node);
        if (!node_lookup_.emplace(node.id, i).second)
            throw ValidationError(node.id, "duplicate node id '" + node.id + "'");
        auto& group = node.kind == NodeKind::fixed_head ? fixed_nodes_ : demand_nodes_;
        head_slot_[i] = group.size();
        group.push_back(i);
    }
    if (fixed_nodes_.empty())
        throw ValidationError("nodes", "network needs at least one fixed-head node");
    if (demand_nodes_.empty())
        throw ValidationError("nodes", "network needs at least one demand node");
    if (pipes_.empty()) throw ValidationError("pipes", "network has no pipes");

    Components components(nodes_.size());
    for (std::size_t j = 0; j < pipes_.size(); ++j) {
        const Pipe& pipe = pipes_[j];
        validate_pipe(pipe);
        if (!pipe_lookup_.emplace(pipe.id, j).second)
            throw ValidationError(pipe.id, "duplicate pipe id '" + pipe.id + "'");
        const auto from = node_lookup_.find(pipe.from);
        const auto to = node_lookup_.find(pipe.to);
        if (from == node_lookup_.end())
            throw ValidationError(pipe.id, "pipe '" + pipe.id + "' starts at unknown node '" +
                                               pipe.from + "'");
        if (to == node_lookup_.end())
            throw ValidationError(pipe.id, "pipe '" + pipe.id + "' ends at unknown node '" +
                                               pipe.to + "'");
        components.join(from->second, to->second);
    }
    const std::size_t root = components.find(0);
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (components.find(i) != root)
            throw ValidationError(nodes_[i].id, "network is disconnected: node '" +
                                                    nodes_[i].id + "' is not reachable from '" +
                                                    nodes_[0].id + "'");
    }

    incidence_ = incidence_matrices(*this);
}

std::optional<std::size_t> Network::find_node(std::string_view id) const {
    const auto it = node_lookup_.find(std::string(id));
    if (it == node_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Network::find_pipe(std::string_view id) const {
    const auto it = pipe_lookup_.find(std::string(id));
    if (it == pipe_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Network::head_index(std::string_view node_id) const {
    const auto node = find_node(node_id);
    if (!node || nodes_[*node].kind != NodeKind::demand) return std::nullopt;
    return head_slot_[*node];
}

Eigen::VectorXd Network::demands() const {
    Eigen::VectorXd q(static_cast<Eigen::Index>(demand_count()));
    for (std::size_t k = 0; k < demand_nodes_.size(); ++k)
        q(static_cast<Eigen::Index>(k)) = *nodes_[demand_nodes_[k]].demand;
    return q;
}

Eigen::VectorXd Network::fixed_heads() const {
    Eigen::VectorXd h(static_cast<Eigen::Index>(fixed_count()));
    for (std::size_t k = 0; k < fixed_nodes_.size(); ++k)
        h(static_cast<Eigen::Index>(k)) = *nodes_[fixed_nodes_[k]].head;
    return h;
}

Network Network::with_demands(const Eigen::VectorXd& demands) const {
    if (static_cast<std::size_t>(demands.size()) != demand_count())
        throw ValidationError("demands", "demand vector length does not match N_p");
    std::vector<Node> nodes = nodes_;
    for (std::size_t k = 0; k < demand_nodes_.size(); ++k)
        nodes[demand_nodes_[k]].demand = demands(static_cast<Eigen::Index>(k));
    return Network(std::move(nodes), pipes_);
}

Network parse_network(std::string_view text) { return io::decode_network(io::parse_text(text)); }

IncidenceMatrices incidence_matrices(const Network& net) {
    const auto rows = static_cast<Eigen::Index>(net.pipe_count());
    IncidenceMatrices m{Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(net.demand_count())),
                        Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(net.fixed_count()))};
    const auto& nodes = net.nodes();
    auto place = [&](Eigen::Index row, const std::string& node_id, double sign) {
        const std::size_t node = *net.find_node(node_id);
        if (nodes[node].kind == NodeKind::demand)
            m.a12(row, static_cast<Eigen::Index>(*net.head_index(node_id))) = sign;
        else {
            const auto& fixed = net.fixed_nodes();
            const auto slot = std::find(fixed.begin(), fixed.end(), node) - fixed.begin();
            m.a10(row, slot) = sign;
        }
    };
    for (std::size_t j = 0; j < net.pipe_count(); ++j) {
        const Pipe& pipe = net.pipes()[j];
        place(static_cast<Eigen::Index>(j), pipe.from, -1.0);
        place(static_cast<Eigen::Index>(j), pipe.to, +1.0);
    }
    return m;
}

Eigen::DiagonalMatrix<double, Eigen::Dynamic> headloss_diagonal(const Network& net,
                                                                const Eigen::VectorXd& q,
                                                                double floor) {
    Eigen::DiagonalMatrix<double, Eigen::Dynamic> d(q.size());
    for (Eigen::Index j = 0; j < q.size(); ++j) {
        const Pipe& pipe = net.pipes()[static_cast<std::size_t>(j)];
        d.diagonal()(j) = pipe.resistance * std::pow(std::max(std::abs(q(j)), floor),
                                                     pipe.exponent - 1.0);
    }
    return d;
}

Eigen::DiagonalMatrix<double, Eigen::Dynamic> headloss_jacobian(const Network& net,
                                                                const Eigen::VectorXd& q,
                                                                double floor) {
    auto d = headloss_diagonal(net, q, floor);
    for (Eigen::Index j = 0; j < q.size(); ++j)
        d.diagonal()(j) *= net.pipes()[static_cast<std::size_t>(j)].exponent;
    return d;
}

}  // namespace hydrostate
