#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hydrostate {

/// Default head-loss exponent (Hazen-Williams form).
inline constexpr double kDefaultExponent = 1.852;

/// |q| floor used in the head-loss diagonal and its Jacobian.
inline constexpr double kFlowFloor = 1e-6;

enum class NodeKind { demand, fixed_head };

struct Node {
    std::string id;
    NodeKind kind = NodeKind::demand;
    std::optional<double> head;    // meters, fixed-head nodes only
    std::optional<double> demand;  // flow units, demand nodes only

    static Node reservoir(std::string id, double head);
    static Node junction(std::string id, double demand);

    friend bool operator==(const Node&, const Node&) = default;
};

/// Pipe with monomial head loss h = r * q * |q|^(n - 1). Positive q flows
/// from `from` to `to`.
struct Pipe {
    std::string id;
    std::string from;
    std::string to;
    double resistance = 1.0;
    double exponent = kDefaultExponent;

    friend bool operator==(const Pipe&, const Pipe&) = default;
};

/// Signed incidence blocks. Row j of (a12 | a10) holds -1 at the node pipe j
/// leaves and +1 at the node it enters.
struct IncidenceMatrices {
    Eigen::MatrixXd a12;  // L x N_p, demand nodes
    Eigen::MatrixXd a10;  // L x N_f, fixed-head nodes
};

/// Validated, immutable pipe network. File order of nodes and pipes is the
/// canonical order of the unknowns: flows follow pipe order, heads follow the
/// order of demand nodes among `nodes()`.
class Network {
public:
    /// Throws ValidationError naming the offending element.
    Network(std::vector<Node> nodes, std::vector<Pipe> pipes);

    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Pipe>& pipes() const noexcept { return pipes_; }

    [[nodiscard]] std::size_t pipe_count() const noexcept { return pipes_.size(); }
    [[nodiscard]] std::size_t demand_count() const noexcept { return demand_nodes_.size(); }
    [[nodiscard]] std::size_t fixed_count() const noexcept { return fixed_nodes_.size(); }
    /// L + N_p, the length of the state vector.
    [[nodiscard]] std::size_t state_size() const noexcept {
        return pipe_count() + demand_count();
    }

    /// Indices into nodes() of demand / fixed-head nodes, in file order.
    [[nodiscard]] const std::vector<std::size_t>& demand_nodes() const noexcept {
        return demand_nodes_;
    }
    [[nodiscard]] const std::vector<std::size_t>& fixed_nodes() const noexcept {
        return fixed_nodes_;
    }

    [[nodiscard]] std::optional<std::size_t> find_node(std::string_view id) const;
    [[nodiscard]] std::optional<std::size_t> find_pipe(std::string_view id) const;
    /// Position of a demand node among the head unknowns.
    [[nodiscard]] std::optional<std::size_t> head_index(std::string_view node_id) const;

    /// Q, the demand vector (length N_p).
    [[nodiscard]] Eigen::VectorXd demands() const;
    /// H_f, the fixed-head vector (length N_f).
    [[nodiscard]] Eigen::VectorXd fixed_heads() const;

    [[nodiscard]] const IncidenceMatrices& incidence() const noexcept { return incidence_; }

    /// Copy with demands replaced (length N_p, entries >= 0).
    [[nodiscard]] Network with_demands(const Eigen::VectorXd& demands) const;

    friend bool operator==(const Network& a, const Network& b) {
        return a.nodes_ == b.nodes_ && a.pipes_ == b.pipes_;
    }

private:
    std::vector<Node> nodes_;
    std::vector<Pipe> pipes_;
    std::vector<std::size_t> demand_nodes_;
    std::vector<std::size_t> fixed_nodes_;
    std::vector<std::size_t> head_slot_;  // node index -> position in H or N_f block
    std::unordered_map<std::string, std::size_t> node_lookup_;
    std::unordered_map<std::string, std::size_t> pipe_lookup_;
    IncidenceMatrices incidence_;
};

/// Decode and validate a network file (JSON). Throws ParseError on malformed
/// text, SchemaError (a ValidationError) otherwise.
Network parse_network(std::string_view text);

IncidenceMatrices incidence_matrices(const Network& net);

/// Diagonal of A11(q): r_j * max(|q_j|, floor)^(n_j - 1).
Eigen::DiagonalMatrix<double, Eigen::Dynamic> headloss_diagonal(
    const Network& net, const Eigen::VectorXd& q, double floor = kFlowFloor);

/// Diagonal of A'11(q): n_j * r_j * max(|q_j|, floor)^(n_j - 1).
Eigen::DiagonalMatrix<double, Eigen::Dynamic> headloss_jacobian(
    const Network& net, const Eigen::VectorXd& q, double floor = kFlowFloor);

}  // namespace hydrostate
