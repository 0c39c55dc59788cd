#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace current_lab {

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;

    bool is_loop() const { return u == v; }
    std::size_t other(std::size_t x) const { return x == u ? v : u; }
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Attachment of vertex `vertex` to the implicit boundary vertex o.
struct Pinning {
    std::size_t vertex = 0;
    double conductance = 0.0;
    friend bool operator==(const Pinning&, const Pinning&) = default;
};

/// Per-edge open/closed bits.
using EdgeConfig = std::vector<std::uint8_t>;
/// Per-edge values in {-1, 0, +1}.
using SignedEdgeConfig = std::vector<std::int8_t>;
/// Per-vertex spins in {-1, +1}.
using SpinConfig = std::vector<std::int8_t>;
/// Per-edge nonnegative integer currents.
using CurrentConfig = std::vector<std::uint32_t>;

/// Finite weighted multigraph. Edge identity is positional, so parallel
/// edges and self-loops are distinct couplings. Immutable once built.
class Network {
public:
    /// Validates weights, vertex ids and connectivity of the listed edges.
    Network(std::size_t vertex_count, std::vector<Edge> edges, std::vector<double> beta,
            std::optional<Pinning> pinning = std::nullopt);

    std::size_t vertex_count() const { return vertex_count_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t e) const { return edges_[e]; }
    const std::vector<double>& beta() const { return beta_; }
    double beta(std::size_t e) const { return beta_[e]; }
    const std::optional<Pinning>& pinning() const { return pinning_; }

    /// Edge indices incident to x; a self-loop at x appears once.
    std::span<const std::size_t> incident(std::size_t x) const;

    /// Same topology with new (nonnegative) weights. Connectivity is a
    /// property of the topology and is not re-checked.
    Network with_weights(std::vector<double> beta) const;
    Network with_pinning(std::optional<Pinning> pinning) const;

    friend bool operator==(const Network& a, const Network& b) {
        return a.vertex_count_ == b.vertex_count_ && a.edges_ == b.edges_ && a.beta_ == b.beta_ &&
               a.pinning_ == b.pinning_;
    }

private:
    struct Unchecked {};
    Network(Unchecked, std::size_t vertex_count, std::vector<Edge> edges, std::vector<double> beta,
            std::optional<Pinning> pinning);
    void build_incidence();

    std::size_t vertex_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> beta_;
    std::optional<Pinning> pinning_;
    std::vector<std::size_t> incidence_offsets_;
    std::vector<std::size_t> incidence_;
};

/// Structured description consumed by build_network.
struct NetworkSpec {
    std::size_t vertices = 0;
    std::vector<Edge> edges;
    std::vector<double> beta;
    std::optional<Pinning> pinning;
};

Network build_network(const NetworkSpec& spec);

/// Cluster partition. `root[x]` is the smallest vertex id of x's cluster.
struct Clusters {
    std::vector<std::size_t> root;
    std::size_t count = 0;

    bool same(std::size_t x, std::size_t y) const { return root[x] == root[y]; }
    /// Dense cluster index in [0, count), ordered by root.
    std::vector<std::size_t> dense_labels() const;
};

/// Connected components of the open subgraph.
Clusters components(const Network& net, std::span<const std::uint8_t> open);

/// o(v) + k(v) - |X|, the number of independent cycles of the open subgraph.
std::size_t cyclomatic_number(const Network& net, std::span<const std::uint8_t> open);

/// True iff at every vertex the number of incident edges with value -1 is
/// even. Entries must be in {-1, 0, +1}; self-loops never break parity.
bool incidence_parity_check(const Network& net, std::span<const std::int8_t> signs);

/// True iff at every vertex the sum of incident currents is even, with
/// self-loops counted twice (i.e. the current is sourceless).
bool incidence_parity_check(const Network& net, std::span<const std::uint32_t> current);

/// Checks that `clusters` is a well-formed partition of net's vertex set.
void validate_clusters(const Clusters& clusters, std::size_t vertex_count);

}  // namespace current_lab
