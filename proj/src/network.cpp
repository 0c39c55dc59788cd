#include "current_lab/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "current_lab/error.hpp"

namespace current_lab {

namespace {

// Union-find whose representative is always the smallest vertex id.
class MinRootUnionFind {
public:
    explicit MinRootUnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b)
            parent_[b] = a;
        else
            parent_[a] = b;
    }

private:
    std::vector<std::size_t> parent_;
};

Clusters components_of(std::size_t n, const std::vector<Edge>& edges,
                       std::span<const std::uint8_t> open) {
    MinRootUnionFind uf(n);
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (open[e]) uf.unite(edges[e].u, edges[e].v);
    Clusters c;
    c.root.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
        c.root[x] = uf.find(x);
        if (c.root[x] == x) ++c.count;
    }
    return c;
}

}  // namespace

Network::Network(std::size_t vertex_count, std::vector<Edge> edges, std::vector<double> beta,
                 std::optional<Pinning> pinning)
    : Network(Unchecked{}, vertex_count, std::move(edges), std::move(beta), pinning) {
    if (vertex_count_ == 0) throw ValidationError("network must have at least one vertex");
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edges_[e].u >= vertex_count_ || edges_[e].v >= vertex_count_) {
            std::ostringstream msg;
            msg << "edge " << e << " references a vertex outside [0, " << vertex_count_ << ")";
            throw ValidationError(msg.str());
        }
    }
    if (pinning_) {
        if (pinning_->vertex >= vertex_count_)
            throw ValidationError("pinning vertex outside the vertex range");
        if (!(pinning_->conductance >= 0.0) || !std::isfinite(pinning_->conductance))
            throw ValidationError("pinning conductance must be a finite nonnegative number");
    }

    EdgeConfig all_open(edges_.size(), 1);
    const Clusters c = components_of(vertex_count_, edges_, all_open);
    if (c.count > 1) {
        std::size_t isolated = 0;
        for (std::size_t x = 0; x < vertex_count_; ++x) {
            if (c.root[x] != 0) {
                isolated = c.root[x];
                break;
            }
        }
        std::ostringstream msg;
        msg << "disconnected network: the component containing vertex " << isolated
            << " {";
        bool first = true;
        for (std::size_t x = 0; x < vertex_count_; ++x) {
            if (c.root[x] != isolated) continue;
            msg << (first ? "" : ",") << x;
            first = false;
        }
        msg << "} is not joined to vertex 0";
        throw ValidationError(msg.str());
    }
}

Network::Network(Unchecked, std::size_t vertex_count, std::vector<Edge> edges,
                 std::vector<double> beta, std::optional<Pinning> pinning)
    : vertex_count_(vertex_count),
      edges_(std::move(edges)),
      beta_(std::move(beta)),
      pinning_(pinning) {
    if (beta_.size() != edges_.size()) {
        std::ostringstream msg;
        msg << "expected " << edges_.size() << " weights, got " << beta_.size();
        throw ValidationError(msg.str());
    }
    for (std::size_t e = 0; e < beta_.size(); ++e) {
        if (!(beta_[e] >= 0.0) || !std::isfinite(beta_[e])) {
            std::ostringstream msg;
            msg << "weight of edge " << e << " must be a finite nonnegative number, got "
                << beta_[e];
            throw ValidationError(msg.str());
        }
    }
    for (const Edge& ed : edges_)
        if (ed.u >= vertex_count_ || ed.v >= vertex_count_) return;  // reported by caller
    build_incidence();
}

void Network::build_incidence() {
    std::vector<std::size_t> degree(vertex_count_, 0);
    for (const Edge& ed : edges_) {
        ++degree[ed.u];
        if (!ed.is_loop()) ++degree[ed.v];
    }
    incidence_offsets_.assign(vertex_count_ + 1, 0);
    for (std::size_t x = 0; x < vertex_count_; ++x)
        incidence_offsets_[x + 1] = incidence_offsets_[x] + degree[x];
    incidence_.resize(incidence_offsets_.back());
    std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        incidence_[fill[edges_[e].u]++] = e;
        if (!edges_[e].is_loop()) incidence_[fill[edges_[e].v]++] = e;
    }
}

std::span<const std::size_t> Network::incident(std::size_t x) const {
    return {incidence_.data() + incidence_offsets_[x],
            incidence_offsets_[x + 1] - incidence_offsets_[x]};
}

Network Network::with_weights(std::vector<double> beta) const {
    return Network(Unchecked{}, vertex_count_, edges_, std::move(beta), pinning_);
}

Network Network::with_pinning(std::optional<Pinning> pinning) const {
    Network copy = *this;
    if (pinning && (pinning->vertex >= vertex_count_ || !(pinning->conductance >= 0.0)))
        throw ValidationError("invalid pinning");
    copy.pinning_ = pinning;
    return copy;
}

Network build_network(const NetworkSpec& spec) {
    return Network(spec.vertices, spec.edges, spec.beta, spec.pinning);
}

std::vector<std::size_t> Clusters::dense_labels() const {
    std::vector<std::size_t> dense(root.size());
    std::vector<std::size_t> index_of_root(root.size(), 0);
    std::size_t next = 0;
    for (std::size_t x = 0; x < root.size(); ++x)
        if (root[x] == x) index_of_root[x] = next++;
    for (std::size_t x = 0; x < root.size(); ++x) dense[x] = index_of_root[root[x]];
    return dense;
}

Clusters components(const Network& net, std::span<const std::uint8_t> open) {
    if (open.size() != net.edge_count())
        throw ContractError("edge configuration length does not match edge count");
    return components_of(net.vertex_count(), net.edges(), open);
}

std::size_t cyclomatic_number(const Network& net, std::span<const std::uint8_t> open) {
    const Clusters c = components(net, open);
    const auto o = static_cast<std::size_t>(std::count_if(open.begin(), open.end(),
                                                          [](std::uint8_t b) { return b != 0; }));
    const std::size_t value = o + c.count - net.vertex_count();
    return value;
}

bool incidence_parity_check(const Network& net, std::span<const std::int8_t> signs) {
    if (signs.size() != net.edge_count())
        throw ContractError("signed configuration length does not match edge count");
    std::vector<std::uint8_t> parity(net.vertex_count(), 0);
    for (std::size_t e = 0; e < signs.size(); ++e) {
        if (signs[e] < -1 || signs[e] > 1)
            throw ContractError("signed configuration entries must lie in {-1, 0, +1}");
        if (signs[e] != -1) continue;
        const Edge& ed = net.edge(e);
        if (ed.is_loop()) continue;
        parity[ed.u] ^= 1;
        parity[ed.v] ^= 1;
    }
    return std::all_of(parity.begin(), parity.end(), [](std::uint8_t p) { return p == 0; });
}

bool incidence_parity_check(const Network& net, std::span<const std::uint32_t> current) {
    if (current.size() != net.edge_count())
        throw ContractError("current length does not match edge count");
    std::vector<std::uint8_t> parity(net.vertex_count(), 0);
    for (std::size_t e = 0; e < current.size(); ++e) {
        const Edge& ed = net.edge(e);
        if (ed.is_loop() || (current[e] & 1u) == 0) continue;
        parity[ed.u] ^= 1;
        parity[ed.v] ^= 1;
    }
    return std::all_of(parity.begin(), parity.end(), [](std::uint8_t p) { return p == 0; });
}

void validate_clusters(const Clusters& clusters, std::size_t vertex_count) {
    if (clusters.root.size() != vertex_count)
        throw ContractError("cluster partition does not cover the vertex set");
    std::size_t roots = 0;
    for (std::size_t x = 0; x < vertex_count; ++x) {
        const std::size_t r = clusters.root[x];
        if (r > x || clusters.root[r] != r)
            throw ContractError("malformed cluster partition at vertex " + std::to_string(x));
        if (r == x) ++roots;
    }
    if (roots != clusters.count)
        throw ContractError("cluster count does not match the partition");
}

}  // namespace current_lab
