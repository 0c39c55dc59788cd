#pragma once

#include <string>
#include <vector>

#include "current_lab/network.hpp"

namespace battery {

using current_lab::Edge;
using current_lab::Network;
using current_lab::Pinning;

struct Case {
    std::string name;
    Network net;
};

inline std::vector<std::pair<std::string, std::pair<std::size_t, std::vector<Edge>>>> shapes() {
    return {
        {"single-edge", {2, {{0, 1}}}},
        {"path-3", {3, {{0, 1}, {1, 2}}}},
        {"triangle", {3, {{0, 1}, {1, 2}, {2, 0}}}},
        {"4-cycle", {4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}}},
        {"two-triangles", {4, {{0, 1}, {1, 2}, {2, 0}, {1, 3}, {3, 2}}}},
    };
}

inline const std::vector<double> heterogeneous = {0.2, 1.3, 0.7, 0.45, 1.9};

/// Every shape with uniform 0.3, uniform 1.0 and one heterogeneous assignment,
/// pinned at vertex 0 with conductance 2.
inline std::vector<Case> standard() {
    std::vector<Case> out;
    for (const auto& [name, shape] : shapes()) {
        const auto& [n, edges] = shape;
        const std::size_t m = edges.size();
        for (double b : {0.3, 1.0})
            out.push_back({name + " beta=" + std::to_string(b).substr(0, 3),
                           Network(n, edges, std::vector<double>(m, b), Pinning{0, 2.0})});
        out.push_back({name + " heterogeneous",
                       Network(n, edges, std::vector<double>(heterogeneous.begin(), heterogeneous.begin() + m),
                               Pinning{0, 2.0})});
    }
    return out;
}

inline Network single_edge(double beta, double c = 2.0) { return Network(2, {{0, 1}}, {beta}, Pinning{0, c}); }
inline Network one_vertex(double c = 2.0) { return Network(1, {}, {}, Pinning{0, c}); }
inline Network triangle(double beta) {
    return Network(3, {{0, 1}, {1, 2}, {2, 0}}, {beta, beta, beta}, Pinning{0, 2.0});
}

}  // namespace battery
