#include "current_lab/exact.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <sstream>

#include "current_lab/error.hpp"

namespace current_lab {

namespace {

void require_binary_capacity(std::size_t dimension, const char* what) {
    if (dimension > limits::max_binary_dimension) {
        std::ostringstream msg;
        msg << what << ": " << dimension << " coordinates exceed the enumeration limit of 2^"
            << limits::max_binary_dimension << " configurations";
        throw CapacityError(msg.str());
    }
}

// Bit of coordinate i in a lexicographic index over {0,1}^d.
inline std::size_t coordinate_bit(std::size_t d, std::size_t i) { return std::size_t{1} << (d - 1 - i); }

// Vertex-parity mask of each edge (self-loops contribute nothing).
std::vector<std::uint64_t> edge_parity_masks(const Network& net) {
    if (net.vertex_count() > 64)
        throw CapacityError("parity bookkeeping supports at most 64 vertices");
    std::vector<std::uint64_t> masks(net.edge_count(), 0);
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        const Edge& ed = net.edge(e);
        if (!ed.is_loop()) masks[e] = (std::uint64_t{1} << ed.u) ^ (std::uint64_t{1} << ed.v);
    }
    return masks;
}

FiniteDistribution ising_measure(const Network& net) {
    const std::size_t n = net.vertex_count();
    require_binary_capacity(n, "Ising measure");
    long double total_beta = 0.0L;
    for (double b : net.beta()) total_beta += b;
    if (total_beta > 700.0L)
        throw NumericalError("Ising weights overflow double precision (sum of couplings > 700)");

    const Space space{SpaceKind::Spin, n};
    std::vector<double> weights(space.size());
    std::vector<int> spin(n);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        for (std::size_t x = 0; x < n; ++x) spin[x] = (i & coordinate_bit(n, x)) ? -1 : 1;
        long double energy = 0.0L;
        for (std::size_t e = 0; e < net.edge_count(); ++e) {
            const Edge& ed = net.edge(e);
            energy += net.beta(e) * spin[ed.u] * spin[ed.v];
        }
        weights[i] = static_cast<double>(std::exp(energy));
    }
    return FiniteDistribution(space, std::move(weights));
}

FiniteDistribution fk_measure(const Network& net) {
    const std::size_t m = net.edge_count();
    require_binary_capacity(m, "FK measure");
    const Space space{SpaceKind::Edge, m};
    std::vector<long double> open_w(m), closed_w(m);
    for (std::size_t e = 0; e < m; ++e) {
        closed_w[e] = std::exp(-2.0L * net.beta(e));
        open_w[e] = -std::expm1(-2.0L * net.beta(e));
    }
    std::vector<double> weights(space.size());
    EdgeConfig w(m);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        long double weight = 1.0L;
        for (std::size_t e = 0; e < m; ++e) {
            w[e] = (i & coordinate_bit(m, e)) ? 1 : 0;
            weight *= w[e] ? open_w[e] : closed_w[e];
        }
        if (weight != 0.0L) weight *= std::ldexp(1.0L, static_cast<int>(components(net, w).count));
        weights[i] = static_cast<double>(weight);
    }
    return FiniteDistribution(space, std::move(weights));
}

FiniteDistribution parity_measure(const Network& net) {
    const std::size_t m = net.edge_count();
    if (m > limits::max_parity_dimension) {
        std::ostringstream msg;
        msg << "CurrentParity measure: " << m << " edges exceed the enumeration limit of 3^"
            << limits::max_parity_dimension << " parity classes";
        throw CapacityError(msg.str());
    }
    const auto masks = edge_parity_masks(net);
    const Space space{SpaceKind::Parity, m};
    std::vector<double> weights(space.size(), 0.0);
    std::vector<std::array<long double, 3>> f(m);
    for (std::size_t e = 0; e < m; ++e)
        for (std::uint8_t u = 0; u < 3; ++u) f[e][u] = parity_weight(net.beta(e), u);

    std::vector<std::uint8_t> digits(m, 0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        std::uint64_t parity = 0;
        long double weight = 1.0L;
        for (std::size_t e = 0; e < m; ++e) {
            if (digits[e] == 1) parity ^= masks[e];
            weight *= f[e][digits[e]];
        }
        weights[i] = parity == 0 ? static_cast<double>(weight) : 0.0;
        // odometer increment, last coordinate fastest
        for (std::size_t e = m; e-- > 0;) {
            if (++digits[e] < 3) break;
            digits[e] = 0;
        }
    }
    return FiniteDistribution(space, std::move(weights));
}

// Trace weights sum_{S even, S subset of w} prod_S sinh prod_{w\S} (cosh - 1),
// by a subset-sum transform over the cosh - 1 factors.
std::vector<long double> trace_weights(const Network& net) {
    const std::size_t m = net.edge_count();
    require_binary_capacity(m, "CurrentTrace measure");
    const auto masks = edge_parity_masks(net);
    const std::size_t size = std::size_t{1} << m;
    std::vector<long double> table(size, 0.0L);
    std::vector<std::uint64_t> parity(size, 0);
    std::vector<long double> sinh_b(m), cosh_m1(m);
    for (std::size_t e = 0; e < m; ++e) {
        sinh_b[e] = std::sinh(static_cast<long double>(net.beta(e)));
        cosh_m1[e] = parity_weight(net.beta(e), 2);
    }
    table[0] = 1.0L;
    for (std::size_t i = 1; i < size; ++i) {
        const std::size_t low = i & (~i + 1);
        const std::size_t e = m - 1 - static_cast<std::size_t>(std::countr_zero(low));
        parity[i] = parity[i ^ low] ^ masks[e];
        table[i] = table[i ^ low] * sinh_b[e];
    }
    for (std::size_t i = 0; i < size; ++i)
        if (parity[i] != 0) table[i] = 0.0L;
    for (std::size_t e = 0; e < m; ++e) {
        const std::size_t bit = coordinate_bit(m, e);
        for (std::size_t i = 0; i < size; ++i)
            if (i & bit) table[i] += cosh_m1[e] * table[i ^ bit];
    }
    return table;
}

FiniteDistribution trace_measure(const Network& net) {
    const auto table = trace_weights(net);
    std::vector<double> weights(table.begin(), table.end());
    return FiniteDistribution(Space{SpaceKind::Edge, net.edge_count()}, std::move(weights));
}

std::vector<long double> as_long(const FiniteDistribution& d) {
    return {d.probabilities().begin(), d.probabilities().end()};
}

FiniteDistribution from_long(const Space& space, const std::vector<long double>& table) {
    std::vector<double> weights(table.size());
    for (std::size_t i = 0; i < table.size(); ++i)
        weights[i] = static_cast<double>(std::max(table[i], 0.0L));
    return FiniteDistribution(space, std::move(weights));
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Ising: return "ising";
        case ModelKind::FK: return "fk";
        case ModelKind::CurrentParity: return "current-parity";
        case ModelKind::CurrentTrace: return "current-trace";
        case ModelKind::Bernoulli: return "bernoulli";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
    for (ModelKind k : {ModelKind::Ising, ModelKind::FK, ModelKind::CurrentParity,
                        ModelKind::CurrentTrace, ModelKind::Bernoulli})
        if (to_string(k) == name) return k;
    throw ValidationError("unknown model kind '" + name + "'");
}

Space space_for(const Network& net, ModelKind kind) {
    switch (kind) {
        case ModelKind::Ising: return {SpaceKind::Spin, net.vertex_count()};
        case ModelKind::CurrentParity: return {SpaceKind::Parity, net.edge_count()};
        default: return {SpaceKind::Edge, net.edge_count()};
    }
}

double parity_weight(double beta, std::uint8_t parity) {
    switch (parity) {
        case 0: return 1.0;
        case 1: return std::sinh(beta);
        case 2: {
            // cosh b - 1 = 2 sinh^2(b/2), exact near 0
            const double s = std::sinh(beta / 2.0);
            return 2.0 * s * s;
        }
        default: throw ContractError("parity class must be 0, 1 or 2");
    }
}

std::vector<double> bernoulli_probabilities(const Network& net) {
    std::vector<double> p(net.edge_count());
    for (std::size_t e = 0; e < p.size(); ++e) p[e] = -std::expm1(-net.beta(e));
    return p;
}

FiniteDistribution exact_measure(const Network& net, ModelKind kind) {
    switch (kind) {
        case ModelKind::Ising: return ising_measure(net);
        case ModelKind::FK: return fk_measure(net);
        case ModelKind::CurrentParity: return parity_measure(net);
        case ModelKind::CurrentTrace: return trace_measure(net);
        case ModelKind::Bernoulli: {
            require_binary_capacity(net.edge_count(), "Bernoulli measure");
            const auto p = bernoulli_probabilities(net);
            return FiniteDistribution::bernoulli(p);
        }
    }
    throw ContractError("unknown model kind");
}

PartitionFunctions partition_functions(const Network& net) {
    PartitionFunctions z;
    z.ising = ising_measure(net).z();
    CompensatedSum current;
    for (long double w : trace_weights(net)) current.add(w);
    z.current = static_cast<double>(current.value());
    z.fk = fk_measure(net).z();
    return z;
}

std::vector<double> correlations_with(const Network& net, std::size_t root) {
    return correlations_with(net, root, net.beta());
}

std::vector<double> correlations_with(const Network& net, std::size_t root, std::span<const double> weights) {
    const std::size_t n = net.vertex_count();
    if (root >= n) throw ContractError("vertex out of range");
    if (weights.size() != net.edge_count()) throw ContractError("weight vector does not match edge count");
    require_binary_capacity(n, "two-point function");
    long double max_energy = 0.0L;
    for (double b : weights) max_energy += b;

    // The Ising law is invariant under a global flip, so fix sigma_root = +1.
    std::vector<std::size_t> others;
    for (std::size_t x = 0; x < n; ++x)
        if (x != root) others.push_back(x);
    std::vector<int> spin(n, 1);
    std::vector<long double> moment(n, 0.0L);
    long double total = 0.0L;
    const std::size_t count = std::size_t{1} << others.size();
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < others.size(); ++j) spin[others[j]] = ((i >> j) & 1u) ? -1 : 1;
        long double energy = 0.0L;
        for (std::size_t e = 0; e < net.edge_count(); ++e) {
            const Edge& ed = net.edge(e);
            energy += weights[e] * spin[ed.u] * spin[ed.v];
        }
        const long double w = std::exp(energy - max_energy);
        total += w;
        for (std::size_t x = 0; x < n; ++x) moment[x] += w * spin[x];
    }
    std::vector<double> corr(n);
    for (std::size_t x = 0; x < n; ++x) corr[x] = static_cast<double>(moment[x] / total);
    corr[root] = 1.0;
    return corr;
}

double two_point_exact(const Network& net, std::size_t x, std::size_t y) {
    if (x >= net.vertex_count() || y >= net.vertex_count())
        throw ContractError("vertex out of range");
    if (x == y) return 1.0;
    return correlations_with(net, x)[y];
}

FiniteDistribution superpose_max(const FiniteDistribution& a, const FiniteDistribution& b) {
    if (a.space().kind != SpaceKind::Edge || !(a.space() == b.space()))
        throw ContractError("superpose_max requires two edge-space laws of equal dimension");
    if (b.product_marginals()) return superpose_max(a, *b.product_marginals());

    const std::size_t m = a.space().dimension;
    auto fa = as_long(a);
    auto fb = as_long(b);
    // zeta transform over subsets, multiply, Moebius back
    for (std::size_t e = 0; e < m; ++e) {
        const std::size_t bit = coordinate_bit(m, e);
        for (std::size_t i = 0; i < fa.size(); ++i) {
            if (!(i & bit)) continue;
            fa[i] += fa[i ^ bit];
            fb[i] += fb[i ^ bit];
        }
    }
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    for (std::size_t e = 0; e < m; ++e) {
        const std::size_t bit = coordinate_bit(m, e);
        for (std::size_t i = 0; i < fa.size(); ++i)
            if (i & bit) fa[i] -= fa[i ^ bit];
    }
    return from_long(a.space(), fa);
}

FiniteDistribution superpose_max(const FiniteDistribution& a, std::span<const double> p) {
    if (a.space().kind != SpaceKind::Edge || a.space().dimension != p.size())
        throw ContractError("superpose_max: dimension mismatch between law and probabilities");
    const std::size_t m = p.size();
    auto f = as_long(a);
    for (std::size_t e = 0; e < m; ++e) {
        if (!(p[e] >= 0.0 && p[e] <= 1.0)) throw ContractError("probabilities must lie in [0, 1]");
        const std::size_t bit = coordinate_bit(m, e);
        const long double pe = p[e];
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i & bit) continue;
            f[i | bit] += pe * f[i];
            f[i] *= 1.0L - pe;
        }
    }
    return from_long(a.space(), f);
}

std::uint64_t sign_assignment_count(const Network& net, std::span<const std::uint8_t> open) {
    if (open.size() != net.edge_count())
        throw ContractError("edge configuration length does not match edge count");
    const auto masks = edge_parity_masks(net);
    std::vector<std::uint64_t> open_masks;
    for (std::size_t e = 0; e < open.size(); ++e)
        if (open[e]) open_masks.push_back(masks[e]);
    if (open_masks.size() > limits::max_sign_count_edges) {
        std::ostringstream msg;
        msg << "sign count: " << open_masks.size() << " open edges exceed the brute-force limit of "
            << limits::max_sign_count_edges;
        throw CapacityError(msg.str());
    }

    // Gray-code walk over sign choices; a choice is admissible when the
    // negative edges leave every vertex with even negative degree.
    std::uint64_t admissible = 1;  // all-positive
    std::uint64_t parity = 0;
    const std::uint64_t total = std::uint64_t{1} << open_masks.size();
    for (std::uint64_t i = 1; i < total; ++i) {
        parity ^= open_masks[static_cast<std::size_t>(std::countr_zero(i))];
        if (parity == 0) ++admissible;
    }

    const std::uint64_t closed_form = std::uint64_t{1} << cyclomatic_number(net, open);
    if (admissible != closed_form) {
        std::ostringstream msg;
        msg << "sign count mismatch: brute force " << admissible << " vs 2^cyclomatic "
            << closed_form;
        throw InvariantError(msg.str());
    }
    return admissible;
}

FiniteDistribution color_clusters_exact(const Network& net) {
    const std::size_t n = net.vertex_count();
    require_binary_capacity(n, "cluster coloring");
    const FiniteDistribution fk = fk_measure(net);
    const std::size_t m = net.edge_count();
    std::vector<long double> spin_law(std::size_t{1} << n, 0.0L);
    EdgeConfig w(m);
    std::vector<std::size_t> cluster_mask;
    for (std::size_t i = 0; i < fk.size(); ++i) {
        if (fk.probability(i) == 0.0) continue;
        for (std::size_t e = 0; e < m; ++e) w[e] = (i & coordinate_bit(m, e)) ? 1 : 0;
        const Clusters c = components(net, w);
        const auto label = c.dense_labels();
        cluster_mask.assign(c.count, 0);
        for (std::size_t x = 0; x < n; ++x) cluster_mask[label[x]] |= coordinate_bit(n, x);
        const long double share = std::ldexp(static_cast<long double>(fk.probability(i)),
                                             -static_cast<int>(c.count));
        const std::size_t colorings = std::size_t{1} << c.count;
        for (std::size_t col = 0; col < colorings; ++col) {
            std::size_t spins = 0;
            for (std::size_t k = 0; k < c.count; ++k)
                if ((col >> k) & 1u) spins |= cluster_mask[k];
            spin_law[spins] += share;
        }
    }
    return from_long(Space{SpaceKind::Spin, n}, spin_law);
}

FiniteDistribution reconstruct_trace_law(const FiniteDistribution& fk, std::span<const double> p) {
    if (fk.space().kind != SpaceKind::Edge || fk.space().dimension != p.size())
        throw ContractError("reconstruct_trace_law: dimension mismatch");
    const std::size_t m = p.size();
    for (double pe : p) {
        if (pe >= 1.0) throw NumericalError("reconstruct_trace_law: division by zero, p_e = 1");
        if (!(pe >= 0.0)) throw ContractError("probabilities must lie in [0, 1)");
    }
    // Invert the per-edge mixing one coordinate at a time. Each step is the
    // triangular solve that peels off configurations by occupied-edge count.
    auto q = as_long(fk);
    for (std::size_t e = 0; e < m; ++e) {
        const std::size_t bit = coordinate_bit(m, e);
        const long double pe = p[e];
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (i & bit) continue;
            q[i] /= 1.0L - pe;
            q[i | bit] -= pe * q[i];
        }
    }
    long double worst = 0.0L;
    std::size_t worst_index = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] < worst) {
            worst = q[i];
            worst_index = i;
        }
    }
    if (worst < -1e-9L) {
        std::ostringstream msg;
        msg << "not a superposition: reconstructed mass " << static_cast<double>(worst)
            << " at configuration " << configuration_string(fk.space(), worst_index);
        throw NotSuperpositionError(msg.str());
    }
    return from_long(fk.space(), q);
}

}  // namespace current_lab
