#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "current_lab/distribution.hpp"
#include "current_lab/network.hpp"

namespace current_lab {

enum class ModelKind { Ising, FK, CurrentParity, CurrentTrace, Bernoulli };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
Space space_for(const Network& net, ModelKind kind);

/// Per-edge parity classes: 0 (N_e = 0), 1 (N_e odd), 2 (N_e positive even).
using ParityClass = std::vector<std::uint8_t>;

namespace limits {
inline constexpr std::size_t max_binary_dimension = 20;
inline constexpr std::size_t max_parity_dimension = 13;
inline constexpr std::size_t max_sign_count_edges = 25;
}  // namespace limits

/// Parity-class weights f(0) = 1, f(1) = sinh b, f(2) = cosh b - 1.
double parity_weight(double beta, std::uint8_t parity);

/// 1 - exp(-beta_e) for every edge.
std::vector<double> bernoulli_probabilities(const Network& net);

/// Full probability table of the chosen model on net.
///
/// Ising lives on spins, CurrentParity on {0,1,2}^E, the rest on {0,1}^E.
/// The stored z is the unnormalized weight sum: Z_beta for Ising, the
/// random-current partition function for both current kinds, the FK
/// normalizer for FK and 1 for Bernoulli.
FiniteDistribution exact_measure(const Network& net, ModelKind kind);

struct PartitionFunctions {
    double ising = 0.0;
    double current = 0.0;
    double fk = 0.0;
};

/// The three normalizers. Z_ising == 2^|X| * Z_current.
PartitionFunctions partition_functions(const Network& net);

/// E[sigma_x sigma_y] under the Ising measure.
double two_point_exact(const Network& net, std::size_t x, std::size_t y);

/// E[sigma_root sigma_x] for every vertex x, in one enumeration pass.
/// Used by the jump process, which needs all of them at each proposal.
std::vector<double> correlations_with(const Network& net, std::size_t root);
/// Same, with the couplings replaced by `weights` (topology from net).
std::vector<double> correlations_with(const Network& net, std::size_t root, std::span<const double> weights);

/// Law of the edgewise maximum of independent draws from a and b. When b is
/// a product measure the per-edge mixing path is used.
FiniteDistribution superpose_max(const FiniteDistribution& a, const FiniteDistribution& b);
FiniteDistribution superpose_max(const FiniteDistribution& a, std::span<const double> p);

/// Number of admissible sign assignments compatible with v, counted by
/// brute force and checked against 2^cyclomatic_number.
std::uint64_t sign_assignment_count(const Network& net, std::span<const std::uint8_t> open);

/// Spin law obtained by giving each FK cluster an independent fair sign.
FiniteDistribution color_clusters_exact(const Network& net);

/// The unique Q with superpose_max(Q, Bernoulli(p)) == fk.
FiniteDistribution reconstruct_trace_law(const FiniteDistribution& fk, std::span<const double> p);

}  // namespace current_lab
