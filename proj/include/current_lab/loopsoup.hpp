#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "current_lab/network.hpp"
#include "current_lab/rng.hpp"

namespace current_lab {

/// Closed discrete path: vertices[j] --edges[j]--> vertices[(j+1) % n].
/// Stored as its lexicographically smallest rotation.
struct LoopSkeleton {
    std::vector<std::size_t> vertices;
    std::vector<std::size_t> edges;

    std::size_t length() const { return vertices.size(); }
    /// Number of times the primitive loop repeats (n / period).
    std::size_t period_multiplicity() const;

    friend auto operator<=>(const LoopSkeleton&, const LoopSkeleton&) = default;
};

/// Rotation of (vertices, edges) pairs that is lexicographically smallest.
LoopSkeleton canonical_rotation(const LoopSkeleton& loop);

struct Loop {
    LoopSkeleton skeleton;
    /// Poisson mean of this unrooted class: alpha * prod(steps) / period multiplicity.
    double weight = 0.0;
    /// Number of copies in the ensemble.
    std::size_t multiplicity = 0;
    /// Holding times, copy-major: copy c, visit j at c * length + j.
    std::vector<double> holding_times;
};

struct LoopEnsemble {
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;
    std::vector<Loop> loops;
    /// Occupation contributed by loops that never jump.
    std::vector<double> trivial_occupation;
    /// Certified bound on the Poisson mass of loops longer than the cutoff.
    double truncation_bound = 0.0;
};

using OccupationField = std::vector<double>;
using CrossingField = std::vector<std::uint32_t>;

struct SoupFields {
    OccupationField occupation;
    CrossingField crossings;
};

struct TruncationCertificate {
    double spectral_radius = 0.0;
    /// alpha |X| rho^L / (L (1 - rho)), bound on the neglected loop mass.
    double mass_bound = 0.0;
    /// alpha |X| rho^(L+1) / ((1 - rho) min_x lambda_x), bound on the
    /// expected total occupation carried by the neglected loops.
    double occupation_bound = 0.0;
};

/// Loop-soup sampler on the killed continuous-time walk of a pinned network.
///
/// The walk jumps along edge e from x at rate beta_e and is killed at the
/// pinned vertex at rate c; self-loops carry no jumps. Loops of length up
/// to the cutoff are drawn as Poisson numbers of rooted bridges per (start
/// vertex, length) pair, which realizes the unrooted loop measure with the
/// 1/n rooting weight. Trivial loops give Gamma(alpha, lambda_x) occupation.
class LoopSoupSampler {
public:
    LoopSoupSampler(const Network& net, double alpha, std::size_t cutoff, double tolerance = 1e-6);

    LoopEnsemble draw(Rng& rng) const;

    const TruncationCertificate& certificate() const { return certificate_; }
    double alpha() const { return alpha_; }
    std::size_t cutoff() const { return cutoff_; }
    /// Holding rate at x: incident conductance including the pinning.
    const std::vector<double>& holding_rates() const { return rate_; }

private:
    Network net_;
    double alpha_;
    std::size_t cutoff_;
    std::vector<double> rate_;
    Eigen::MatrixXd transition_;
    std::vector<Eigen::MatrixXd> powers_;  // powers_[k] = P^k
    TruncationCertificate certificate_;
};

/// Certificate for (net, alpha, L) without building the sampler.
TruncationCertificate truncation_certificate(const Network& net, double alpha, std::size_t cutoff);

LoopEnsemble sample_soup(const Network& net, double alpha, std::size_t cutoff, const SeedSpec& seed,
                         double tolerance = 1e-6);

/// Occupation (holding times + trivial occupation) and crossing counts.
SoupFields fields(const LoopEnsemble& ensemble);

/// u_x = sqrt(2 * occupation_x), the magnitude scale on which occupation = h^2 / 2.
std::vector<double> magnitudes_from_occupation(std::span<const double> occupation);

/// Independent bits open with probability 1 - exp(-beta_e u_x u_y).
EdgeConfig sample_bridges(const Network& net, std::span<const double> magnitude, Rng& rng);

/// Components of V_e = 1{N_e > 0 or bridge_e = 1}.
Clusters cable_clusters(const Network& net, std::span<const std::uint32_t> crossings,
                        std::span<const std::uint8_t> bridges);

/// JSON lines, one loop per line.
void write_ensemble_jsonl(std::ostream& out, const LoopEnsemble& ensemble);

}  // namespace current_lab
