#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "current_lab/distribution.hpp"
#include "current_lab/exact.hpp"
#include "current_lab/network.hpp"
#include "current_lab/rng.hpp"
#include "current_lab/stats.hpp"

namespace current_lab {

enum class SamplingMethod { ExactTable, MarkovChain };

/// Sweep counts for the single-site chains. Unset fields take the defaults
/// 1000 * |X| (burn-in) and |X| (thinning).
struct ChainParams {
    std::optional<std::size_t> burn_in_sweeps;
    std::optional<std::size_t> thinning_sweeps;

    std::size_t burn_in(const Network& net) const { return burn_in_sweeps.value_or(1000 * net.vertex_count()); }
    std::size_t thinning(const Network& net) const { return thinning_sweeps.value_or(net.vertex_count()); }
};

/// Spin configuration, edge configuration, or full integer current.
using Configuration = std::variant<SpinConfig, EdgeConfig, CurrentConfig>;

/// Walker/Vose alias table: O(1) draws from a fixed discrete law.
class AliasTable {
public:
    explicit AliasTable(std::span<const double> probabilities);
    std::size_t draw(Rng& rng) const;
    std::size_t size() const { return threshold_.size(); }

private:
    std::vector<double> threshold_;
    std::vector<std::size_t> alias_;
};

/// Odd (parity 1) or positive even (parity 2) magnitude with P(n) ~ beta^n / n!.
/// Parity 0 returns 0.
std::uint32_t sample_magnitude(double beta, std::uint8_t parity, Rng& rng);

/// Full current with the given parity classes.
CurrentConfig complete_magnitudes(const Network& net, std::span<const std::uint8_t> parity, Rng& rng);

ParityClass parity_of(std::span<const std::uint32_t> current);
EdgeConfig trace_of(std::span<const std::uint32_t> current);

/// Single-site heat-bath dynamics for the Ising model.
class IsingHeatBath {
public:
    /// Starts from i.i.d. uniform spins.
    IsingHeatBath(const Network& net, Rng& rng);

    void sweep(Rng& rng);
    const SpinConfig& spins() const { return spins_; }

private:
    Network net_;
    SpinConfig spins_;
};

/// Opens each edge whose endpoints agree with probability 1 - exp(-2 beta_e).
EdgeConfig edwards_sokal_edges(const Network& net, std::span<const std::int8_t> spins, Rng& rng);

/// One independent fair sign per cluster, drawn in increasing root order.
SpinConfig color_clusters(const Clusters& clusters, Rng& rng);

/// Thinned draws from one heat-bath chain (Ising spins, or FK edges via
/// Edwards-Sokal from the current spins).
class MarkovChainSampler {
public:
    MarkovChainSampler(const Network& net, ModelKind kind, const ChainParams& params, const SeedSpec& seed);

    Configuration next();
    std::size_t burn_in_sweeps() const { return burn_in_; }
    std::size_t thinning_sweeps() const { return thinning_; }

private:
    Network net_;
    ModelKind kind_;
    Rng rng_;
    IsingHeatBath chain_;
    std::size_t burn_in_;
    std::size_t thinning_;
    bool started_ = false;
};

/// Repeated draws from a model. The exact-table method enumerates the law
/// once; the markov-chain method runs a fresh burned-in chain per draw.
class ConfigurationSampler {
public:
    ConfigurationSampler(const Network& net, ModelKind kind,
                         SamplingMethod method = SamplingMethod::ExactTable, ChainParams params = {});

    Configuration draw(Rng& rng) const;
    /// Index into the enumerated table (exact-table only).
    std::size_t draw_index(Rng& rng) const;

    ModelKind kind() const { return kind_; }
    const FiniteDistribution& table() const;

private:
    Network net_;
    ModelKind kind_;
    SamplingMethod method_;
    ChainParams params_;
    std::optional<FiniteDistribution> table_;
    std::optional<AliasTable> alias_;
};

Configuration sample_configuration(const Network& net, ModelKind kind, const SeedSpec& seed,
                                   SamplingMethod method = SamplingMethod::ExactTable,
                                   const ChainParams& params = {});

/// One draw of the current + Bernoulli coupling.
struct CoupledSample {
    CurrentConfig current;
    EdgeConfig bernoulli;
    EdgeConfig superposed;
};

/// Superposes an externally supplied current with fresh Bernoulli(1 - e^-beta) bits.
CoupledSample couple_with_bernoulli(const Network& net, CurrentConfig current, Rng& rng);

class CoupledFkSampler {
public:
    explicit CoupledFkSampler(const Network& net);
    CoupledSample draw(Rng& rng) const;

private:
    Network net_;
    ConfigurationSampler parity_;
};

CoupledSample coupled_fk_sample(const Network& net, const SeedSpec& seed);

/// Histogram of configurations over reference's space, in index order.
std::vector<std::uint64_t> histogram(const Space& space, std::span<const std::vector<std::uint8_t>> samples);

/// Multinomial 3-sigma comparison of samples (as digit vectors) against an exact law.
MultinomialReport empirical_compare(std::span<const std::vector<std::uint8_t>> samples,
                                    const FiniteDistribution& reference, double sigma_level = 3.0);
MultinomialReport empirical_compare(std::span<const std::uint64_t> counts, const FiniteDistribution& reference,
                                    double sigma_level = 3.0, std::size_t comparisons = 0);

}  // namespace current_lab
