#include "current_lab/samplers.hpp"

#include <cmath>
#include <limits>

#include "current_lab/error.hpp"

namespace current_lab {

AliasTable::AliasTable(std::span<const double> probabilities)
    : threshold_(probabilities.size(), 0.0), alias_(probabilities.size(), 0) {
    const std::size_t n = probabilities.size();
    if (n == 0) throw ContractError("alias table needs at least one atom");
    long double total = 0.0L;
    for (double p : probabilities) {
        if (p < 0.0) throw ContractError("negative probability");
        total += p;
    }
    if (!(total > 0.0L)) throw ContractError("alias table needs positive mass");

    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = static_cast<double>(probabilities[i] * static_cast<long double>(n) / total);
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back();
        small.pop_back();
        const std::size_t l = large.back();
        threshold_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::size_t i : large) {
        threshold_[i] = 1.0;
        alias_[i] = i;
    }
    for (std::size_t i : small) {  // leftovers from rounding
        threshold_[i] = scaled[i] > 0.0 ? 1.0 : 0.0;
        alias_[i] = i;
    }
    // zero-mass atoms must never be returned
    for (std::size_t i = 0; i < n; ++i)
        if (probabilities[i] == 0.0) threshold_[i] = 0.0;
}

std::size_t AliasTable::draw(Rng& rng) const {
    const std::size_t column = std::uniform_int_distribution<std::size_t>(0, threshold_.size() - 1)(rng);
    return uniform01(rng) < threshold_[column] ? column : alias_[column];
}

std::uint32_t sample_magnitude(double beta, std::uint8_t parity, Rng& rng) {
    if (parity == 0) return 0;
    if (parity > 2) throw ContractError("parity class must be 0, 1 or 2");
    if (!(beta > 0.0)) throw ContractError("a nonzero current needs a positive weight");

    // Terms beta^n / n! over n of the requested parity; the tail is cut once
    // it falls below 1e-17 of the running sum past the mode.
    std::vector<double> terms;
    double term = parity == 1 ? beta : beta * beta / 2.0;
    std::uint32_t n = parity;
    double total = 0.0;
    for (int guard = 0; guard < 100000; ++guard) {
        terms.push_back(term);
        total += term;
        if (n > beta && term < 1e-17 * total) break;
        term *= beta * beta / ((n + 1.0) * (n + 2.0));
        n += 2;
    }
    double target = uniform01(rng) * total;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        target -= terms[k];
        if (target < 0.0) return static_cast<std::uint32_t>(parity + 2 * k);
    }
    return static_cast<std::uint32_t>(parity + 2 * (terms.size() - 1));
}

CurrentConfig complete_magnitudes(const Network& net, std::span<const std::uint8_t> parity, Rng& rng) {
    if (parity.size() != net.edge_count()) throw ContractError("parity class length does not match edge count");
    CurrentConfig n(parity.size());
    for (std::size_t e = 0; e < parity.size(); ++e) n[e] = sample_magnitude(net.beta(e), parity[e], rng);
    return n;
}

ParityClass parity_of(std::span<const std::uint32_t> current) {
    ParityClass u(current.size());
    for (std::size_t e = 0; e < current.size(); ++e)
        u[e] = current[e] == 0 ? 0 : (current[e] % 2 == 1 ? 1 : 2);
    return u;
}

EdgeConfig trace_of(std::span<const std::uint32_t> current) {
    EdgeConfig w(current.size());
    for (std::size_t e = 0; e < current.size(); ++e) w[e] = current[e] > 0 ? 1 : 0;
    return w;
}

IsingHeatBath::IsingHeatBath(const Network& net, Rng& rng) : net_(net), spins_(net.vertex_count()) {
    for (auto& s : spins_) s = uniform01(rng) < 0.5 ? 1 : -1;
}

void IsingHeatBath::sweep(Rng& rng) {
    for (std::size_t x = 0; x < spins_.size(); ++x) {
        double field = 0.0;
        for (std::size_t e : net_.incident(x)) {
            const Edge& ed = net_.edge(e);
            if (ed.is_loop()) continue;
            field += net_.beta(e) * spins_[ed.other(x)];
        }
        const double p_up = 1.0 / (1.0 + std::exp(-2.0 * field));
        spins_[x] = uniform01(rng) < p_up ? 1 : -1;
    }
}

EdgeConfig edwards_sokal_edges(const Network& net, std::span<const std::int8_t> spins, Rng& rng) {
    if (spins.size() != net.vertex_count()) throw ContractError("spin configuration length mismatch");
    EdgeConfig w(net.edge_count(), 0);
    for (std::size_t e = 0; e < w.size(); ++e) {
        const Edge& ed = net.edge(e);
        const double u = uniform01(rng);  // always consumed, keeps streams aligned
        if (spins[ed.u] == spins[ed.v] && u < -std::expm1(-2.0 * net.beta(e))) w[e] = 1;
    }
    return w;
}

SpinConfig color_clusters(const Clusters& clusters, Rng& rng) {
    std::vector<std::int8_t> sign_of_root(clusters.root.size(), 1);
    for (std::size_t x = 0; x < clusters.root.size(); ++x)
        if (clusters.root[x] == x) sign_of_root[x] = uniform01(rng) < 0.5 ? 1 : -1;
    SpinConfig s(clusters.root.size());
    for (std::size_t x = 0; x < s.size(); ++x) s[x] = sign_of_root[clusters.root[x]];
    return s;
}

MarkovChainSampler::MarkovChainSampler(const Network& net, ModelKind kind, const ChainParams& params,
                                       const SeedSpec& seed)
    : net_(net),
      kind_(kind),
      rng_(make_rng(seed)),
      chain_(net, rng_),
      burn_in_(params.burn_in(net)),
      thinning_(std::max<std::size_t>(params.thinning(net), 1)) {
    if (kind != ModelKind::Ising && kind != ModelKind::FK)
        throw UnsupportedError("markov-chain sampling is available for Ising and FK only; use exact-table or "
                               "the jump process for currents");
}

Configuration MarkovChainSampler::next() {
    const std::size_t sweeps = started_ ? thinning_ : burn_in_;
    started_ = true;
    for (std::size_t s = 0; s < sweeps; ++s) chain_.sweep(rng_);
    if (kind_ == ModelKind::Ising) return chain_.spins();
    return edwards_sokal_edges(net_, chain_.spins(), rng_);
}

ConfigurationSampler::ConfigurationSampler(const Network& net, ModelKind kind, SamplingMethod method,
                                           ChainParams params)
    : net_(net), kind_(kind), method_(method), params_(params) {
    if (method == SamplingMethod::MarkovChain) {
        if (kind != ModelKind::Ising && kind != ModelKind::FK)
            throw UnsupportedError("markov-chain sampling is available for Ising and FK only; use exact-table or "
                                   "the jump process for currents");
        return;
    }
    table_.emplace(exact_measure(net, kind));
    alias_.emplace(table_->probabilities());
}

const FiniteDistribution& ConfigurationSampler::table() const {
    if (!table_) throw ContractError("markov-chain sampler has no enumerated table");
    return *table_;
}

std::size_t ConfigurationSampler::draw_index(Rng& rng) const {
    if (!alias_) throw ContractError("draw_index requires the exact-table method");
    return alias_->draw(rng);
}

Configuration ConfigurationSampler::draw(Rng& rng) const {
    if (method_ == SamplingMethod::MarkovChain) {
        const SeedSpec chain_seed{rng(), rng()};
        MarkovChainSampler chain(net_, kind_, params_, chain_seed);
        return chain.next();
    }
    const std::size_t index = alias_->draw(rng);
    switch (kind_) {
        case ModelKind::Ising: return spins_from_index(net_.vertex_count(), index);
        case ModelKind::CurrentParity: {
            const auto parity = decode_configuration(table_->space(), index);
            return complete_magnitudes(net_, parity, rng);
        }
        default: return decode_configuration(table_->space(), index);
    }
}

Configuration sample_configuration(const Network& net, ModelKind kind, const SeedSpec& seed,
                                   SamplingMethod method, const ChainParams& params) {
    if (method == SamplingMethod::MarkovChain) {
        MarkovChainSampler chain(net, kind, params, seed);
        return chain.next();
    }
    ConfigurationSampler sampler(net, kind, method, params);
    Rng rng = make_rng(seed);
    return sampler.draw(rng);
}

CoupledSample couple_with_bernoulli(const Network& net, CurrentConfig current, Rng& rng) {
    if (current.size() != net.edge_count()) throw ContractError("current length does not match edge count");
    CoupledSample s;
    s.bernoulli.resize(current.size());
    s.superposed.resize(current.size());
    for (std::size_t e = 0; e < current.size(); ++e) {
        s.bernoulli[e] = uniform01(rng) < -std::expm1(-net.beta(e)) ? 1 : 0;
        s.superposed[e] = (current[e] > 0 || s.bernoulli[e]) ? 1 : 0;
    }
    s.current = std::move(current);
    return s;
}

CoupledFkSampler::CoupledFkSampler(const Network& net)
    : net_(net), parity_(net, ModelKind::CurrentParity, SamplingMethod::ExactTable) {}

CoupledSample CoupledFkSampler::draw(Rng& rng) const {
    auto current = std::get<CurrentConfig>(parity_.draw(rng));
    return couple_with_bernoulli(net_, std::move(current), rng);
}

CoupledSample coupled_fk_sample(const Network& net, const SeedSpec& seed) {
    CoupledFkSampler sampler(net);
    Rng rng = make_rng(seed);
    return sampler.draw(rng);
}

std::vector<std::uint64_t> histogram(const Space& space, std::span<const std::vector<std::uint8_t>> samples) {
    std::vector<std::uint64_t> counts(space.size(), 0);
    for (const auto& s : samples) ++counts[encode_configuration(space, s)];
    return counts;
}

MultinomialReport empirical_compare(std::span<const std::vector<std::uint8_t>> samples,
                                    const FiniteDistribution& reference, double sigma_level) {
    if (samples.size() < 100) throw ContractError("empirical_compare needs at least 100 samples");
    const auto counts = histogram(reference.space(), samples);
    return multinomial_test(counts, reference.probabilities(), sigma_level);
}

MultinomialReport empirical_compare(std::span<const std::uint64_t> counts, const FiniteDistribution& reference,
                                    double sigma_level, std::size_t comparisons) {
    if (counts.size() != reference.size()) throw ContractError("histogram does not match the reference space");
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    if (n < 100) throw ContractError("empirical_compare needs at least 100 samples");
    return multinomial_test(counts, reference.probabilities(), sigma_level, comparisons);
}

}  // namespace current_lab
