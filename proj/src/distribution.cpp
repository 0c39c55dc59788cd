#include "current_lab/distribution.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "current_lab/error.hpp"

namespace current_lab {

std::size_t Space::size() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < dimension; ++i) {
        if (n > std::numeric_limits<std::size_t>::max() / base())
            throw CapacityError("configuration space too large to index");
        n *= base();
    }
    return n;
}

std::string Space::name() const {
    switch (kind) {
        case SpaceKind::Spin: return "spin";
        case SpaceKind::Edge: return "edge";
        case SpaceKind::Parity: return "parity";
    }
    return "unknown";
}

std::vector<std::uint8_t> decode_configuration(const Space& space, std::size_t index) {
    std::vector<std::uint8_t> digits(space.dimension);
    const std::size_t b = space.base();
    for (std::size_t i = space.dimension; i-- > 0;) {
        digits[i] = static_cast<std::uint8_t>(index % b);
        index /= b;
    }
    return digits;
}

std::size_t encode_configuration(const Space& space, std::span<const std::uint8_t> digits) {
    if (digits.size() != space.dimension)
        throw ContractError("configuration length does not match the space dimension");
    std::size_t index = 0;
    for (std::uint8_t d : digits) {
        if (d >= space.base()) throw ContractError("configuration digit outside the alphabet");
        index = index * space.base() + d;
    }
    return index;
}

std::string configuration_string(const Space& space, std::size_t index) {
    std::string s;
    for (std::uint8_t d : decode_configuration(space, index)) s.push_back(static_cast<char>('0' + d));
    return s;
}

SpinConfig spins_from_index(std::size_t vertex_count, std::size_t index) {
    SpinConfig s(vertex_count);
    for (std::size_t i = vertex_count; i-- > 0;) {
        s[i] = (index & 1u) ? -1 : 1;
        index >>= 1;
    }
    return s;
}

std::size_t index_from_spins(std::span<const std::int8_t> spins) {
    std::size_t index = 0;
    for (std::int8_t s : spins) {
        if (s != 1 && s != -1) throw ContractError("spins must be +1 or -1");
        index = (index << 1) | (s < 0 ? 1u : 0u);
    }
    return index;
}

FiniteDistribution::FiniteDistribution(Space space, std::vector<double> weights)
    : space_(space), weight_(std::move(weights)) {
    CompensatedSum total;
    for (double w : weight_) total.add(w);
    z_ = static_cast<double>(total.value());
    if (weight_.size() != space_.size())
        throw ContractError("weight table does not cover the configuration space");
    if (!(z_ > 0.0)) throw NumericalError("distribution has no positive mass");
    probability_.resize(weight_.size());
    for (std::size_t i = 0; i < weight_.size(); ++i) {
        if (weight_[i] < 0.0) throw ContractError("negative weight in distribution table");
        probability_[i] = static_cast<double>(static_cast<long double>(weight_[i]) / total.value());
    }
}

FiniteDistribution::FiniteDistribution(Space space, std::vector<double> weights, double z)
    : FiniteDistribution(space, std::move(weights)) {
    z_ = z;
}

FiniteDistribution FiniteDistribution::bernoulli(std::span<const double> p) {
    const Space space{SpaceKind::Edge, p.size()};
    const std::size_t n = space.size();
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double w = 1.0L;
        for (std::size_t e = 0; e < p.size(); ++e) {
            const bool open = (i >> (p.size() - 1 - e)) & 1u;
            w *= open ? p[e] : 1.0L - p[e];
        }
        weights[i] = static_cast<double>(w);
    }
    FiniteDistribution d(space, std::move(weights));
    d.marginals_ = std::vector<double>(p.begin(), p.end());
    return d;
}

FiniteDistribution FiniteDistribution::point_mass(Space space, std::size_t index) {
    std::vector<double> weights(space.size(), 0.0);
    weights.at(index) = 1.0;
    return FiniteDistribution(space, std::move(weights));
}

double FiniteDistribution::marginal(std::size_t coordinate, std::uint8_t digit) const {
    if (coordinate >= space_.dimension) throw ContractError("coordinate out of range");
    CompensatedSum s;
    for (std::size_t i = 0; i < size(); ++i)
        if (decode_configuration(space_, i)[coordinate] == digit) s.add(probability_[i]);
    return static_cast<double>(s.value());
}

void FiniteDistribution::write_csv(std::ostream& out) const {
    nlohmann::json header = {{"space", space_.name()},
                             {"dimension", space_.dimension},
                             {"z", z_},
                             {"zero_mass_omitted", true}};
    out << header.dump() << '\n';
    out << "configuration,probability,weight\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < size(); ++i) {
        if (weight_[i] == 0.0) continue;
        out << configuration_string(space_, i) << ',' << probability_[i] << ',' << weight_[i]
            << '\n';
    }
}

double tv_distance(const FiniteDistribution& a, const FiniteDistribution& b) {
    if (!(a.space() == b.space()))
        throw ContractError("tv_distance requires identical configuration spaces");
    CompensatedSum s;
    for (std::size_t i = 0; i < a.size(); ++i)
        s.add(std::fabs(static_cast<long double>(a.probability(i)) - b.probability(i)));
    return static_cast<double>(s.value() / 2.0L);
}

}  // namespace current_lab
