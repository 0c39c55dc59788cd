#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "current_lab/network.hpp"

namespace current_lab {

enum class SpaceKind { Spin, Edge, Parity };

/// Configuration space {0..base-1}^dimension. Spins are encoded as
/// digit 0 -> +1 and digit 1 -> -1.
struct Space {
    SpaceKind kind = SpaceKind::Edge;
    std::size_t dimension = 0;

    std::size_t base() const { return kind == SpaceKind::Parity ? 3 : 2; }
    std::size_t size() const;
    std::string name() const;

    friend bool operator==(const Space&, const Space&) = default;
};

/// Configurations are indexed lexicographically: digit 0 is the most
/// significant, so index order matches string order of the digits.
std::vector<std::uint8_t> decode_configuration(const Space& space, std::size_t index);
std::size_t encode_configuration(const Space& space, std::span<const std::uint8_t> digits);
std::string configuration_string(const Space& space, std::size_t index);

SpinConfig spins_from_index(std::size_t vertex_count, std::size_t index);
std::size_t index_from_spins(std::span<const std::int8_t> spins);

/// Explicit probability table over a finite configuration space.
///
/// `weight` holds the unnormalized weights and `z` their sum, so that
/// probability(i) == weight(i) / z. Product measures additionally carry
/// their per-coordinate marginals, which lets superposition skip the
/// full convolution.
class FiniteDistribution {
public:
    FiniteDistribution(Space space, std::vector<double> weights);
    FiniteDistribution(Space space, std::vector<double> weights, double z);

    /// Product Bernoulli measure on the edge space.
    static FiniteDistribution bernoulli(std::span<const double> p);
    static FiniteDistribution point_mass(Space space, std::size_t index);

    const Space& space() const { return space_; }
    std::size_t size() const { return probability_.size(); }
    double probability(std::size_t index) const { return probability_[index]; }
    double weight(std::size_t index) const { return weight_[index]; }
    const std::vector<double>& probabilities() const { return probability_; }
    const std::vector<double>& weights() const { return weight_; }
    double z() const { return z_; }

    const std::optional<std::vector<double>>& product_marginals() const { return marginals_; }

    /// P(coordinate c takes digit d).
    double marginal(std::size_t coordinate, std::uint8_t digit) const;

    /// CSV dump: a JSON header line, then `configuration,probability,weight`
    /// rows in index order. Zero-mass atoms are omitted.
    void write_csv(std::ostream& out) const;

private:
    Space space_;
    std::vector<double> weight_;
    std::vector<double> probability_;
    double z_ = 0.0;
    std::optional<std::vector<double>> marginals_;
};

/// Half the L1 distance between two tables on the same space.
double tv_distance(const FiniteDistribution& a, const FiniteDistribution& b);

/// Neumaier-compensated summation in extended precision.
class CompensatedSum {
public:
    void add(long double x) {
        const long double t = sum_ + x;
        if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
    }
    long double value() const { return sum_ + carry_; }

private:
    long double sum_ = 0.0L;
    long double carry_ = 0.0L;
};

}  // namespace current_lab
