#include "current_lab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "current_lab/error.hpp"

namespace current_lab {

namespace {

// z-score of the pooled low-mass cell. With a large enough expected count
// the normal approximation is used; otherwise the upper Poisson tail is
// mapped to a z value (a sparse cell cannot be significantly low).
double sparse_cell_z(std::uint64_t observed, double expected, double n) {
    if (expected <= 0.0) return observed > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    const double obs = static_cast<double>(observed);
    if (expected >= min_expected_count) {
        const double p = expected / n;
        return (obs - expected) / std::sqrt(expected * (1.0 - p));
    }
    if (observed == 0) return 0.0;
    const boost::math::poisson_distribution<double> poisson(expected);
    const double tail = boost::math::cdf(boost::math::complement(poisson, obs - 1.0));
    if (tail >= 0.5) return 0.0;
    if (tail <= 0.0) return std::numeric_limits<double>::infinity();
    return boost::math::quantile(boost::math::complement(boost::math::normal(), tail));
}

}  // namespace

double bonferroni_threshold(double sigma_level, std::size_t comparisons) {
    if (!(sigma_level > 0.0)) throw ContractError("sigma level must be positive");
    const std::size_t m = std::max<std::size_t>(comparisons, 1);
    const double alpha = std::erfc(sigma_level / std::sqrt(2.0)) / static_cast<double>(m);
    const boost::math::normal standard;
    return boost::math::quantile(boost::math::complement(standard, alpha / 2.0));
}

void MultinomialReport::apply_threshold(double t) {
    threshold = t;
    worst_z = 0.0;
    worst_atom = 0;
    for (std::size_t c = 0; c < z.size(); ++c) {
        if (std::fabs(z[c]) > std::fabs(worst_z)) {
            worst_z = z[c];
            worst_atom = cell_atoms[c];
        }
    }
    pass = std::fabs(worst_z) <= t &&
           std::none_of(z.begin(), z.end(), [](double v) { return std::isnan(v); });
}

MultinomialReport multinomial_test(std::span<const std::uint64_t> counts,
                                   std::span<const double> probabilities, double sigma_level,
                                   std::size_t comparisons) {
    if (counts.size() != probabilities.size())
        throw ContractError("counts and reference probabilities differ in length");
    MultinomialReport r;
    for (std::uint64_t c : counts) r.samples += c;
    if (r.samples == 0) throw ContractError("no samples");
    const double n = static_cast<double>(r.samples);

    double tv = 0.0;
    std::uint64_t pooled_count = 0;
    double pooled_p = 0.0;
    bool pooled = false;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double p = probabilities[i];
        const double observed = static_cast<double>(counts[i]);
        tv += std::fabs(observed / n - p);
        if (n * p < min_expected_count) {
            pooled = true;
            pooled_count += counts[i];
            pooled_p += p;
            continue;
        }
        if (p >= 1.0)
            r.z.push_back(observed == n ? 0.0 : -std::numeric_limits<double>::infinity());
        else
            r.z.push_back((observed - n * p) / std::sqrt(n * p * (1.0 - p)));
        r.cell_atoms.push_back(i);
    }
    if (pooled) {
        r.z.push_back(sparse_cell_z(pooled_count, n * pooled_p, n));
        r.cell_atoms.push_back(std::numeric_limits<std::size_t>::max());
    }
    r.empirical_tv = tv / 2.0;
    r.apply_threshold(bonferroni_threshold(sigma_level, comparisons == 0 ? r.z.size() : comparisons));
    return r;
}

MultinomialReport two_sample_test(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                  double sigma_level, std::size_t comparisons) {
    if (a.size() != b.size()) throw ContractError("histograms differ in length");
    MultinomialReport r;
    std::uint64_t na = 0, nb = 0;
    for (std::uint64_t c : a) na += c;
    for (std::uint64_t c : b) nb += c;
    if (na == 0 || nb == 0) throw ContractError("no samples");
    r.samples = na + nb;
    double tv = 0.0;
    std::uint64_t rare_a = 0, rare_b = 0;
    bool pooled = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double pa = static_cast<double>(a[i]) / static_cast<double>(na);
        const double pb = static_cast<double>(b[i]) / static_cast<double>(nb);
        tv += std::fabs(pa - pb);
        if (a[i] + b[i] < 2 * static_cast<std::uint64_t>(min_expected_count)) {
            pooled = true;
            rare_a += a[i];
            rare_b += b[i];
            continue;
        }
        const double p = static_cast<double>(a[i] + b[i]) / static_cast<double>(na + nb);
        const double se = std::sqrt(p * (1.0 - p) * (1.0 / static_cast<double>(na) + 1.0 / static_cast<double>(nb)));
        r.z.push_back(se > 0.0 ? (pa - pb) / se : 0.0);
        r.cell_atoms.push_back(i);
    }
    if (pooled && rare_a + rare_b > 0) {
        const double pa = static_cast<double>(rare_a) / static_cast<double>(na);
        const double pb = static_cast<double>(rare_b) / static_cast<double>(nb);
        const double p = static_cast<double>(rare_a + rare_b) / static_cast<double>(na + nb);
        const double se = std::sqrt(p * (1.0 - p) * (1.0 / static_cast<double>(na) + 1.0 / static_cast<double>(nb)));
        // too few events for a normal approximation unless the cell is well populated
        const double z = se > 0.0 ? (pa - pb) / se : 0.0;
        r.z.push_back(rare_a + rare_b >= 2 * static_cast<std::uint64_t>(min_expected_count) ? z : 0.0);
        r.cell_atoms.push_back(std::numeric_limits<std::size_t>::max());
    }
    r.empirical_tv = tv / 2.0;
    r.apply_threshold(bonferroni_threshold(sigma_level, comparisons == 0 ? r.z.size() : comparisons));
    return r;
}

}  // namespace current_lab
