#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace current_lab {

/// Two-sided z threshold for a `sigma_level` test split across
/// `comparisons` simultaneous comparisons (Bonferroni).
double bonferroni_threshold(double sigma_level, std::size_t comparisons);

/// Atoms whose expected count is below this are pooled into one cell.
inline constexpr double min_expected_count = 5.0;

/// Per-atom z-scores of observed counts against reference probabilities.
struct MultinomialReport {
    std::size_t samples = 0;
    double empirical_tv = 0.0;
    /// Cell z-scores; cells are the reference atoms with expected count
    /// >= min_expected_count, plus a trailing pooled cell when needed.
    std::vector<double> z;
    std::vector<std::size_t> cell_atoms;  // atom index per cell, SIZE_MAX for the pooled cell
    std::size_t worst_atom = 0;
    double worst_z = 0.0;
    double threshold = 0.0;
    bool pass = false;

    /// Re-evaluates the verdict against a new threshold.
    void apply_threshold(double t);
};

/// `comparisons` == 0 means Bonferroni over this test's own cells.
MultinomialReport multinomial_test(std::span<const std::uint64_t> counts,
                                   std::span<const double> probabilities, double sigma_level = 3.0,
                                   std::size_t comparisons = 0);

/// Two-sample comparison of histograms on the same atoms, pooled-variance z per atom.
MultinomialReport two_sample_test(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                  double sigma_level = 3.0, std::size_t comparisons = 0);

/// Streaming mean / variance (Welford).
class RunningMoments {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace current_lab
