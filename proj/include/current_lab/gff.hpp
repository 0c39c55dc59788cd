#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "current_lab/network.hpp"
#include "current_lab/rng.hpp"

namespace current_lab {

/// Pinned weighted Laplacian: L_xx = sum of incident weights (+ c at the
/// pinned vertex), L_xy = -sum of weights joining x and y. Self-loops do
/// not enter the quadratic form.
Eigen::MatrixXd precision_matrix(const Network& net);

/// G = L^{-1}, the covariance of the pinned field.
Eigen::MatrixXd green_matrix(const Network& net);

struct FieldSample {
    std::vector<double> h;
    std::vector<double> magnitude;     // |h_x|
    std::vector<std::int8_t> sign;     // sign of h_x, +1 at exactly zero

    static FieldSample from_values(std::vector<double> h);
};

/// Draws centered Gaussian fields with covariance green_matrix(net). The
/// Cholesky factor of L is computed once and shared by all draws.
class GffSampler {
public:
    explicit GffSampler(const Network& net);

    FieldSample draw(Rng& rng) const;
    const Eigen::MatrixXd& green() const { return green_; }

private:
    Eigen::MatrixXd upper_;  // L = U^T U
    Eigen::MatrixXd green_;
};

FieldSample sample_field(const Network& net, const SeedSpec& seed);

/// Weights beta_e * u_x * u_y on the same topology, pinning removed: the
/// conditional law of the signs given the magnitudes u is Ising with these weights.
Network conditional_sign_weights(const Network& net, std::span<const double> magnitude);

/// h_x = sigma_{cluster(x)} * u_x with one independent fair sign per cluster.
FieldSample reconstruct_field(std::span<const double> magnitude, const Clusters& clusters, Rng& rng);
FieldSample reconstruct_field(std::span<const double> magnitude, const Clusters& clusters, const SeedSpec& seed);

}  // namespace current_lab
