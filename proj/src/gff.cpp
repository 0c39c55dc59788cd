#include "current_lab/gff.hpp"

#include <cmath>

#include "current_lab/error.hpp"
#include "current_lab/samplers.hpp"

namespace current_lab {

Eigen::MatrixXd precision_matrix(const Network& net) {
    const auto n = static_cast<Eigen::Index>(net.vertex_count());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        const Edge& ed = net.edge(e);
        if (ed.is_loop()) continue;
        const auto u = static_cast<Eigen::Index>(ed.u);
        const auto v = static_cast<Eigen::Index>(ed.v);
        const double b = net.beta(e);
        L(u, u) += b;
        L(v, v) += b;
        L(u, v) -= b;
        L(v, u) -= b;
    }
    if (net.pinning()) {
        const auto x0 = static_cast<Eigen::Index>(net.pinning()->vertex);
        L(x0, x0) += net.pinning()->conductance;
    }
    return L;
}

namespace {

Eigen::MatrixXd pinned_cholesky_upper(const Network& net) {
    if (!net.pinning() || !(net.pinning()->conductance > 0.0))
        throw ContractError(
            "field defined only up to additive constant: a pinning with positive conductance is required");
    const Eigen::LLT<Eigen::MatrixXd> llt(precision_matrix(net));
    if (llt.info() != Eigen::Success)
        throw NumericalError("pinned Laplacian is not positive definite (are some weights zero?)");
    return llt.matrixU();
}

}  // namespace

Eigen::MatrixXd green_matrix(const Network& net) {
    const Eigen::MatrixXd U = pinned_cholesky_upper(net);
    const auto n = U.rows();
    const Eigen::MatrixXd Uinv =
        U.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd G = Uinv * Uinv.transpose();
    return (G + G.transpose()) / 2.0;
}

FieldSample FieldSample::from_values(std::vector<double> h) {
    FieldSample f;
    f.magnitude.resize(h.size());
    f.sign.resize(h.size());
    for (std::size_t x = 0; x < h.size(); ++x) {
        f.magnitude[x] = std::fabs(h[x]);
        f.sign[x] = h[x] < 0.0 ? -1 : 1;
    }
    f.h = std::move(h);
    return f;
}

GffSampler::GffSampler(const Network& net) : upper_(pinned_cholesky_upper(net)), green_(green_matrix(net)) {}

FieldSample GffSampler::draw(Rng& rng) const {
    const auto n = upper_.rows();
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
    // Cov(U^{-1} z) = (U^T U)^{-1} = L^{-1}
    const Eigen::VectorXd h = upper_.triangularView<Eigen::Upper>().solve(z);
    return FieldSample::from_values(std::vector<double>(h.data(), h.data() + n));
}

FieldSample sample_field(const Network& net, const SeedSpec& seed) {
    GffSampler sampler(net);
    Rng rng = make_rng(seed);
    return sampler.draw(rng);
}

Network conditional_sign_weights(const Network& net, std::span<const double> magnitude) {
    if (magnitude.size() != net.vertex_count())
        throw ContractError("magnitude field length does not match vertex count");
    for (double u : magnitude)
        if (!(u >= 0.0) || !std::isfinite(u)) throw ContractError("magnitudes must be finite and nonnegative");
    std::vector<double> beta(net.edge_count());
    for (std::size_t e = 0; e < beta.size(); ++e) {
        const Edge& ed = net.edge(e);
        beta[e] = net.beta(e) * magnitude[ed.u] * magnitude[ed.v];
    }
    return net.with_weights(std::move(beta)).with_pinning(std::nullopt);
}

FieldSample reconstruct_field(std::span<const double> magnitude, const Clusters& clusters, Rng& rng) {
    validate_clusters(clusters, magnitude.size());
    for (double u : magnitude)
        if (!(u >= 0.0)) throw ContractError("magnitudes must be nonnegative");
    const SpinConfig signs = color_clusters(clusters, rng);
    FieldSample f;
    f.h.resize(magnitude.size());
    f.magnitude.assign(magnitude.begin(), magnitude.end());
    f.sign.assign(signs.begin(), signs.end());
    for (std::size_t x = 0; x < magnitude.size(); ++x) f.h[x] = signs[x] * magnitude[x];
    return f;
}

FieldSample reconstruct_field(std::span<const double> magnitude, const Clusters& clusters, const SeedSpec& seed) {
    Rng rng = make_rng(seed);
    return reconstruct_field(magnitude, clusters, rng);
}

}  // namespace current_lab
