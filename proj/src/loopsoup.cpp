#include "current_lab/loopsoup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "current_lab/error.hpp"

namespace current_lab {

std::size_t LoopSkeleton::period_multiplicity() const {
    const std::size_t n = length();
    for (std::size_t p = 1; p <= n; ++p) {
        if (n % p != 0) continue;
        bool periodic = true;
        for (std::size_t j = 0; j < n && periodic; ++j)
            periodic = vertices[j] == vertices[(j + p) % n] && edges[j] == edges[(j + p) % n];
        if (periodic) return n / p;
    }
    return 1;
}

LoopSkeleton canonical_rotation(const LoopSkeleton& loop) {
    const std::size_t n = loop.length();
    if (loop.edges.size() != n) throw ContractError("loop skeleton needs one edge per vertex visit");
    auto less_rotation = [&](std::size_t a, std::size_t b) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto va = loop.vertices[(a + j) % n], vb = loop.vertices[(b + j) % n];
            if (va != vb) return va < vb;
            const auto ea = loop.edges[(a + j) % n], eb = loop.edges[(b + j) % n];
            if (ea != eb) return ea < eb;
        }
        return false;
    };
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (less_rotation(k, best)) best = k;
    LoopSkeleton out;
    out.vertices.resize(n);
    out.edges.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.vertices[j] = loop.vertices[(best + j) % n];
        out.edges[j] = loop.edges[(best + j) % n];
    }
    return out;
}

namespace {

struct KilledWalk {
    std::vector<double> rate;
    Eigen::MatrixXd transition;
    double spectral_radius = 0.0;
};

KilledWalk killed_walk(const Network& net) {
    const std::size_t n = net.vertex_count();
    KilledWalk w;
    w.rate.assign(n, 0.0);
    Eigen::MatrixXd conductance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        const Edge& ed = net.edge(e);
        if (ed.is_loop()) continue;
        w.rate[ed.u] += net.beta(e);
        w.rate[ed.v] += net.beta(e);
        conductance(static_cast<Eigen::Index>(ed.u), static_cast<Eigen::Index>(ed.v)) += net.beta(e);
        conductance(static_cast<Eigen::Index>(ed.v), static_cast<Eigen::Index>(ed.u)) += net.beta(e);
    }
    if (net.pinning()) w.rate[net.pinning()->vertex] += net.pinning()->conductance;
    for (std::size_t x = 0; x < n; ++x)
        if (!(w.rate[x] > 0.0))
            throw ValidationError("invalid network for the loop soup: vertex " + std::to_string(x) +
                                  " has zero holding rate, so the killed walk has spectral radius >= 1");

    w.transition = conductance;
    Eigen::MatrixXd symmetric = conductance;
    for (Eigen::Index x = 0; x < symmetric.rows(); ++x) {
        for (Eigen::Index y = 0; y < symmetric.cols(); ++y) {
            w.transition(x, y) /= w.rate[static_cast<std::size_t>(x)];
            symmetric(x, y) /= std::sqrt(w.rate[static_cast<std::size_t>(x)] * w.rate[static_cast<std::size_t>(y)]);
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
    w.spectral_radius = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (w.spectral_radius >= 1.0 - 1e-12)
        throw ValidationError("invalid network for the loop soup: killed walk has spectral radius >= 1 "
                              "(a pinning with positive conductance is required)");
    return w;
}

TruncationCertificate certificate_for(const KilledWalk& w, double alpha, std::size_t cutoff) {
    TruncationCertificate c;
    c.spectral_radius = w.spectral_radius;
    const double rho = w.spectral_radius;
    const double n = static_cast<double>(w.rate.size());
    const double L = static_cast<double>(cutoff);
    const double min_rate = *std::min_element(w.rate.begin(), w.rate.end());
    if (rho > 0.0 && alpha > 0.0) {
        c.mass_bound = alpha * n * std::pow(rho, L) / (L * (1.0 - rho));
        c.occupation_bound = alpha * n * std::pow(rho, L + 1.0) / ((1.0 - rho) * min_rate);
    }
    return c;
}

}  // namespace

TruncationCertificate truncation_certificate(const Network& net, double alpha, std::size_t cutoff) {
    if (cutoff == 0) throw ContractError("cutoff must be positive");
    return certificate_for(killed_walk(net), alpha, cutoff);
}

LoopSoupSampler::LoopSoupSampler(const Network& net, double alpha, std::size_t cutoff, double tolerance)
    : net_(net), alpha_(alpha), cutoff_(cutoff) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ContractError("alpha must be finite and nonnegative");
    if (cutoff == 0) throw ContractError("cutoff must be positive");
    KilledWalk w = killed_walk(net);
    certificate_ = certificate_for(w, alpha, cutoff);
    if (certificate_.mass_bound > tolerance) {
        std::ostringstream msg;
        msg << "truncation bound " << certificate_.mass_bound << " exceeds tolerance " << tolerance
            << " at cutoff L = " << cutoff << "; increase the cutoff";
        throw ContractError(msg.str());
    }
    rate_ = std::move(w.rate);
    transition_ = std::move(w.transition);
    powers_.reserve(cutoff + 1);
    powers_.push_back(Eigen::MatrixXd::Identity(transition_.rows(), transition_.cols()));
    for (std::size_t k = 1; k <= cutoff; ++k) powers_.push_back(powers_.back() * transition_);
}

LoopEnsemble LoopSoupSampler::draw(Rng& rng) const {
    const std::size_t n = net_.vertex_count();
    LoopEnsemble ens;
    ens.vertex_count = n;
    ens.edge_count = net_.edge_count();
    ens.truncation_bound = certificate_.mass_bound;
    ens.trivial_occupation.assign(n, 0.0);
    if (alpha_ == 0.0) return ens;

    for (std::size_t x = 0; x < n; ++x)
        ens.trivial_occupation[x] = std::gamma_distribution<double>(alpha_, 1.0 / rate_[x])(rng);

    std::map<LoopSkeleton, Loop> classes;
    LoopSkeleton rooted;
    std::vector<double> holding;
    std::vector<double> cumulative;
    for (std::size_t root = 0; root < n; ++root) {
        const auto r = static_cast<Eigen::Index>(root);
        for (std::size_t len = 2; len <= cutoff_; ++len) {
            const double mean = alpha_ * powers_[len](r, r) / static_cast<double>(len);
            if (!(mean > 0.0)) continue;
            const auto copies = std::poisson_distribution<std::uint64_t>(mean)(rng);
            for (std::uint64_t c = 0; c < copies; ++c) {
                rooted.vertices.assign(len, 0);
                rooted.edges.assign(len, 0);
                holding.assign(len, 0.0);
                std::size_t v = root;
                double step_weight = 1.0;
                for (std::size_t j = 0; j < len; ++j) {
                    // step along e with probability P(v, e) P^{remaining}(y, root) / P^{remaining+1}(v, root)
                    const std::size_t remaining = len - j - 1;
                    const auto incident = net_.incident(v);
                    cumulative.assign(incident.size(), 0.0);
                    double total = 0.0;
                    for (std::size_t k = 0; k < incident.size(); ++k) {
                        const Edge& ed = net_.edge(incident[k]);
                        if (!ed.is_loop()) {
                            const auto y = static_cast<Eigen::Index>(ed.other(v));
                            total += net_.beta(incident[k]) / rate_[v] * powers_[remaining](y, r);
                        }
                        cumulative[k] = total;
                    }
                    const double target = uniform01(rng) * total;
                    std::size_t pick = incident.size();
                    for (std::size_t k = 0; k < incident.size(); ++k) {
                        const double width = cumulative[k] - (k == 0 ? 0.0 : cumulative[k - 1]);
                        if (width <= 0.0) continue;
                        pick = k;
                        if (target < cumulative[k]) break;
                    }
                    if (pick == incident.size()) throw InvariantError("loop bridge has no admissible step");
                    const std::size_t e = incident[pick];
                    rooted.vertices[j] = v;
                    rooted.edges[j] = e;
                    holding[j] = std::exponential_distribution<double>(rate_[v])(rng);
                    step_weight *= net_.beta(e) / rate_[v];
                    v = net_.edge(e).other(v);
                }

                LoopSkeleton canonical = canonical_rotation(rooted);
                // rotate the holding times along with the skeleton
                std::size_t shift = 0;
                for (std::size_t k = 0; k < len; ++k) {
                    bool match = true;
                    for (std::size_t j = 0; j < len && match; ++j)
                        match = rooted.vertices[(k + j) % len] == canonical.vertices[j] &&
                                rooted.edges[(k + j) % len] == canonical.edges[j];
                    if (match) {
                        shift = k;
                        break;
                    }
                }
                Loop& loop = classes[canonical];
                if (loop.multiplicity == 0) {
                    loop.skeleton = canonical;
                    loop.weight = alpha_ * step_weight / static_cast<double>(canonical.period_multiplicity());
                }
                ++loop.multiplicity;
                for (std::size_t j = 0; j < len; ++j) loop.holding_times.push_back(holding[(shift + j) % len]);
            }
        }
    }
    ens.loops.reserve(classes.size());
    for (auto& [key, loop] : classes) ens.loops.push_back(std::move(loop));
    return ens;
}

LoopEnsemble sample_soup(const Network& net, double alpha, std::size_t cutoff, const SeedSpec& seed,
                         double tolerance) {
    LoopSoupSampler sampler(net, alpha, cutoff, tolerance);
    Rng rng = make_rng(seed);
    return sampler.draw(rng);
}

SoupFields fields(const LoopEnsemble& ensemble) {
    SoupFields f;
    f.occupation = ensemble.trivial_occupation;
    f.occupation.resize(ensemble.vertex_count, 0.0);
    f.crossings.assign(ensemble.edge_count, 0);
    for (const Loop& loop : ensemble.loops) {
        const std::size_t len = loop.skeleton.length();
        for (std::size_t j = 0; j < len; ++j)
            f.crossings[loop.skeleton.edges[j]] += static_cast<std::uint32_t>(loop.multiplicity);
        for (std::size_t k = 0; k < loop.holding_times.size(); ++k)
            f.occupation[loop.skeleton.vertices[k % len]] += loop.holding_times[k];
    }
    return f;
}

std::vector<double> magnitudes_from_occupation(std::span<const double> occupation) {
    std::vector<double> u(occupation.size());
    for (std::size_t x = 0; x < u.size(); ++x) {
        if (!(occupation[x] >= 0.0)) throw ContractError("occupation must be nonnegative");
        u[x] = std::sqrt(2.0 * occupation[x]);
    }
    return u;
}

EdgeConfig sample_bridges(const Network& net, std::span<const double> magnitude, Rng& rng) {
    if (magnitude.size() != net.vertex_count()) throw ContractError("magnitude field length mismatch");
    for (double u : magnitude)
        if (!(u >= 0.0)) throw ContractError("magnitudes must be nonnegative");
    EdgeConfig bridges(net.edge_count(), 0);
    for (std::size_t e = 0; e < bridges.size(); ++e) {
        const Edge& ed = net.edge(e);
        const double weight = net.beta(e) * magnitude[ed.u] * magnitude[ed.v];
        bridges[e] = uniform01(rng) < -std::expm1(-weight) ? 1 : 0;
    }
    return bridges;
}

Clusters cable_clusters(const Network& net, std::span<const std::uint32_t> crossings,
                        std::span<const std::uint8_t> bridges) {
    if (crossings.size() != net.edge_count() || bridges.size() != net.edge_count())
        throw ContractError("crossing / bridge fields do not match the edge count");
    EdgeConfig open(net.edge_count());
    for (std::size_t e = 0; e < open.size(); ++e) open[e] = (crossings[e] > 0 || bridges[e]) ? 1 : 0;
    return components(net, open);
}

void write_ensemble_jsonl(std::ostream& out, const LoopEnsemble& ensemble) {
    nlohmann::json header = {{"trivial_occupation", ensemble.trivial_occupation},
                             {"truncation_bound", ensemble.truncation_bound}};
    out << header.dump() << '\n';
    for (const Loop& loop : ensemble.loops) {
        nlohmann::json j = {{"skeleton", loop.skeleton.vertices},
                            {"edges", loop.skeleton.edges},
                            {"multiplicity", loop.multiplicity},
                            {"weight", loop.weight},
                            {"holding_times", loop.holding_times}};
        out << j.dump() << '\n';
    }
}

}  // namespace current_lab
