#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "battery.hpp"
#include "current_lab/error.hpp"
#include "current_lab/exact.hpp"
#include "oracles.hpp"

using namespace current_lab;

namespace {

std::vector<double> probs(const FiniteDistribution& d) { return d.probabilities(); }

}  // namespace

TEST_SUITE("exact-engine") {
    TEST_CASE("single edge closed forms") {
        const Network net = battery::single_edge(1.0);
        const auto ising = exact_measure(net, ModelKind::Ising);
        const double e = std::exp(1.0);
        CHECK(ising.probability(0) == doctest::Approx(e / (2 * e + 2 / e)).epsilon(1e-14));
        CHECK(ising.probability(3) == doctest::Approx(e / (2 * e + 2 / e)).epsilon(1e-14));
        const auto fk = exact_measure(net, ModelKind::FK);
        CHECK(fk.probability(1) == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
        const auto trace = exact_measure(net, ModelKind::CurrentTrace);
        CHECK(trace.probability(0) == doctest::Approx(1.0 / std::cosh(1.0)).epsilon(1e-14));
        CHECK(trace.probability(0) == doctest::Approx(0.648054).epsilon(1e-6));
        const auto bern = exact_measure(net, ModelKind::Bernoulli);
        CHECK(bern.probability(1) == doctest::Approx(0.632121).epsilon(1e-6));
        CHECK(tv_distance(trace, fk) == doctest::Approx(0.409648).epsilon(1e-5));
    }

    TEST_CASE("zero couplings give degenerate laws") {
        const Network net(3, {{0, 1}, {1, 2}}, {0.0, 0.0});
        for (auto kind : {ModelKind::FK, ModelKind::CurrentTrace, ModelKind::Bernoulli, ModelKind::CurrentParity})
            CHECK(exact_measure(net, kind).probability(0) == 1.0);
        const auto ising = exact_measure(net, ModelKind::Ising);
        for (double p : ising.probabilities()) CHECK(p == doctest::Approx(0.125));
        const auto z = partition_functions(net);
        CHECK(z.ising == 8.0);
        CHECK(z.current == 1.0);
    }

    TEST_CASE("tables agree with brute-force oracles on the battery") {
        for (const auto& c : battery::standard()) {
            CAPTURE(c.name);
            CHECK(oracle::tv(probs(exact_measure(c.net, ModelKind::Ising)),
                             oracle::normalize(oracle::ising_weights(c.net))) < 1e-13);
            CHECK(oracle::tv(probs(exact_measure(c.net, ModelKind::FK)),
                             oracle::normalize(oracle::fk_weights(c.net))) < 1e-13);
            CHECK(oracle::tv(probs(exact_measure(c.net, ModelKind::CurrentTrace)),
                             oracle::normalize(oracle::current_trace_weights(c.net))) < 1e-13);
            const auto parity = exact_measure(c.net, ModelKind::CurrentParity);
            CHECK(parity.z() == doctest::Approx(oracle::current_partition_truncated(c.net, 22)).epsilon(1e-12));
        }
    }

    TEST_CASE("partition functions") {
        for (double b : {0.3, 1.0, 2.0}) {
            const auto z = partition_functions(battery::single_edge(b));
            CHECK(z.ising == doctest::Approx(4 * std::cosh(b)).epsilon(1e-14));
            CHECK(z.current == doctest::Approx(std::cosh(b)).epsilon(1e-14));
        }
        const auto z = partition_functions(battery::triangle(0.5));
        CHECK(std::fabs(z.ising - 8.0 * z.current) / z.ising < 1e-12);
        const auto w = oracle::ising_weights(battery::triangle(0.5));
        CHECK(z.ising == doctest::Approx(std::accumulate(w.begin(), w.end(), 0.0)).epsilon(1e-13));
    }

    TEST_CASE("two-point functions") {
        const Network tri = battery::triangle(0.5);
        CHECK(two_point_exact(tri, 1, 1) == 1.0);
        CHECK(two_point_exact(battery::single_edge(1.0), 0, 1) == doctest::Approx(0.761594).epsilon(1e-6));
        const double t = std::tanh(0.5);
        CHECK(two_point_exact(tri, 0, 1) == doctest::Approx((t + t * t) / (1 + t * t * t)).epsilon(1e-13));
        CHECK(two_point_exact(tri, 0, 1) == doctest::Approx(0.614978).epsilon(1e-6));
        CHECK_THROWS_AS(two_point_exact(tri, 0, 3), ContractError);
        const auto corr = correlations_with(tri, 2);
        CHECK(corr[2] == 1.0);
        CHECK(corr[0] == doctest::Approx(oracle::two_point(tri, 2, 0)).epsilon(1e-13));
    }

    TEST_CASE("two-point functions are monotone in every coupling") {
        for (const auto& c : battery::standard()) {
            const std::size_t n = c.net.vertex_count();
            for (std::size_t e = 0; e < c.net.edge_count(); ++e) {
                auto beta = c.net.beta();
                beta[e] += 0.01;
                const Network up = c.net.with_weights(beta);
                for (std::size_t x = 0; x < n; ++x)
                    for (std::size_t y = 0; y < n; ++y)
                        CHECK(two_point_exact(up, x, y) >= two_point_exact(c.net, x, y) - 1e-15);
            }
        }
    }

    TEST_CASE("superposition") {
        const std::vector<double> p{0.2, 0.7};
        const auto zero = FiniteDistribution::point_mass(Space{SpaceKind::Edge, 2}, 0);
        CHECK(tv_distance(superpose_max(zero, FiniteDistribution::bernoulli(p)), FiniteDistribution::bernoulli(p)) <
              1e-15);
        const Network edge = battery::single_edge(1.0);
        const auto sup = superpose_max(exact_measure(edge, ModelKind::CurrentTrace), bernoulli_probabilities(edge));
        CHECK(sup.probability(1) == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));

        // full-table path against the double-sum oracle
        const Network tri = battery::triangle(0.5);
        const auto a = exact_measure(tri, ModelKind::CurrentTrace);
        const auto b = exact_measure(tri, ModelKind::FK);  // not a product law
        CHECK(oracle::tv(probs(superpose_max(a, b)), oracle::superpose(probs(a), probs(b))) < 1e-14);
        CHECK_THROWS_AS(superpose_max(a, exact_measure(edge, ModelKind::FK)), ContractError);
    }

    TEST_CASE("coupling lemma on the battery") {
        for (const auto& c : battery::standard()) {
            CAPTURE(c.name);
            const auto p = bernoulli_probabilities(c.net);
            const auto trace = exact_measure(c.net, ModelKind::CurrentTrace);
            const auto fk = exact_measure(c.net, ModelKind::FK);
            CHECK(tv_distance(superpose_max(trace, FiniteDistribution::bernoulli(p)), fk) <= 1e-12);
            CHECK(oracle::tv(oracle::superpose(probs(trace), oracle::bernoulli_table(p)), probs(fk)) <= 1e-12);
        }
    }

    TEST_CASE("sign counts") {
        CHECK(sign_assignment_count(battery::triangle(1.0), EdgeConfig{1, 1, 1}) == 2);
        CHECK(sign_assignment_count(battery::triangle(1.0), EdgeConfig{1, 1, 0}) == 1);
        const Network square(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {1, 1, 1, 1});
        CHECK(sign_assignment_count(square, EdgeConfig{1, 1, 1, 1}) == 2);
        const Network diamond(4, {{0, 1}, {1, 2}, {2, 0}, {1, 3}, {3, 2}}, {1, 1, 1, 1, 1});
        CHECK(sign_assignment_count(diamond, EdgeConfig{1, 1, 1, 1, 1}) == 4);
        CHECK(sign_assignment_count(diamond, EdgeConfig{1, 1, 1, 1, 1}) ==
              oracle::sign_count_brute(diamond, {1, 1, 1, 1, 1}));
    }

    TEST_CASE("cluster coloring") {
        const Network free(3, {{0, 1}, {1, 2}}, {0.0, 0.0});
        const auto uniform = color_clusters_exact(free);
        for (double p : uniform.probabilities()) CHECK(p == doctest::Approx(0.125));
        const auto col = color_clusters_exact(battery::single_edge(1.0));
        const double e = std::exp(1.0);
        CHECK(col.probability(0) == doctest::Approx(e / (2 * e + 2 / e)).epsilon(1e-14));
        CHECK(col.probability(0) == doctest::Approx(0.440399).epsilon(1e-5));
        for (const auto& c : battery::standard())
            CHECK(tv_distance(color_clusters_exact(c.net), exact_measure(c.net, ModelKind::Ising)) <= 1e-12);
    }

    TEST_CASE("trace reconstruction") {
        const Network edge = battery::single_edge(1.0);
        const auto q = reconstruct_trace_law(exact_measure(edge, ModelKind::FK), bernoulli_probabilities(edge));
        CHECK(q.probability(0) == doctest::Approx(1.0 / std::cosh(1.0)).epsilon(1e-13));
        CHECK(q.probability(0) == doctest::Approx((1 - std::tanh(1.0)) * std::exp(1.0)).epsilon(1e-13));

        const std::vector<double> p{0.3, 0.6, 0.1};
        const auto self = reconstruct_trace_law(FiniteDistribution::bernoulli(p), p);
        CHECK(self.probability(0) == doctest::Approx(1.0).epsilon(1e-14));

        for (const auto& c : battery::standard()) {
            CAPTURE(c.name);
            const auto pp = bernoulli_probabilities(c.net);
            const auto fk = exact_measure(c.net, ModelKind::FK);
            const auto rec = reconstruct_trace_law(fk, pp);
            CHECK(tv_distance(rec, exact_measure(c.net, ModelKind::CurrentTrace)) <= 1e-10);
            CHECK(oracle::tv(probs(rec), oracle::reconstruct_by_induction(probs(fk), pp)) <= 1e-10);
        }
    }

    TEST_CASE("reconstruction rejects inconsistent input") {
        // A law putting mass on 'open' but none on 'closed' cannot be a
        // superposition with a nondegenerate Bernoulli on two edges.
        std::vector<double> w(4, 0.0);
        w[1] = 1.0;
        w[2] = 1.0;
        const FiniteDistribution bad(Space{SpaceKind::Edge, 2}, w);
        CHECK_THROWS_AS(reconstruct_trace_law(bad, std::vector<double>{0.5, 0.5}), NotSuperpositionError);
        CHECK_THROWS_AS(reconstruct_trace_law(FiniteDistribution::bernoulli(std::vector<double>{0.5}),
                                              std::vector<double>{1.0}),
                        NumericalError);
    }

    TEST_CASE("parity-class marginal follows sinh / cosh products") {
        const Network tri = battery::triangle(0.7);
        const auto parity = exact_measure(tri, ModelKind::CurrentParity);
        // P(all three odd) / P(no edge odd) = prod sinh / prod cosh
        double all_odd = 0.0, none_odd = 0.0;
        for (std::size_t i = 0; i < parity.size(); ++i) {
            const auto d = decode_configuration(parity.space(), i);
            const int odd = int(std::count(d.begin(), d.end(), 1));
            if (odd == 3) all_odd += parity.probability(i);
            if (odd == 0) none_odd += parity.probability(i);
        }
        CHECK(all_odd / none_odd == doctest::Approx(std::pow(std::tanh(0.7), 3)).epsilon(1e-12));
    }

    TEST_CASE("capacity limits are hard errors") {
        std::vector<Edge> edges;
        for (std::size_t x = 0; x + 1 < 22; ++x) edges.push_back({x, x + 1});
        const Network path(22, edges, std::vector<double>(21, 0.1));
        CHECK_THROWS_AS(exact_measure(path, ModelKind::Ising), CapacityError);
        CHECK_THROWS_AS(exact_measure(path, ModelKind::FK), CapacityError);
        CHECK_THROWS_AS(exact_measure(path, ModelKind::CurrentParity), CapacityError);
    }

    TEST_CASE("csv dump has a header and omits zero-mass atoms") {
        std::ostringstream out;
        exact_measure(battery::single_edge(1.0), ModelKind::CurrentParity).write_csv(out);
        const std::string s = out.str();
        CHECK(s.find("\"space\"") != std::string::npos);
        CHECK(s.find("configuration,probability,weight") != std::string::npos);
        CHECK(s.find("\n1,") == std::string::npos);
        CHECK(s.find("\n2,") != std::string::npos);
    }

    TEST_CASE("configuration indexing") {
        const Space s{SpaceKind::Parity, 3};
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(encode_configuration(s, decode_configuration(s, i)) == i);
        CHECK(configuration_string(Space{SpaceKind::Edge, 3}, 1) == "001");
        CHECK(spins_from_index(2, 1) == SpinConfig{1, -1});
        CHECK(index_from_spins(SpinConfig{-1, 1}) == 2);
    }
}
