#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "battery.hpp"
#include "current_lab/error.hpp"
#include "current_lab/exact.hpp"
#include "current_lab/stats.hpp"
#include "current_lab/vrjp.hpp"

using namespace current_lab;

namespace {
std::vector<std::size_t> identity(std::size_t n) {
    std::vector<std::size_t> o(n);
    std::iota(o.begin(), o.end(), std::size_t{0});
    return o;
}
}  // namespace

TEST_SUITE("vrjp") {
    TEST_CASE("jump rates") {
        const Network edge = battery::single_edge(1.0);
        auto s = VrjpState::initial(edge, {0, 1});
        // at the root the rate is beta <s0 s1> / <s0 s0> = tanh(1)
        CHECK(jump_rate(edge, s, 0) == doctest::Approx(0.761594).epsilon(1e-6));
        s.position = 1;
        CHECK(jump_rate(edge, s, 0) == doctest::Approx(1.0 / std::tanh(1.0)).epsilon(1e-12));
        s.weights = {0.0};
        CHECK(jump_rate(edge, s, 0) == 0.0);
        s.position = 0;
        CHECK(jump_rate(edge, s, 0) == 0.0);
    }

    TEST_CASE("isolated root terminates immediately") {
        const Network single(1, {}, {});
        Rng rng = make_rng({1, 0});
        const auto run = run_vrjp_traced(single, identity(1), rng);
        CHECK(run.events.empty());
        CHECK(run.current.empty());
        const Network zero = battery::single_edge(0.0);
        const auto z = run_vrjp_traced(zero, identity(2), rng);
        CHECK(z.events.empty());
        CHECK(z.current == CurrentConfig{0});
    }

    TEST_CASE("outputs are sourceless and passes zero the root edges") {
        for (const auto& c : battery::standard()) {
            Rng rng = make_rng({2, 0});
            for (int i = 0; i < 50; ++i) {
                const auto run = run_vrjp_traced(c.net, identity(c.net.vertex_count()), rng);
                REQUIRE(incidence_parity_check(c.net, std::span<const std::uint32_t>(run.current)));
                REQUIRE(run.limit_weights.size() == c.net.vertex_count());
                for (std::size_t k = 0; k < run.limit_weights.size(); ++k)
                    for (std::size_t j = 0; j <= k; ++j)
                        for (std::size_t e : c.net.incident(j)) REQUIRE(run.limit_weights[k][e] == 0.0);
                CurrentConfig total(c.net.edge_count(), 0);
                for (const auto& ev : run.events) ++total[ev.edge];
                REQUIRE(total == run.current);
            }
        }
    }

    TEST_CASE("single-edge empty-current probability") {
        // P(N = 0) = 1 / cosh(beta)
        const Network edge = battery::single_edge(1.0);
        Rng rng = make_rng({3, 0});
        const int n = 40000;
        int empty = 0;
        for (int i = 0; i < n; ++i) empty += run_vrjp(edge, identity(2), rng)[0] == 0;
        const double p = 1.0 / std::cosh(1.0);
        CHECK(p == doctest::Approx(0.648054).epsilon(1e-6));
        CHECK(std::fabs(double(empty) / n - p) < 3.5 * std::sqrt(p * (1 - p) / n));
    }

    TEST_CASE("triangle trace law matches the current trace") {
        const Network tri = battery::triangle(0.7);
        const auto law = exact_measure(tri, ModelKind::CurrentTrace);
        Rng rng = make_rng({4, 0});
        std::vector<std::uint64_t> counts(law.size(), 0);
        for (int i = 0; i < 20000; ++i) {
            const auto n = run_vrjp(tri, std::vector<std::size_t>{2, 0, 1}, rng);
            EdgeConfig v(n.size());
            for (std::size_t e = 0; e < n.size(); ++e) v[e] = n[e] > 0;
            ++counts[encode_configuration(law.space(), v)];
        }
        CHECK(multinomial_test(counts, law.probabilities()).pass);
    }

    TEST_CASE("invalid input") {
        const Network tri = battery::triangle(0.5);
        CHECK_THROWS_AS(validate_order(tri, std::vector<std::size_t>{0, 1}), ContractError);
        CHECK_THROWS_AS(validate_order(tri, std::vector<std::size_t>{0, 1, 1}), ContractError);
        CHECK_THROWS_AS(validate_order(tri, std::vector<std::size_t>{0, 1, 3}), ContractError);
        CHECK_THROWS_AS(run_vrjp(tri, std::vector<std::size_t>{0, 0, 1}, SeedSpec{1, 1}), ContractError);
        std::vector<Edge> edges;
        for (std::size_t i = 0; i + 1 < 14; ++i) edges.push_back({i, i + 1});
        const Network long_path(14, edges, std::vector<double>(13, 0.5));
        CHECK_THROWS_AS(run_vrjp(long_path, identity(14), SeedSpec{1, 1}), CapacityError);
        auto s = VrjpState::initial(tri, identity(3));
        CHECK_THROWS_AS(jump_rate(tri, s, 1), ContractError);
    }

    TEST_CASE("determinism and trace dump") {
        const Network tri = battery::triangle(1.0);
        const auto a = run_vrjp(tri, identity(3), SeedSpec{9, 2});
        const auto b = run_vrjp(tri, identity(3), SeedSpec{9, 2});
        CHECK(a == b);
        Rng rng = make_rng({9, 3});
        const auto run = run_vrjp_traced(tri, identity(3), rng);
        std::ostringstream out;
        write_trace_jsonl(out, run);
        CHECK(out.str().find("\"current\"") != std::string::npos);
    }
}
