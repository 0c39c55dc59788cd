#include <doctest.h>

#include <algorithm>
#include <random>

#include "battery.hpp"
#include "current_lab/error.hpp"
#include "current_lab/network.hpp"
#include "oracles.hpp"

using namespace current_lab;

TEST_SUITE("graph-core") {
    TEST_CASE("valid networks build") {
        const Network edge = build_network({2, {{0, 1}}, {1.0}, std::nullopt});
        CHECK(edge.vertex_count() == 2);
        CHECK(edge.edge_count() == 1);
        const Network tri = build_network({3, {{0, 1}, {1, 2}, {2, 0}}, {0.5, 0.5, 0.5}, std::nullopt});
        CHECK(tri.edge_count() == 3);
        CHECK(tri.incident(1).size() == 2);
    }

    TEST_CASE("disconnected network is rejected with the component") {
        try {
            build_network({2, {}, {}, std::nullopt});
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("disconnected") != std::string::npos);
        }
        CHECK_THROWS_AS(build_network({4, {{0, 1}, {2, 3}}, {1.0, 1.0}, std::nullopt}), ValidationError);
    }

    TEST_CASE("negative weight names the edge") {
        try {
            build_network({3, {{0, 1}, {1, 2}}, {1.0, -0.5}, std::nullopt});
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("1") != std::string::npos);
        }
    }

    TEST_CASE("bad vertex ids and pinning are rejected") {
        CHECK_THROWS_AS(build_network({2, {{0, 2}}, {1.0}, std::nullopt}), ValidationError);
        CHECK_THROWS_AS(build_network({2, {{0, 1}}, {1.0, 2.0}, std::nullopt}), ValidationError);
        CHECK_THROWS_AS(build_network({2, {{0, 1}}, {1.0}, Pinning{5, 1.0}}), ValidationError);
        CHECK_THROWS_AS(build_network({2, {{0, 1}}, {1.0}, Pinning{0, -1.0}}), ValidationError);
    }

    TEST_CASE("self-loops and parallel edges are positional") {
        const Network net(2, {{0, 1}, {0, 1}, {1, 1}}, {0.2, 0.3, 0.4});
        CHECK(net.edge(2).is_loop());
        CHECK(net.incident(1).size() == 3);
        CHECK(net.incident(0).size() == 2);
    }

    TEST_CASE("components on the triangle") {
        const Network tri = battery::triangle(0.5);
        CHECK(components(tri, EdgeConfig{1, 1, 1}).count == 1);
        CHECK(components(tri, EdgeConfig{0, 0, 0}).count == 3);
        const Clusters one = components(tri, EdgeConfig{0, 1, 0});
        CHECK(one.count == 2);
        CHECK(one.same(1, 2));
        CHECK(one.root[2] == 1);
        CHECK_THROWS_AS(components(tri, EdgeConfig{1, 1}), ContractError);
    }

    TEST_CASE("cyclomatic numbers") {
        CHECK(cyclomatic_number(battery::triangle(1.0), EdgeConfig{1, 1, 1}) == 1);
        CHECK(cyclomatic_number(battery::triangle(1.0), EdgeConfig{1, 1, 0}) == 0);
        const Network square(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {1, 1, 1, 1});
        CHECK(cyclomatic_number(square, EdgeConfig{1, 1, 1, 1}) == 1);
        const Network loop(1, {{0, 0}}, {1.0});
        CHECK(cyclomatic_number(loop, EdgeConfig{1}) == 1);
    }

    TEST_CASE("parity checks") {
        const Network edge = battery::single_edge(1.0);
        CHECK_FALSE(incidence_parity_check(edge, CurrentConfig{1}));
        CHECK(incidence_parity_check(edge, CurrentConfig{2}));
        CHECK(incidence_parity_check(battery::triangle(1.0), SignedEdgeConfig{-1, -1, -1}));
        CHECK_FALSE(incidence_parity_check(battery::triangle(1.0), SignedEdgeConfig{-1, 1, 1}));
        CHECK_THROWS_AS(incidence_parity_check(edge, SignedEdgeConfig{2}), ContractError);
        const Network loop(2, {{0, 1}, {1, 1}}, {1.0, 1.0});
        CHECK(incidence_parity_check(loop, CurrentConfig{0, 3}));
    }

    TEST_CASE("components ignore edge order") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Edge> edges;
            const std::size_t n = 6;
            for (std::size_t x = 1; x < n; ++x) edges.push_back({rng() % x, x});
            for (int k = 0; k < 4; ++k) edges.push_back({rng() % n, rng() % n});
            EdgeConfig open(edges.size());
            for (auto& b : open) b = rng() % 2;
            const Network a(n, edges, std::vector<double>(edges.size(), 1.0));
            std::vector<std::size_t> perm(edges.size());
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<Edge> shuffled;
            EdgeConfig open2;
            for (std::size_t p : perm) shuffled.push_back(edges[p]), open2.push_back(open[p]);
            const Network b(n, shuffled, std::vector<double>(edges.size(), 1.0));
            CHECK(components(a, open).root == components(b, open2).root);
            std::vector<int> keep(open.begin(), open.end());
            CHECK(components(a, open).count == oracle::count_components(a, keep));
        }
    }

    TEST_CASE("adding an open edge raises the cyclomatic number by 0 or 1") {
        const Network diamond(4, {{0, 1}, {1, 2}, {2, 0}, {1, 3}, {3, 2}}, {1, 1, 1, 1, 1});
        for (std::size_t i = 0; i < 32; ++i) {
            EdgeConfig open(5);
            for (std::size_t e = 0; e < 5; ++e) open[e] = (i >> e) & 1u;
            for (std::size_t e = 0; e < 5; ++e) {
                if (open[e]) continue;
                EdgeConfig more = open;
                more[e] = 1;
                const auto d = cyclomatic_number(diamond, more) - cyclomatic_number(diamond, open);
                CHECK((d == 0 || d == 1));
            }
        }
    }

    TEST_CASE("parity is unchanged by adding 2") {
        const Network tri = battery::triangle(1.0);
        for (std::uint32_t a = 0; a < 4; ++a)
            for (std::uint32_t b = 0; b < 4; ++b)
                for (std::uint32_t c = 0; c < 4; ++c) {
                    const CurrentConfig n{a, b, c};
                    CHECK(incidence_parity_check(tri, n) == incidence_parity_check(tri, CurrentConfig{a + 2, b, c}));
                }
    }

    TEST_CASE("cluster partitions are validated") {
        Clusters ok{{0, 0, 2}, 2};
        CHECK_NOTHROW(validate_clusters(ok, 3));
        CHECK_THROWS_AS(validate_clusters(Clusters{{0, 0}, 2}, 3), ContractError);
        CHECK_THROWS_AS(validate_clusters(Clusters{{1, 1, 2}, 2}, 3), ContractError);
    }
}
