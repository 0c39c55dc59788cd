#include <doctest.h>

#include <cmath>

#include "battery.hpp"
#include "current_lab/error.hpp"
#include "current_lab/exact.hpp"
#include "current_lab/gff.hpp"
#include "current_lab/stats.hpp"

using namespace current_lab;

TEST_SUITE("gff") {
    TEST_CASE("green matrix closed forms") {
        const auto g1 = green_matrix(battery::one_vertex());
        CHECK(g1(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
        const auto g = green_matrix(battery::single_edge(1.0));
        CHECK(g(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(g(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(g(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(g(1, 1) == doctest::Approx(1.5).epsilon(1e-14));
    }

    TEST_CASE("L G = I on the battery") {
        for (const auto& c : battery::standard()) {
            const auto l = precision_matrix(c.net);
            const auto g = green_matrix(c.net);
            const std::size_t n = c.net.vertex_count();
            CHECK((l * g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
            CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-14);
            // row sums vanish except at the pinned vertex
            for (std::size_t x = 0; x < n; ++x)
                CHECK(l.row(x).sum() == doctest::Approx(x == 0 ? 2.0 : 0.0).epsilon(1e-12));
        }
    }

    TEST_CASE("self-loops do not enter the Laplacian") {
        const Network with_loop(2, {{0, 1}, {1, 1}}, {1.0, 5.0}, Pinning{0, 2.0});
        CHECK((precision_matrix(with_loop) - precision_matrix(battery::single_edge(1.0))).cwiseAbs().maxCoeff() == 0.0);
    }

    TEST_CASE("missing pinning is an error") {
        const Network free(2, {{0, 1}}, {1.0});
        CHECK_THROWS_AS(green_matrix(free), ContractError);
        CHECK_THROWS_AS(green_matrix(free.with_pinning(Pinning{0, 0.0})), ContractError);
    }

    TEST_CASE("sampling determinism and strong pinning") {
        const Network net = battery::triangle(0.5);
        CHECK(sample_field(net, {3, 1}).h == sample_field(net, {3, 1}).h);
        const Network stiff = net.with_pinning(Pinning{0, 1e8});
        const GffSampler s(stiff);
        Rng rng = make_rng({1, 0});
        RunningMoments m;
        for (int i = 0; i < 2000; ++i) m.add(s.draw(rng).h[0]);
        CHECK(m.variance() < 1e-6);
    }

    TEST_CASE("empirical covariance matches the Green function") {
        const Network net = battery::triangle(0.7);
        const GffSampler s(net);
        const auto& g = s.green();
        Rng rng = make_rng({12, 0});
        const int n = 50000;
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
        for (int i = 0; i < n; ++i) {
            const auto f = s.draw(rng);
            for (int x = 0; x < 3; ++x)
                for (int y = 0; y < 3; ++y) acc(x, y) += f.h[x] * f.h[y];
        }
        acc /= n;
        const double t = bonferroni_threshold(3.0, 6);
        for (int x = 0; x < 3; ++x)
            for (int y = x; y < 3; ++y) {
                const double se = std::sqrt((g(x, x) * g(y, y) + g(x, y) * g(x, y)) / n);
                CHECK(std::fabs(acc(x, y) - g(x, y)) / se < t);
            }
    }

    TEST_CASE("field samples decompose into magnitude and sign") {
        const auto f = FieldSample::from_values({-1.5, 0.0, 2.0});
        CHECK(f.magnitude == std::vector<double>{1.5, 0.0, 2.0});
        CHECK(f.sign == std::vector<std::int8_t>{-1, 1, 1});
        for (std::size_t x = 0; x < 3; ++x) CHECK(f.sign[x] * f.magnitude[x] == f.h[x]);
    }

    TEST_CASE("conditional sign weights") {
        const Network net = battery::triangle(0.4);
        const auto same = conditional_sign_weights(net, std::vector<double>{1, 1, 1});
        CHECK(same.beta() == net.beta());
        CHECK_FALSE(same.pinning().has_value());
        const auto six = conditional_sign_weights(battery::single_edge(1.0), std::vector<double>{2, 3});
        CHECK(six.beta(0) == 6.0);
        const auto dead = conditional_sign_weights(net, std::vector<double>{0, 1, 1});
        CHECK(dead.beta(0) == 0.0);
        CHECK(dead.beta(2) == 0.0);
        CHECK(dead.beta(1) == doctest::Approx(0.4));
        CHECK(two_point_exact(dead, 0, 1) == 0.0);
        CHECK_THROWS_AS(conditional_sign_weights(net, std::vector<double>{-1, 1, 1}), ContractError);
    }

    TEST_CASE("reconstruct_field") {
        const std::vector<double> u{1.0, 2.0, 3.0};
        Rng rng = make_rng({1, 0});
        const Clusters all{{0, 0, 0}, 1};
        int plus = 0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const auto f = reconstruct_field(u, all, rng);
            CHECK(f.sign[0] == f.sign[1]);
            CHECK(f.sign[1] == f.sign[2]);
            CHECK(std::fabs(f.h[2]) == 3.0);
            plus += f.sign[0] > 0;
        }
        CHECK(std::fabs(plus - n / 2) < 4 * std::sqrt(n / 4.0));
        const Clusters single{{0, 1, 2}, 3};
        int agree = 0;
        for (int i = 0; i < n; ++i) {
            const auto f = reconstruct_field(u, single, rng);
            agree += f.sign[0] == f.sign[1];
        }
        CHECK(std::fabs(agree - n / 2) < 4 * std::sqrt(n / 4.0));
        CHECK_THROWS_AS(reconstruct_field(u, Clusters{{0, 0}, 1}, rng), ContractError);
        CHECK(reconstruct_field(u, single, SeedSpec{4, 4}).h == reconstruct_field(u, single, SeedSpec{4, 4}).h);
    }
}
