#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmetric/errors.hpp"
#include "qmetric/rng.hpp"
#include "qmetric/spaces.hpp"

#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

using namespace qmetric;

namespace {

FiniteMetricSpace line3() {
    return make_space({"a", "b", "c"}, {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
}

FiniteMetricSpace pair_space(double d) {
    return make_space({"p", "q"}, {{0, d}, {d, 0}});
}

FiniteMetricSpace point_space() { return make_space({"o"}, {{0}}); }

} // namespace

TEST_CASE("metric validation") {
    CHECK_THROWS_AS((void)make_space({"a", "b"}, {{0, 1}, {2, 0}}), DomainError); // asymmetric
    CHECK_THROWS_AS((void)make_space({"a", "b"}, {{0, 0}, {0, 0}}), DomainError); // non-separated
    CHECK_THROWS_AS((void)make_space({"a"}, {{1}}), DomainError);                 // diagonal
    SUBCASE("triangle violations name the triple") {
        try {
            (void)make_space({"a", "b", "c"}, {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}});
            FAIL("expected a triangle violation");
        } catch (const DomainError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("a") != std::string::npos);
            CHECK(msg.find("c") != std::string::npos);
        }
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS((void)make_space({"a", "b"}, {{0, 1}}), ShapeError);
    }
}

TEST_CASE("product metric") {
    const FiniteMetricSpace x = pair_space(1.0);
    const FiniteMetricSpace y = pair_space(2.0);
    const FiniteMetricSpace p = product_1_metric(x, y);
    CHECK(p.size() == 4);
    CHECK(p.diameter() == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(p.d(0, 0) == 0.0);
    SUBCASE("one-point factor gives an isometric copy") {
        const FiniteMetricSpace q = product_1_metric(point_space(), y);
        CHECK(q.size() == y.size());
        CHECK(q.d(0, 1) == doctest::Approx(y.d(0, 1)));
    }
    SUBCASE("product passes metric validation") {
        (void)make_space(p.labels, p.dist); // throws on any violated axiom
    }
}

TEST_CASE("hausdorff distance to subsets") {
    const FiniteMetricSpace l = line3();
    CHECK(hausdorff_subset(l, {0, 1, 2}) == 0.0);
    CHECK(hausdorff_subset(l, {0, 2}) == doctest::Approx(1.0));
    CHECK(hausdorff_subset(pair_space(0.7), {0}) == doctest::Approx(0.7));
    CHECK_THROWS_AS((void)hausdorff_subset(l, {}), DomainError);
}

TEST_CASE("greedy nets") {
    const FiniteMetricSpace l = line3();
    SUBCASE("coarse resolution keeps one point") {
        const auto net = greedy_net(l, 2.5);
        CHECK(net == std::vector<int>{0});
    }
    SUBCASE("resolution 0.4 needs every point") {
        const auto net = greedy_net(l, 0.4);
        CHECK(net.size() == 3);
        // no two-point subset reaches that resolution
        const std::vector<std::vector<int>> pairs{{0, 1}, {0, 2}, {1, 2}};
        for (const auto& s : pairs) CHECK(hausdorff_subset(l, s) > 0.4);
    }
    SUBCASE("tight two-point case") {
        const auto net = greedy_net(pair_space(1.0), 0.99);
        CHECK(net.size() == 2);
    }
    SUBCASE("nets meet their resolution on random spaces") {
        Rng rng(5);
        for (int rep = 0; rep < 10; ++rep) {
            const FiniteMetricSpace x = testgen::random_space(rng, 2 + static_cast<int>(rng.below(5)));
            const double eps = 0.3 + rng.uniform();
            CHECK(hausdorff_subset(x, greedy_net(x, eps)) <= eps);
        }
    }
    CHECK_THROWS_AS((void)greedy_net(l, 0.0), DomainError);
}

TEST_CASE("brute-force matching distance") {
    const FiniteMetricSpace l = line3();
    CHECK(gh_bruteforce(l, l) == 0.0);
    SUBCASE("point against a pair") {
        CHECK(gh_bruteforce(point_space(), pair_space(0.8)) == doctest::Approx(0.4));
        CHECK(gh_bruteforce(pair_space(0.8), point_space()) == doctest::Approx(0.4));
    }
    SUBCASE("two pairs of different widths") {
        CHECK(gh_bruteforce(pair_space(1.0), pair_space(3.0)) == doctest::Approx(1.0));
    }
    SUBCASE("pseudometric axioms on small random spaces") {
        Rng rng(31);
        for (int rep = 0; rep < 6; ++rep) {
            const FiniteMetricSpace a = testgen::random_space(rng, 1 + static_cast<int>(rng.below(3)));
            const FiniteMetricSpace b = testgen::random_space(rng, 1 + static_cast<int>(rng.below(3)));
            const FiniteMetricSpace c = testgen::random_space(rng, 1 + static_cast<int>(rng.below(3)));
            const double ab = gh_bruteforce(a, b);
            CHECK(ab == gh_bruteforce(b, a));
            CHECK(ab <= gh_bruteforce(a, c) + gh_bruteforce(c, b) + 1e-12);
        }
    }
    SUBCASE("domination by the subset hausdorff distance") {
        Rng rng(13);
        for (int rep = 0; rep < 8; ++rep) {
            const FiniteMetricSpace x = testgen::random_space(rng, 4);
            std::vector<int> subset;
            for (int i = 0; i < 4; ++i)
                if (rng.below(2) == 0) subset.push_back(i);
            if (subset.empty()) subset.push_back(0);
            CHECK(gh_bruteforce(x, restrict_space(x, subset)) <=
                  hausdorff_subset(x, subset) + 1e-12);
        }
    }
    SUBCASE("size cap") {
        Rng rng(2);
        const FiniteMetricSpace big = testgen::random_space(rng, 5);
        const FiniteMetricSpace other = testgen::random_space(rng, 4);
        CHECK_THROWS_AS((void)gh_bruteforce(big, other), CapacityError);
    }
}

TEST_CASE("sequence space metric") {
    const BaireSeq a = make_baire_seq({1, 2, 3});
    CHECK(baire_distance(a, a) == 0.0);
    CHECK(baire_distance(a, make_baire_seq({2, 2, 3})) == doctest::Approx(1.0));
    CHECK(baire_distance(a, make_baire_seq({1, 2, 4})) == doctest::Approx(0.25));
    CHECK_THROWS_AS((void)baire_distance(a, make_baire_seq({1, 2})), DomainError);
    CHECK_THROWS_AS((void)make_baire_seq({1, 0, 2}), DomainError);
    CHECK_THROWS_AS((void)make_baire_seq({}), DomainError);
}
