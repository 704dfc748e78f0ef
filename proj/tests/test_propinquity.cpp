#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmetric/errors.hpp"
#include "qmetric/mk.hpp"
#include "qmetric/propinquity.hpp"

#include "generators.hpp"

#include <cmath>
#include <vector>

using namespace qmetric;

namespace {

CxaElement normalized_random(const SpacePtr& space, const ChainPtr& chain, Rng& rng) {
    CxaElement g = random_cxa_element(space, chain, rng);
    const double lip = total_lip(g);
    if (lip > 1.0) g = cxa_scale(Cx(1.0 / lip, 0.0), g);
    return g;
}

} // namespace

TEST_CASE("level bound echoes the resolution sequence") {
    const SpacePtr x = testgen::two_point_space(1.0);
    const ChainPtr chain = testgen::diag_m2_chain(1.0, 0.5, 0.25);
    SUBCASE("fixed values") {
        CHECK(chain_level_bound(*x, *chain, 0).bound == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(chain_level_bound(*x, *chain, 1).bound == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(chain_level_bound(*x, *chain, 2).bound == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(chain_level_bound(*x, *chain, 1).height == 0.0);
    }
    SUBCASE("matches beta and never increases with the level") {
        Rng rng(301);
        for (int rep = 0; rep < 10; ++rep) {
            const ChainPtr c = testgen::random_chain(rng, 3, 3, 3);
            double prev = chain_level_bound(*x, *c, 0).bound;
            for (int n = 0; n <= c->top_level(); ++n) {
                const double b = chain_level_bound(*x, *c, n).bound;
                CHECK(b == c->beta_at(n));
                CHECK(b <= prev + 1e-15);
                prev = b;
            }
        }
    }
    SUBCASE("levels outside the chain are rejected") {
        CHECK_THROWS_AS((void)chain_level_bound(*x, *chain, -1), RangeError);
        CHECK_THROWS_AS((void)chain_level_bound(*x, *chain, 3), RangeError);
    }
}

TEST_CASE("inclusion bridge carries zero height and the level resolution") {
    const ChainPtr chain = testgen::m2_chain(0.8, 0.3);
    const InclusionBridge b = make_inclusion_bridge(chain, 1);
    CHECK(b.height == 0.0);
    CHECK(b.reach == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(b.level == 1);
    CHECK_THROWS_AS((void)make_inclusion_bridge(chain, 2), RangeError);
    CHECK_THROWS_AS((void)make_inclusion_bridge(nullptr, 0), ShapeError);
}

TEST_CASE("reach witness pairs a function with its level expectation") {
    const SpacePtr x = testgen::two_point_space(1.2);
    const ChainPtr chain = testgen::diag_m2_chain(0.9, 0.4, 0.2);
    SUBCASE("the unit is its own partner") {
        const CxaElement one = make_cxa_element(
            x, chain,
            std::vector<AlgebraElement>(2, AlgebraElement::unit(chain->top())));
        const ReachWitness w = reach_witness_check(*x, *chain, 1, one);
        CHECK(w.seminorm_gap == 0.0);
    }
    SUBCASE("functions valued in the level image have zero gap") {
        Rng rng(302);
        for (int rep = 0; rep < 20; ++rep) {
            const int n = static_cast<int>(rng.below(chain->top_level() + 1));
            CxaElement g = normalized_random(x, chain, rng);
            g = ex_conditional_expectation(g, n);
            const ReachWitness w = reach_witness_check(*x, *chain, n, g);
            CHECK(w.seminorm_gap <= 1e-12);
        }
    }
    SUBCASE("normalized functions stay within the level resolution") {
        Rng rng(303);
        for (int rep = 0; rep < 8; ++rep) {
            const ChainPtr c = testgen::random_chain(rng, 3, 3, 3);
            const SpacePtr sp = testgen::random_space_ptr(rng, 2 + static_cast<int>(rng.below(3)));
            for (int n = 0; n <= c->top_level(); ++n) {
                const CxaElement g = normalized_random(sp, c, rng);
                const ReachWitness w = reach_witness_check(*sp, *c, n, g);
                CHECK(w.seminorm_gap <= c->beta_at(n) + 1e-9);
                CHECK(total_lip(w.partner) <= 1.0 + 1e-9);
            }
        }
    }
    SUBCASE("oversized seminorm is rejected") {
        Rng rng(304);
        CxaElement g = random_cxa_element(x, chain, rng);
        while (total_lip(g) < 1e-6) g = random_cxa_element(x, chain, rng);
        g = cxa_scale(Cx(2.0 / total_lip(g), 0.0), g);
        CHECK_THROWS_AS((void)reach_witness_check(*x, *chain, 1, g), DomainError);
    }
    SUBCASE("mismatched space or chain is rejected") {
        const CxaElement one = make_cxa_element(
            x, chain,
            std::vector<AlgebraElement>(2, AlgebraElement::unit(chain->top())));
        const SpacePtr other = testgen::two_point_space(2.0);
        CHECK_THROWS_AS((void)reach_witness_check(*other, *chain, 1, one), ShapeError);
        const ChainPtr other_chain = testgen::m2_chain(1.0, 0.5);
        CHECK_THROWS_AS((void)reach_witness_check(*x, *other_chain, 1, one), ShapeError);
    }
}

TEST_CASE("finite-dimensional approximation bounds") {
    SUBCASE("point against a two-point space") {
        const SpacePtr pt = testgen::one_point_space();
        const SpacePtr pair = testgen::two_point_space(0.4);
        const ChainPtr chain = testgen::scalar_chain(0.1);
        const FdApproxBounds b = fd_approx_bounds(*pt, *pair, *chain);
        CHECK(b.space_gap == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(b.to_commutative == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(b.between_tensors == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("identical spaces leave only the resolution terms") {
        Rng rng(305);
        const FiniteMetricSpace x = testgen::random_space(rng, 3);
        const ChainPtr chain = testgen::m2_chain(0.35, 0.1);
        const FdApproxBounds b = fd_approx_bounds(x, x, *chain);
        CHECK(b.space_gap == 0.0);
        CHECK(b.to_commutative == doctest::Approx(0.35).epsilon(1e-15));
        CHECK(b.between_tensors == doctest::Approx(0.7).epsilon(1e-15));
    }
    SUBCASE("oversized exact comparison points at the net variant") {
        Rng rng(306);
        const FiniteMetricSpace x = testgen::random_space(rng, 5);
        const FiniteMetricSpace y = testgen::random_space(rng, 4);
        const ChainPtr chain = testgen::scalar_chain(0.1);
        CHECK_THROWS_AS((void)fd_approx_bounds(x, y, *chain), CapacityError);
    }
    SUBCASE("net bound tracks the Hausdorff gap") {
        const FiniteMetricSpace x =
            make_space({"a", "b", "c"}, {{0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, {2.0, 1.0, 0.0}});
        const ChainPtr chain = testgen::scalar_chain(0.25);
        const FdApproxBounds single = fd_approx_net(x, {0}, *chain);
        CHECK(single.space_gap == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(single.net_bound == doctest::Approx(2.25).epsilon(1e-15));
        const FdApproxBounds full = fd_approx_net(x, {0, 1, 2}, *chain);
        CHECK(full.space_gap == 0.0);
        CHECK(full.net_bound == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("greedy nets meet their promised bound") {
        Rng rng(307);
        for (int rep = 0; rep < 10; ++rep) {
            const FiniteMetricSpace x = testgen::random_space(rng, 3 + static_cast<int>(rng.below(5)));
            const double eps = 0.3 + rng.uniform();
            const ChainPtr chain = testgen::scalar_chain(0.05);
            const std::vector<int> net = greedy_net(x, eps);
            const FdApproxBounds b = fd_approx_net(x, net, *chain);
            CHECK(b.space_gap <= eps + 1e-12);
            CHECK(b.net_bound <= 0.05 + eps + 1e-12);
        }
    }
}

TEST_CASE("matrix tower construction") {
    SUBCASE("doubling sequence") {
        const UhfTruncation t = uhf_build(make_baire_seq({1, 1, 1}), 3);
        CHECK(t.dims == std::vector<long long>{1, 2, 4, 8});
        REQUIRE(t.chain != nullptr);
        CHECK(t.chain->top_level() == 3);
        for (int n = 0; n <= 3; ++n) {
            CHECK(t.chain->level(n).num_blocks() == 1);
            CHECK(t.chain->level(n).block_sizes[0] == static_cast<int>(t.dims[static_cast<size_t>(n)]));
            CHECK(t.chain->beta_at(n) == doctest::Approx(1.0 / static_cast<double>(t.dims[static_cast<size_t>(n)])).epsilon(1e-15));
        }
        CHECK(t.chain->data().top_trace_weights[0] == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
    }
    SUBCASE("mixed sequence") {
        const UhfTruncation t = uhf_build(make_baire_seq({2, 4}), 2);
        CHECK(t.dims == std::vector<long long>{1, 3, 15});
        CHECK(t.chain->top().block_sizes[0] == 15);
    }
    SUBCASE("level traces are the normalized matrix traces") {
        const UhfTruncation t = uhf_build(make_baire_seq({1, 2}), 2);
        // minimal projection at level n has trace 1/dim(n)
        for (int n = 0; n <= 2; ++n) {
            AlgebraElement p = AlgebraElement::zero(t.chain->level(n));
            p.blocks[0](0, 0) = 1.0;
            const Cx tr = apply_trace(t.chain->level_trace(n), p);
            CHECK(tr.real() == doctest::Approx(1.0 / static_cast<double>(t.dims[static_cast<size_t>(n)])).epsilon(1e-12));
            CHECK(std::abs(tr.imag()) <= 1e-15);
        }
    }
    SUBCASE("depth outside the sequence is rejected") {
        CHECK_THROWS_AS((void)uhf_build(make_baire_seq({1, 1}), 3), RangeError);
        CHECK_THROWS_AS((void)uhf_build(make_baire_seq({1, 1}), -1), RangeError);
    }
    SUBCASE("dimension cap") {
        CHECK_THROWS_AS((void)uhf_build(make_baire_seq({3, 3, 3, 3}), 4), CapacityError);
        const UhfTruncation ok = uhf_build(make_baire_seq({3, 3, 3}), 3);
        CHECK(ok.dims.back() == 64);
    }
    SUBCASE("feasible depth stops below the cap") {
        CHECK(uhf_feasible_depth(make_baire_seq({3, 3, 3, 3})) == 3);
        CHECK(uhf_feasible_depth(make_baire_seq({1, 1, 1, 1, 1, 1, 1, 1})) == 6);
        CHECK(uhf_feasible_depth(make_baire_seq({63})) == 1);
        CHECK(uhf_feasible_depth(make_baire_seq({64})) == 0);
    }
    SUBCASE("tower seminorm keeps the quasi-Leibniz property") {
        Rng rng(308);
        const UhfTruncation t = uhf_build(make_baire_seq({1, 1}), 2);
        const SpacePtr x = testgen::two_point_space(1.0);
        for (int s = 0; s < 20; ++s) {
            const CxaElement f = random_cxa_element(x, t.chain, rng);
            const CxaElement g = random_cxa_element(x, t.chain, rng);
            const double bound =
                2.0 * (total_lip(f) * cxa_sup_norm(g) + total_lip(g) * cxa_sup_norm(f));
            CHECK(total_lip(cxa_jordan(f, g)) <= bound + 1e-9);
            CHECK(total_lip(cxa_lie(f, g)) <= bound + 1e-9);
        }
    }
}

TEST_CASE("tower distance bound follows the sequence metric") {
    const SpacePtr x = testgen::two_point_space(1.0);
    SUBCASE("equal sequences give zero") {
        const BaireSeq a = make_baire_seq({2, 3, 4});
        CHECK(uhf_propinquity_bound(a, a, *x) == 0.0);
    }
    SUBCASE("first disagreement sets the scale") {
        const BaireSeq a = make_baire_seq({2, 3, 4, 5, 6});
        const BaireSeq b = make_baire_seq({2, 3, 4, 7, 6});
        CHECK(uhf_propinquity_bound(a, b, *x) == doctest::Approx(0.25).epsilon(1e-15));
        const BaireSeq c = make_baire_seq({9, 3, 4, 5, 6});
        CHECK(uhf_propinquity_bound(a, c, *x) == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("symmetry and the triangle inequality") {
        Rng rng(309);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<int> ea, eb, ec;
            for (int i = 0; i < 4; ++i) {
                ea.push_back(1 + static_cast<int>(rng.below(3)));
                eb.push_back(1 + static_cast<int>(rng.below(3)));
                ec.push_back(1 + static_cast<int>(rng.below(3)));
            }
            const BaireSeq a = make_baire_seq(ea);
            const BaireSeq b = make_baire_seq(eb);
            const BaireSeq c = make_baire_seq(ec);
            const double ab = uhf_propinquity_bound(a, b, *x);
            const double ba = uhf_propinquity_bound(b, a, *x);
            CHECK(ab == ba);
            CHECK(uhf_propinquity_bound(a, c, *x) <= ab + uhf_propinquity_bound(b, c, *x) + 1e-15);
        }
    }
}

TEST_CASE("towers sharing a prefix have matching seminorms on the shared part") {
    const SpacePtr x = testgen::two_point_space(1.0);
    SUBCASE("identical sequences agree exactly") {
        const BaireSeq a = make_baire_seq({1, 2, 1});
        CHECK(uhf_isometry_check(a, a, x, 3, 10) <= 1e-12);
    }
    SUBCASE("sampled agreement across a genuine split") {
        const BaireSeq a = make_baire_seq({1, 1, 2});
        const BaireSeq b = make_baire_seq({1, 1, 3});
        CHECK(uhf_isometry_check(a, b, x, 2, 50) <= 1e-9);
    }
    SUBCASE("full basis agreement") {
        const BaireSeq a = make_baire_seq({1, 2, 2});
        const BaireSeq b = make_baire_seq({1, 2, 5});
        CHECK(uhf_isometry_check(a, b, x, 2, 0, 1, true) <= 1e-9);
    }
    SUBCASE("bad prefixes and depths are rejected") {
        const BaireSeq a = make_baire_seq({1, 2});
        const BaireSeq b = make_baire_seq({2, 2});
        CHECK_THROWS_AS((void)uhf_isometry_check(a, b, x, 1), DomainError);
        CHECK_THROWS_AS((void)uhf_isometry_check(a, b, x, 3), RangeError);
        CHECK_THROWS_AS((void)uhf_isometry_check(a, a, x, 1, 0), DomainError);
    }
}
