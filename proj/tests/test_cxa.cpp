#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmetric/cxa.hpp"
#include "qmetric/errors.hpp"
#include "qmetric/mk.hpp"

#include "generators.hpp"

#include <cmath>

using namespace qmetric;

namespace {

CxaElement constant_element(const SpacePtr& space, const ChainPtr& chain,
                            const AlgebraElement& a) {
    return make_cxa_element(space, chain,
                            std::vector<AlgebraElement>(static_cast<size_t>(space->size()), a));
}

AlgebraElement traceless_m2(const ChainPtr& chain) {
    AlgebraElement a = AlgebraElement::zero(chain->top());
    a.blocks[0](0, 0) = 1.0;
    a.blocks[0](1, 1) = -1.0;
    return a;
}

} // namespace

TEST_CASE("slope seminorm") {
    const SpacePtr x = testgen::two_point_space(1.0);
    const ChainPtr scalars = testgen::scalar_chain(1.0);
    SUBCASE("constants vanish") {
        CHECK(slope_seminorm(constant_element(
                  x, scalars, AlgebraElement::scalar(scalars->top(), Cx(3.0, 0.0)))) == 0.0);
    }
    SUBCASE("unit step over unit distance") {
        const CxaElement g = make_cxa_element(
            x, scalars,
            {AlgebraElement::zero(scalars->top()), AlgebraElement::unit(scalars->top())});
        CHECK(slope_seminorm(g) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("matrix step over distance two") {
        const SpacePtr far = testgen::two_point_space(2.0);
        const ChainPtr m2 = testgen::m2_chain(1.0, 0.5);
        AlgebraElement v = AlgebraElement::zero(m2->top());
        v.blocks[0](0, 0) = 4.0;
        v.blocks[0](1, 1) = -4.0;
        const CxaElement g = make_cxa_element(far, m2, {AlgebraElement::zero(m2->top()), v});
        CHECK(slope_seminorm(g) == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("non-self-adjoint input is rejected") {
        AlgebraElement v = AlgebraElement::zero(scalars->top());
        v.blocks[0](0, 0) = Cx(0.0, 1.0);
        const CxaElement g =
            make_cxa_element(x, scalars, {AlgebraElement::zero(scalars->top()), v});
        CHECK_THROWS_AS((void)slope_seminorm(g), DomainError);
    }
}

TEST_CASE("level seminorm") {
    const ChainPtr m2 = testgen::m2_chain(1.0, 0.5);
    const SpacePtr x = testgen::two_point_space(1.0);
    SUBCASE("constant unit vanishes") {
        CHECK(beta_seminorm(constant_element(x, m2, AlgebraElement::unit(m2->top()))) == 0.0);
    }
    SUBCASE("constant traceless diagonal") {
        CHECK(beta_seminorm(constant_element(x, m2, traceless_m2(m2))) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("single point reduces to the chain seminorm") {
        Rng rng(3);
        const SpacePtr pt = testgen::one_point_space();
        for (int rep = 0; rep < 20; ++rep) {
            const AlgebraElement a = random_self_adjoint(m2->top(), rng);
            const CxaElement g = make_cxa_element(pt, m2, {a});
            CHECK(beta_seminorm(g) == doctest::Approx(af_lip_norm(*m2, a)).epsilon(1e-14));
        }
    }
}

TEST_CASE("combined seminorm fixed values") {
    const ChainPtr m2 = testgen::m2_chain(1.0, 0.5);
    const SpacePtr x = testgen::two_point_space(1.0);
    SUBCASE("unit function is in the kernel") {
        CHECK(total_lip(constant_element(x, m2, AlgebraElement::unit(m2->top()))) == 0.0);
    }
    SUBCASE("distance-to-base-point function") {
        const CxaElement g = make_cxa_element(
            x, m2, {AlgebraElement::unit(m2->top()), AlgebraElement::zero(m2->top())});
        CHECK(total_lip(g) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("kernel only contains constant scalars") {
        Rng rng(8);
        for (int rep = 0; rep < 20; ++rep) {
            CxaElement g = random_cxa_element(x, m2, rng);
            // knock out the scalar part to keep it honestly non-scalar
            if (total_lip(g) < 1e-8) continue;
            CHECK(total_lip(g) >= 1e-8);
        }
        // and scalar constants have seminorm zero
        CHECK(total_lip(constant_element(
                  x, m2, AlgebraElement::scalar(m2->top(), Cx(-2.5, 0.0)))) == 0.0);
    }
}

TEST_CASE("two-term seminorm with explicit resolution") {
    const ChainPtr m2 = testgen::m2_chain(0.7, 0.3);
    const SpacePtr x = testgen::two_point_space(1.3);
    Rng rng(21);
    SUBCASE("unit vanishes") {
        CHECK(finite_r_lip(constant_element(x, m2, AlgebraElement::unit(m2->top())), 0, 0.7) ==
              0.0);
    }
    SUBCASE("agrees with the combined seminorm on two-level chains") {
        for (int rep = 0; rep < 20; ++rep) {
            const CxaElement g = random_cxa_element(x, m2, rng);
            CHECK(finite_r_lip(g, 0, 0.7) == doctest::Approx(total_lip(g)).epsilon(1e-14));
        }
    }
    SUBCASE("larger resolution decreases the expectation term") {
        const CxaElement g = random_cxa_element(x, m2, rng);
        CHECK(finite_r_lip(g, 0, 2.0) <= finite_r_lip(g, 0, 1.0) + 1e-15);
    }
    SUBCASE("resolution must be positive") {
        const CxaElement g = random_cxa_element(x, m2, rng);
        CHECK_THROWS_AS((void)finite_r_lip(g, 0, 0.0), DomainError);
    }
}

TEST_CASE("elementary tensors and the product rule") {
    const ChainPtr m2 = testgen::m2_chain(1.0, 0.5);
    const SpacePtr x = testgen::two_point_space(1.0);
    const AlgebraElement a = traceless_m2(m2);
    SUBCASE("tensor construction") {
        const CxaElement t = construct_tensor(x, m2, {0.0, 1.0}, a);
        CHECK(entry_max(t.values[0].blocks[0]) == 0.0);
        CHECK(entry_max(t.values[1].blocks[0] - a.blocks[0]) == 0.0);
        const CxaElement ones = construct_tensor(x, m2, {1.0, 1.0}, a);
        CHECK(entry_max(ones.values[0].blocks[0] - a.blocks[0]) == 0.0);
    }
    SUBCASE("frozen equality instance") {
        // slope of the step is 1 and ||a|| = 1; chain seminorm of a is 1 and
        // max |f| = 1, so both sides equal 2
        const SeminormComparison c = leibniz_check(x, m2, {0.0, 1.0}, a);
        CHECK(c.lhs == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(c.rhs == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("constant scalar factor") {
        const SeminormComparison c = leibniz_check(x, m2, {1.0, 1.0}, a);
        CHECK(c.lhs == doctest::Approx(af_lip_norm(*m2, a)).epsilon(1e-12));
        CHECK(c.rhs == doctest::Approx(c.lhs).epsilon(1e-12));
    }
    SUBCASE("unit algebra factor") {
        const SeminormComparison c =
            leibniz_check(x, m2, {0.25, 1.0}, AlgebraElement::unit(m2->top()));
        CHECK(c.lhs == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(c.rhs == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("random tensors agree to relative 1e-9") {
        Rng rng(17);
        for (int rep = 0; rep < 50; ++rep) {
            const ChainPtr chain = testgen::random_chain(rng, 3, 3, 4);
            const SpacePtr space = testgen::random_space_ptr(rng, 2 + static_cast<int>(rng.below(3)));
            std::vector<double> f;
            for (int i = 0; i < space->size(); ++i) f.push_back(2.0 * rng.gaussian());
            const AlgebraElement g = random_self_adjoint(chain->top(), rng);
            const SeminormComparison c = leibniz_check(space, chain, f, g);
            CHECK(std::abs(c.lhs - c.rhs) <= 1e-9 * (1.0 + std::abs(c.rhs)));
        }
    }
}

TEST_CASE("commutative product slope comparison") {
    const FiniteMetricSpace two = *testgen::two_point_space(1.0);
    SUBCASE("frozen two-point case") {
        const SeminormComparison c =
            commutative_product_slope_check(two, {0.0, 1.0}, two, {0.0, 1.0});
        CHECK(c.lhs == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c.rhs == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("constant factor saturates") {
        const SeminormComparison c =
            commutative_product_slope_check(two, {1.0, 1.0}, two, {0.0, 1.0});
        CHECK(c.lhs == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c.rhs >= c.lhs - 1e-12);
    }
    SUBCASE("zero functions") {
        const SeminormComparison c =
            commutative_product_slope_check(two, {0.0, 0.0}, two, {0.0, 0.0});
        CHECK(c.lhs == 0.0);
        CHECK(c.rhs == 0.0);
    }
    SUBCASE("bound holds on random pairs") {
        Rng rng(4);
        for (int rep = 0; rep < 30; ++rep) {
            const FiniteMetricSpace x = testgen::random_space(rng, 2 + static_cast<int>(rng.below(3)));
            const FiniteMetricSpace y = testgen::random_space(rng, 2 + static_cast<int>(rng.below(3)));
            std::vector<double> f, g;
            for (int i = 0; i < x.size(); ++i) f.push_back(rng.gaussian());
            for (int i = 0; i < y.size(); ++i) g.push_back(rng.gaussian());
            const SeminormComparison c = commutative_product_slope_check(x, f, y, g);
            CHECK(c.lhs <= c.rhs + 1e-9);
        }
    }
}

TEST_CASE("pointwise expectation properties") {
    Rng rng(55);
    for (int rep = 0; rep < 5; ++rep) {
        const ChainPtr chain = testgen::random_chain(rng, 3, 3, 4);
        const SpacePtr space = testgen::random_space_ptr(rng, 2 + static_cast<int>(rng.below(3)));
        const TraceState& tau = chain->top_trace();
        for (int s = 0; s < 20; ++s) {
            const CxaElement g = random_cxa_element(space, chain, rng);
            const int n = static_cast<int>(rng.below(chain->top_level() + 1));
            const CxaElement e = ex_conditional_expectation(g, n);
            // contraction of the combined seminorm
            CHECK(total_lip(e) <= total_lip(g) + 1e-9);
            // point evaluations against the trace are unchanged
            for (int p = 0; p < space->size(); ++p)
                CHECK(std::abs(apply_trace(tau, e.values[static_cast<size_t>(p)]) -
                               apply_trace(tau, g.values[static_cast<size_t>(p)])) <= 1e-10);
            // top level is the identity
            if (n == chain->top_level())
                CHECK(cxa_sup_norm(cxa_sub(e, g)) == 0.0);
        }
    }
}

TEST_CASE("combined seminorm is 2-quasi-leibniz pointwise") {
    Rng rng(66);
    for (int rep = 0; rep < 4; ++rep) {
        const ChainPtr chain = testgen::random_chain(rng, 3, 3, 4);
        const SpacePtr space = testgen::random_space_ptr(rng, 2 + static_cast<int>(rng.below(3)));
        for (int s = 0; s < 25; ++s) {
            const CxaElement f = random_cxa_element(space, chain, rng);
            const CxaElement g = random_cxa_element(space, chain, rng);
            const double bound = 2.0 * (total_lip(f) * cxa_sup_norm(g) +
                                        total_lip(g) * cxa_sup_norm(f));
            CHECK(total_lip(cxa_jordan(f, g)) <= bound + 1e-9);
            CHECK(total_lip(cxa_lie(f, g)) <= bound + 1e-9);
        }
    }
}
