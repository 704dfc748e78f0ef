#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmetric/errors.hpp"
#include "qmetric/matrix.hpp"
#include "qmetric/rng.hpp"

#include <cmath>

using namespace qmetric;

namespace {

CMat random_hermitian(Rng& rng, int n) {
    CMat raw(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) raw(i, j) = Cx(rng.gaussian(), rng.gaussian());
    return Cx(0.5, 0.0) * (raw + adjoint(raw));
}

std::vector<Cx> matvec(const CMat& m, const std::vector<Cx>& v) {
    std::vector<Cx> out(static_cast<size_t>(m.n), Cx(0.0, 0.0));
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) out[static_cast<size_t>(i)] += m(i, j) * v[static_cast<size_t>(j)];
    return out;
}

} // namespace

TEST_CASE("basic arithmetic and adjoint") {
    CMat a(2);
    a(0, 0) = 1.0;
    a(0, 1) = Cx(0.0, 2.0);
    a(1, 0) = 3.0;
    a(1, 1) = Cx(4.0, -1.0);
    const CMat b = adjoint(a);
    CHECK(b(1, 0) == Cx(0.0, -2.0));
    CHECK(b(0, 1) == Cx(3.0, 0.0));
    CHECK(matrix_trace(a) == Cx(5.0, -1.0));
    const CMat s = a - a;
    CHECK(frobenius_norm(s) == 0.0);
    const CMat id = CMat::identity(2);
    const CMat p = id * a;
    CHECK(entry_max(p - a) == 0.0);
    CHECK(hermiticity_defect(id) == 0.0);
    CHECK(hermiticity_defect(a) > 1.0);
}

TEST_CASE("eigenvalues of small known matrices") {
    SUBCASE("identity") {
        const auto vals = hermitian_eigenvalues(CMat::identity(2));
        REQUIRE(vals.size() == 2);
        CHECK(vals[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(vals[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("flip") {
        CMat f(2);
        f(0, 1) = 1.0;
        f(1, 0) = 1.0;
        const auto vals = hermitian_eigenvalues(f);
        CHECK(vals[0] == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(vals[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(spectral_norm(f) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("complex pauli-like matrix") {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        CMat m(2);
        m(0, 0) = 2.0;
        m(0, 1) = Cx(0.0, 1.0);
        m(1, 0) = Cx(0.0, -1.0);
        m(1, 1) = 2.0;
        const auto vals = hermitian_eigenvalues(m);
        CHECK(vals[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(vals[1] == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("diagonal") {
        CMat m(2);
        m(0, 0) = 3.0;
        m(1, 1) = -4.0;
        CHECK(spectral_norm(m) == doctest::Approx(4.0).epsilon(1e-12));
    }
}

TEST_CASE("rank-one update has a clean degenerate spectrum") {
    Rng rng(11);
    for (int n : {2, 3, 5}) {
        std::vector<Cx> w(static_cast<size_t>(n));
        double norm2 = 0.0;
        for (auto& z : w) {
            z = Cx(rng.gaussian(), rng.gaussian());
            norm2 += std::norm(z);
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& z : w) z *= inv;
        CMat m = CMat::identity(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) += w[static_cast<size_t>(i)] * std::conj(w[static_cast<size_t>(j)]);
        const auto vals = hermitian_eigenvalues(m);
        for (int k = 0; k + 1 < n; ++k) CHECK(vals[static_cast<size_t>(k)] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(vals.back() == doctest::Approx(2.0).epsilon(1e-10));
    }
}

TEST_CASE("eigenvector residuals and orthonormality on random matrices") {
    Rng rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 1 + static_cast<int>(rng.below(6));
        const CMat m = random_hermitian(rng, n);
        const EigenSystem es = hermitian_eigensystem(m);
        REQUIRE(static_cast<int>(es.values.size()) == n);
        REQUIRE(static_cast<int>(es.vectors.size()) == n);
        const double scale = 1.0 + spectral_norm(m);
        for (int k = 0; k < n; ++k) {
            const auto& v = es.vectors[static_cast<size_t>(k)];
            const auto mv = matvec(m, v);
            double res = 0.0;
            for (int i = 0; i < n; ++i)
                res += std::norm(mv[static_cast<size_t>(i)] - es.values[static_cast<size_t>(k)] * v[static_cast<size_t>(i)]);
            CHECK(std::sqrt(res) <= 1e-10 * scale);
            if (k > 0) CHECK(es.values[static_cast<size_t>(k)] >= es.values[static_cast<size_t>(k) - 1]);
        }
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                Cx dot(0.0, 0.0);
                for (int i = 0; i < n; ++i)
                    dot += std::conj(es.vectors[static_cast<size_t>(k)][static_cast<size_t>(i)]) *
                           es.vectors[static_cast<size_t>(l)][static_cast<size_t>(i)];
                CHECK(std::abs(dot - (k == l ? Cx(1.0, 0.0) : Cx(0.0, 0.0))) <= 1e-10);
            }
    }
}

TEST_CASE("cholesky factorization and solve") {
    SUBCASE("diagonal") {
        CMat g(2);
        g(0, 0) = 4.0;
        g(1, 1) = 9.0;
        const CMat l = cholesky_factor(g);
        CHECK(l(0, 0).real() == doctest::Approx(2.0));
        CHECK(l(1, 1).real() == doctest::Approx(3.0));
        CHECK(std::abs(l(0, 1)) == 0.0);
    }
    SUBCASE("complex positive definite") {
        CMat g(2);
        g(0, 0) = 2.0;
        g(0, 1) = Cx(0.0, 1.0);
        g(1, 0) = Cx(0.0, -1.0);
        g(1, 1) = 2.0;
        const CMat l = cholesky_factor(g);
        const CMat back = l * adjoint(l);
        CHECK(entry_max(back - g) <= 1e-12);
        const std::vector<Cx> b{Cx(1.0, 0.0), Cx(0.0, 1.0)};
        const std::vector<Cx> x = cholesky_solve(l, b);
        const std::vector<Cx> gx = matvec(g, x);
        CHECK(std::abs(gx[0] - b[0]) <= 1e-12);
        CHECK(std::abs(gx[1] - b[1]) <= 1e-12);
    }
    SUBCASE("indefinite input is rejected") {
        CMat g(2);
        g(0, 0) = 1.0;
        g(1, 1) = -1.0;
        CHECK_THROWS_AS((void)cholesky_factor(g), DomainError);
    }
    SUBCASE("random spd recomposition") {
        Rng rng(3);
        for (int rep = 0; rep < 20; ++rep) {
            const int n = 1 + static_cast<int>(rng.below(5));
            CMat b(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) b(i, j) = Cx(rng.gaussian(), rng.gaussian());
            CMat g = adjoint(b) * b;
            for (int i = 0; i < n; ++i) g(i, i) += 0.1; // keep it comfortably positive
            const CMat l = cholesky_factor(g);
            CHECK(entry_max(l * adjoint(l) - g) <= 1e-10 * (1.0 + entry_max(g)));
        }
    }
}
