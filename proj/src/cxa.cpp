#include "qmetric/cxa.hpp"
#include "qmetric/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qmetric {

CxaElement make_cxa_element(SpacePtr space, ChainPtr chain, std::vector<AlgebraElement> values) {
    if (!space || !chain) throw ShapeError("element needs a space and a chain");
    if (static_cast<int>(values.size()) != space->size())
        throw ShapeError("element has " + std::to_string(values.size()) + " values for " +
                         std::to_string(space->size()) + " points");
    for (const AlgebraElement& v : values)
        if (v.algebra != chain->top())
            throw ShapeError("element value lives on " + v.algebra.describe() +
                             ", chain top is " + chain->top().describe());
    CxaElement g;
    g.space = std::move(space);
    g.chain = std::move(chain);
    g.values = std::move(values);
    return g;
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

bool same_chain(const ChainPtr& a, const ChainPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->structurally_equal(*b);
}

void require_compatible(const CxaElement& f, const CxaElement& g, const char* where) {
    if (!same_space(f.space, g.space))
        throw ShapeError(std::string(where) + ": elements live over different spaces");
    if (!same_chain(f.chain, g.chain))
        throw ShapeError(std::string(where) + ": elements live over different chains");
}

bool is_self_adjoint(const CxaElement& g) {
    for (const AlgebraElement& v : g.values)
        if (!is_self_adjoint(v)) return false;
    return true;
}

void require_self_adjoint(const CxaElement& g, const char* where) {
    if (!is_self_adjoint(g))
        throw DomainError(std::string(where) + ": function has a non self-adjoint value");
}

CxaElement cxa_add(const CxaElement& f, const CxaElement& g) {
    require_compatible(f, g, "cxa_add");
    CxaElement out = f;
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = add(f.values[i], g.values[i]);
    return out;
}

CxaElement cxa_sub(const CxaElement& f, const CxaElement& g) {
    require_compatible(f, g, "cxa_sub");
    CxaElement out = f;
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = sub(f.values[i], g.values[i]);
    return out;
}

CxaElement cxa_scale(Cx s, const CxaElement& g) {
    CxaElement out = g;
    for (AlgebraElement& v : out.values) v = scale(s, v);
    return out;
}

CxaElement cxa_jordan(const CxaElement& f, const CxaElement& g) {
    require_compatible(f, g, "cxa_jordan");
    CxaElement out = f;
    for (size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = jordan_product(f.values[i], g.values[i]);
    return out;
}

CxaElement cxa_lie(const CxaElement& f, const CxaElement& g) {
    require_compatible(f, g, "cxa_lie");
    CxaElement out = f;
    for (size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = lie_product(f.values[i], g.values[i]);
    return out;
}

double cxa_sup_norm(const CxaElement& g) {
    double best = 0.0;
    for (const AlgebraElement& v : g.values) best = std::max(best, operator_norm(v));
    return best;
}

CxaElement ex_conditional_expectation(const CxaElement& g, int n) {
    CxaElement out = g;
    for (size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = conditional_expectation(*g.chain, n, g.values[i]);
    return out;
}

double slope_seminorm(const CxaElement& g) {
    require_self_adjoint(g, "slope_seminorm");
    double best = 0.0;
    const int n = g.space->size();
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            const double gap = operator_norm(sub(g.values[static_cast<size_t>(x)],
                                                 g.values[static_cast<size_t>(y)]));
            best = std::max(best, gap / g.space->d(x, y));
        }
    return best;
}

double beta_seminorm(const CxaElement& g) {
    require_self_adjoint(g, "beta_seminorm");
    double best = 0.0;
    // level T contributes exactly zero
    for (int n = 0; n < g.chain->top_level(); ++n) {
        double sup = 0.0;
        for (const AlgebraElement& v : g.values)
            sup = std::max(sup, operator_norm(sub(v, conditional_expectation(*g.chain, n, v))));
        best = std::max(best, sup / g.chain->beta_at(n));
    }
    return best;
}

double total_lip(const CxaElement& g) {
    return slope_seminorm(g) + beta_seminorm(g);
}

double finite_r_lip(const CxaElement& g, int n, double r) {
    if (!(r > 0.0)) throw DomainError("finite_r_lip: r must be positive");
    require_self_adjoint(g, "finite_r_lip");
    const CxaElement gap = cxa_sub(g, ex_conditional_expectation(g, n));
    return slope_seminorm(g) + cxa_sup_norm(gap) / r;
}

CxaElement construct_tensor(const SpacePtr& space, const ChainPtr& chain,
                            const std::vector<double>& fscalar, const AlgebraElement& a) {
    if (!space || !chain) throw ShapeError("construct_tensor needs a space and a chain");
    if (static_cast<int>(fscalar.size()) != space->size())
        throw ShapeError("construct_tensor: scalar function has " +
                         std::to_string(fscalar.size()) + " values for " +
                         std::to_string(space->size()) + " points");
    std::vector<AlgebraElement> values;
    values.reserve(fscalar.size());
    for (double fx : fscalar) values.push_back(scale(Cx(fx, 0.0), a));
    return make_cxa_element(space, chain, std::move(values));
}

SeminormComparison leibniz_check(const SpacePtr& space, const ChainPtr& chain,
                                 const std::vector<double>& fscalar, const AlgebraElement& a) {
    require_self_adjoint(a, "leibniz_check");
    SeminormComparison out;
    out.lhs = total_lip(construct_tensor(space, chain, fscalar, a));

    const CxaElement f_one =
        construct_tensor(space, chain, fscalar, AlgebraElement::unit(chain->top()));
    double fmax = 0.0;
    for (double fx : fscalar) fmax = std::max(fmax, std::abs(fx));
    out.rhs = slope_seminorm(f_one) * operator_norm(a) + af_lip_norm(*chain, a) * fmax;
    return out;
}

SeminormComparison commutative_product_slope_check(const FiniteMetricSpace& x,
                                                   const std::vector<double>& f,
                                                   const FiniteMetricSpace& y,
                                                   const std::vector<double>& g) {
    if (static_cast<int>(f.size()) != x.size() || static_cast<int>(g.size()) != y.size())
        throw ShapeError("commutative_product_slope_check: value count mismatch");
    const FiniteMetricSpace prod = product_1_metric(x, y);
    const int ny = y.size();
    SeminormComparison out;
    // slope of (x,y) -> f(x) g(y) over the product 1-metric, diagonal skipped
    const int np = prod.size();
    for (int p = 0; p < np; ++p)
        for (int q = p + 1; q < np; ++q) {
            const double vp = f[static_cast<size_t>(p / ny)] * g[static_cast<size_t>(p % ny)];
            const double vq = f[static_cast<size_t>(q / ny)] * g[static_cast<size_t>(q % ny)];
            out.lhs = std::max(out.lhs, std::abs(vp - vq) / prod.d(p, q));
        }
    double fmax = 0.0, gmax = 0.0, fslope = 0.0, gslope = 0.0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    for (int i = 0; i < x.size(); ++i)
        for (int j = i + 1; j < x.size(); ++j)
            fslope = std::max(fslope, std::abs(f[static_cast<size_t>(i)] -
                                               f[static_cast<size_t>(j)]) / x.d(i, j));
    for (int i = 0; i < y.size(); ++i)
        for (int j = i + 1; j < y.size(); ++j)
            gslope = std::max(gslope, std::abs(g[static_cast<size_t>(i)] -
                                               g[static_cast<size_t>(j)]) / y.d(i, j));
    out.rhs = fslope * gmax + gslope * fmax;
    return out;
}

} // namespace qmetric
