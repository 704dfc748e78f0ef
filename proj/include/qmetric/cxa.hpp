#pragma once

#include "qmetric/chain.hpp"
#include "qmetric/spaces.hpp"

#include <memory>
#include <vector>

namespace qmetric {

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;
using ChainPtr = std::shared_ptr<const AfChain>;

// Function from a finite metric space into the top algebra of a chain:
// one element value per point.
struct CxaElement {
    SpacePtr space;
    ChainPtr chain;
    std::vector<AlgebraElement> values;
};

// Builds and shape-checks an element (one top-algebra value per point).
CxaElement make_cxa_element(SpacePtr space, ChainPtr chain, std::vector<AlgebraElement> values);

bool same_space(const SpacePtr& a, const SpacePtr& b);
bool same_chain(const ChainPtr& a, const ChainPtr& b);
// throws ShapeError unless both sides share space and chain
void require_compatible(const CxaElement& f, const CxaElement& g, const char* where);

bool is_self_adjoint(const CxaElement& g);
void require_self_adjoint(const CxaElement& g, const char* where);

CxaElement cxa_add(const CxaElement& f, const CxaElement& g);
CxaElement cxa_sub(const CxaElement& f, const CxaElement& g);
CxaElement cxa_scale(Cx s, const CxaElement& g);
// pointwise Jordan and Lie products
CxaElement cxa_jordan(const CxaElement& f, const CxaElement& g);
CxaElement cxa_lie(const CxaElement& f, const CxaElement& g);

// sup norm: max over points of the block operator norm
double cxa_sup_norm(const CxaElement& g);

// pointwise conditional expectation onto level n
CxaElement ex_conditional_expectation(const CxaElement& g, int n);

// sup over point pairs of ||g(x) - g(y)|| / d(x,y), diagonal skipped (0/0 = 0)
double slope_seminorm(const CxaElement& g);

// max over levels n <= T of sup-norm of (g - E_n g) divided by beta(n)
double beta_seminorm(const CxaElement& g);

// slope_seminorm + beta_seminorm
double total_lip(const CxaElement& g);

// slope + ||g - E_n g||_sup / r; agrees with total_lip on two-level chains
// whose beta(0) equals r
double finite_r_lip(const CxaElement& g, int n, double r);

// x -> f(x) * a for a scalar function f on X
CxaElement construct_tensor(const SpacePtr& space, const ChainPtr& chain,
                            const std::vector<double>& fscalar, const AlgebraElement& a);

struct SeminormComparison {
    double lhs = 0.0;
    double rhs = 0.0;
};

// lhs = total_lip(f tensor a); rhs = slope(f 1) * ||a|| + lip(a) * max|f|.
// The two agree identically for elementary tensors.
SeminormComparison leibniz_check(const SpacePtr& space, const ChainPtr& chain,
                                 const std::vector<double>& fscalar, const AlgebraElement& a);

// lhs = slope over the product 1-metric of (x,y) -> f(x) g(y);
// rhs = slope(f) max|g| + slope(g) max|f|; lhs <= rhs always.
SeminormComparison commutative_product_slope_check(const FiniteMetricSpace& x,
                                                   const std::vector<double>& f,
                                                   const FiniteMetricSpace& y,
                                                   const std::vector<double>& g);

} // namespace qmetric
