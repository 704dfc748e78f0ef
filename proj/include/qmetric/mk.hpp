#pragma once

#include "qmetric/cxa.hpp"
#include "qmetric/rng.hpp"
#include "qmetric/simplex.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qmetric {

// State on C(X,A): one positive-semidefinite density per point, with total
// unweighted matrix trace 1, acting by phi(g) = sum_x Re Tr(rho_x g(x)).
struct CxaState {
    SpacePtr space;
    ChainPtr chain;
    std::vector<AlgebraElement> densities;
};

// Validates PSD (eigenvalues >= -1e-10) and total trace 1 within 1e-10.
CxaState make_cxa_state(SpacePtr space, ChainPtr chain, std::vector<AlgebraElement> densities);

// Evaluation state at a point: density t_l * identity at x, zero elsewhere,
// so applying it returns the trace of the value at x.
CxaState point_state(const SpacePtr& space, const ChainPtr& chain, int x);
CxaState point_state(const SpacePtr& space, const ChainPtr& chain, const std::string& label);

double state_apply(const CxaState& phi, const CxaElement& g);

struct MkOptions {
    double tol = 1e-6;
    int max_cuts = 10000;
};

struct MkResult {
    double value = 0.0;
    CxaElement witness;   // feasible: total_lip <= 1 (+ float noise)
    int cuts_used = 0;
    double upper_bound = 0.0; // final LP optimum, >= the true distance
};

// Monge-Kantorovich distance sup{|phi(a) - psi(a)| : total_lip(a) <= 1},
// computed by maximizing phi(a) with psi anchored to zero over the split
// formulation slope <= u, beta part <= v, u + v <= 1, with the operator-norm
// constraints enforced through eigenvector cuts.  The returned value comes
// from a rescaled feasible witness, so true distance lies in
// [value, upper_bound] and the loop runs until that gap is below tol.
MkResult mk_distance(const CxaState& phi, const CxaState& psi, const MkOptions& opt = {});

// Exact LP route for fully commutative top algebras (every block 1x1):
// the norm constraints expand into plain +/- rows, one simplex solve total.
double mk_bruteforce_commutative(const CxaState& phi, const CxaState& psi);

struct DiameterProbeRow {
    int sample_idx = 0;
    double mk_value = 0.0;
};

struct DiameterProbeResult {
    double max_observed = 0.0;
    double bound = 0.0; // diam(X) + 2 beta(0)
    std::vector<DiameterProbeRow> rows;
};

// Random state pairs (deterministic in seed), mk distance per pair, compared
// against the diameter bound diam(X) + 2 beta(0).
DiameterProbeResult diameter_probe(const SpacePtr& space, const ChainPtr& chain, int samples,
                                   std::uint64_t seed, double tol = 1e-7);

// sampling helpers shared by the probe and the test suites
AlgebraElement random_self_adjoint(const BlockAlgebra& alg, Rng& rng);
CxaElement random_cxa_element(const SpacePtr& space, const ChainPtr& chain, Rng& rng);
// densities built as B*B per block per point, then globally trace-normalized
CxaState random_state(const SpacePtr& space, const ChainPtr& chain, Rng& rng);

} // namespace qmetric
