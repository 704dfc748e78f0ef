#pragma once

#include "qmetric/cxa.hpp"
#include "qmetric/rng.hpp"
#include "qmetric/spaces.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace qmetric {

// Inclusion of a chain level into the top algebra, packaged with the two
// quantities that certify an upper bound on the distance between the induced
// quantum metric spaces: the height is 0 because the pivot is the unit, and
// the reach is the level resolution beta(n).
struct InclusionBridge {
    ChainPtr chain;
    int level = 0;
    double height = 0.0;
    double reach = 0.0;
};

InclusionBridge make_inclusion_bridge(const ChainPtr& chain, int level);

struct LevelBound {
    double bound = 0.0;
    double height = 0.0;
};

// Certified upper bound beta(n) for the distance between functions valued in
// level n and functions valued in the top level, over the given space.
LevelBound chain_level_bound(const FiniteMetricSpace& space, const AfChain& chain, int n);

struct ReachWitness {
    CxaElement partner;
    double seminorm_gap = 0.0;
};

// For f with total_lip(f) <= 1, the level-n expectation is a partner whose
// seminorm is no larger and whose sup-norm gap to f is at most beta(n).
ReachWitness reach_witness_check(const FiniteMetricSpace& space, const AfChain& chain, int n,
                                 const CxaElement& f);

struct FdApproxBounds {
    double space_gap = 0.0;        // GH distance, or Hausdorff gap for nets
    double to_commutative = 0.0;   // beta(0) + space_gap
    double between_tensors = 0.0;  // 2 beta(0) + space_gap
    double net_bound = 0.0;        // beta(0) + space_gap (net reading)
};

// Finite-dimensional approximation bounds with the space gap taken as the
// brute-force Gromov-Hausdorff distance between X and Y.
FdApproxBounds fd_approx_bounds(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                const AfChain& chain);

// Same bounds with the space gap taken as the Hausdorff distance from X to
// the sub-space on the given point indices (a net of X).
FdApproxBounds fd_approx_net(const FiniteMetricSpace& x, const std::vector<int>& net,
                             const AfChain& chain);

// Truncated infinite tensor product of matrix algebras driven by an integer
// sequence: level n is the full matrix algebra of size prod_{j<n}(seq_j + 1),
// each step embeds with multiplicity seq_n + 1, the trace is the normalized
// matrix trace, and the resolution sequence is the inverse dimension.
struct UhfTruncation {
    BaireSeq seq;
    int depth = 0;
    std::vector<long long> dims; // level dimensions, dims[0] = 1
    ChainPtr chain;
};

inline constexpr int kUhfDimCap = 64;

UhfTruncation uhf_build(const BaireSeq& seq, int depth);

// Largest depth <= len(seq) whose level dimension stays within the cap.
int uhf_feasible_depth(const BaireSeq& seq);

// Certified upper bound 2 * baire_distance(a, b) for the distance between
// the function spaces built over the two sequences.
double uhf_propinquity_bound(const BaireSeq& a, const BaireSeq& b,
                             const FiniteMetricSpace& space);

// Builds both truncated chains (each at its own largest feasible depth, at
// least agree_depth), samples self-adjoint functions valued in the shared
// level-agree_depth algebra, and returns the largest difference between the
// two Lip seminorms across the identification.  With full_basis set, every
// point-supported coordinate basis element is checked instead of samples.
double uhf_isometry_check(const BaireSeq& a, const BaireSeq& b, const SpacePtr& space,
                          int agree_depth, int samples = 50, std::uint64_t seed = 20240901,
                          bool full_basis = false);

} // namespace qmetric
