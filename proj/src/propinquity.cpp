#include "qmetric/propinquity.hpp"
#include "qmetric/errors.hpp"
#include "qmetric/mk.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace qmetric {

namespace {

void check_level(const AfChain& chain, int n, const char* where) {
    if (n < 0 || n > chain.top_level())
        throw RangeError(std::string(where) + ": level " + std::to_string(n) +
                         " outside [0, " + std::to_string(chain.top_level()) + "]");
}

std::vector<long long> uhf_dims(const BaireSeq& seq, int depth) {
    std::vector<long long> dims{1};
    for (int n = 0; n < depth; ++n)
        dims.push_back(dims.back() * (static_cast<long long>(seq.entries[static_cast<size_t>(n)]) + 1));
    return dims;
}

} // namespace

InclusionBridge make_inclusion_bridge(const ChainPtr& chain, int level) {
    if (!chain) throw ShapeError("make_inclusion_bridge: missing chain");
    check_level(*chain, level, "make_inclusion_bridge");
    InclusionBridge b;
    b.chain = chain;
    b.level = level;
    b.height = 0.0;
    b.reach = chain->beta_at(level);
    return b;
}

LevelBound chain_level_bound(const FiniteMetricSpace& space, const AfChain& chain, int n) {
    (void)space; // the bound is uniform over the base space
    check_level(chain, n, "chain_level_bound");
    return {chain.beta_at(n), 0.0};
}

ReachWitness reach_witness_check(const FiniteMetricSpace& space, const AfChain& chain, int n,
                                 const CxaElement& f) {
    check_level(chain, n, "reach_witness_check");
    if (!f.space || !(*f.space == space))
        throw ShapeError("reach_witness_check: element space differs from the given space");
    if (!f.chain || !f.chain->structurally_equal(chain))
        throw ShapeError("reach_witness_check: element chain differs from the given chain");
    const double lip = total_lip(f);
    if (lip > 1.0 + 1e-9)
        throw DomainError("reach_witness_check: total_lip(f) = " + std::to_string(lip) +
                          " exceeds 1");
    ReachWitness w;
    w.partner = ex_conditional_expectation(f, n);
    w.seminorm_gap = cxa_sup_norm(cxa_sub(f, w.partner));
    return w;
}

FdApproxBounds fd_approx_bounds(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                const AfChain& chain) {
    FdApproxBounds out;
    try {
        out.space_gap = gh_bruteforce(x, y);
    } catch (const CapacityError& e) {
        throw CapacityError(std::string(e.what()) +
                            "; for large spaces use fd_approx_net with a greedy net instead");
    }
    const double b0 = chain.beta_at(0);
    out.to_commutative = b0 + out.space_gap;
    out.between_tensors = 2.0 * b0 + out.space_gap;
    out.net_bound = out.to_commutative;
    return out;
}

FdApproxBounds fd_approx_net(const FiniteMetricSpace& x, const std::vector<int>& net,
                             const AfChain& chain) {
    FdApproxBounds out;
    out.space_gap = hausdorff_subset(x, net);
    const double b0 = chain.beta_at(0);
    out.to_commutative = b0 + out.space_gap;
    out.between_tensors = 2.0 * b0 + out.space_gap;
    out.net_bound = out.to_commutative;
    return out;
}

UhfTruncation uhf_build(const BaireSeq& seq, int depth) {
    if (depth < 0 || depth > seq.length())
        throw RangeError("uhf_build: depth " + std::to_string(depth) +
                         " outside [0, " + std::to_string(seq.length()) + "]");
    UhfTruncation t;
    t.seq = seq;
    t.depth = depth;
    t.dims = uhf_dims(seq, depth);
    if (t.dims.back() > kUhfDimCap)
        throw CapacityError("uhf_build: level dimension " + std::to_string(t.dims.back()) +
                            " exceeds the cap of " + std::to_string(kUhfDimCap) +
                            "; bound arithmetic still works at smaller depth");
    ChainData data;
    for (long long d : t.dims) data.levels.push_back(BlockAlgebra{{static_cast<int>(d)}});
    for (int n = 0; n < depth; ++n) {
        MultiplicityEmbedding e;
        e.source = data.levels[static_cast<size_t>(n)];
        e.target = data.levels[static_cast<size_t>(n) + 1];
        e.mult = {{seq.entries[static_cast<size_t>(n)] + 1}};
        data.embeddings.push_back(std::move(e));
    }
    data.top_trace_weights = {1.0 / static_cast<double>(t.dims.back())};
    for (long long d : t.dims) data.beta.push_back(1.0 / static_cast<double>(d));
    t.chain = std::make_shared<AfChain>(std::move(data));
    return t;
}

int uhf_feasible_depth(const BaireSeq& seq) {
    long long dim = 1;
    int depth = 0;
    while (depth < seq.length()) {
        const long long next =
            dim * (static_cast<long long>(seq.entries[static_cast<size_t>(depth)]) + 1);
        if (next > kUhfDimCap) break;
        dim = next;
        ++depth;
    }
    return depth;
}

double uhf_propinquity_bound(const BaireSeq& a, const BaireSeq& b,
                             const FiniteMetricSpace& space) {
    (void)space; // the bound is uniform over the base space
    return 2.0 * baire_distance(a, b);
}

double uhf_isometry_check(const BaireSeq& a, const BaireSeq& b, const SpacePtr& space,
                          int agree_depth, int samples, std::uint64_t seed, bool full_basis) {
    if (!space) throw ShapeError("uhf_isometry_check: missing space");
    if (agree_depth < 0 || agree_depth > std::min(a.length(), b.length()))
        throw RangeError("uhf_isometry_check: agree_depth " + std::to_string(agree_depth) +
                         " exceeds a sequence length");
    for (int i = 0; i < agree_depth; ++i)
        if (a.entries[static_cast<size_t>(i)] != b.entries[static_cast<size_t>(i)])
            throw DomainError("uhf_isometry_check: sequences disagree at index " +
                              std::to_string(i) + ", before the claimed depth " +
                              std::to_string(agree_depth));
    if (samples < 1 && !full_basis)
        throw DomainError("uhf_isometry_check: samples must be >= 1");

    const int depth_a = std::max(agree_depth, uhf_feasible_depth(a));
    const int depth_b = std::max(agree_depth, uhf_feasible_depth(b));
    const UhfTruncation ta = uhf_build(a, depth_a); // throws if even agree_depth is too big
    const UhfTruncation tb = uhf_build(b, depth_b);
    const BlockAlgebra& shared = ta.chain->level(agree_depth);

    const auto discrepancy = [&](const std::vector<AlgebraElement>& values) {
        std::vector<AlgebraElement> va;
        std::vector<AlgebraElement> vb;
        va.reserve(values.size());
        vb.reserve(values.size());
        for (const AlgebraElement& g : values) {
            va.push_back(embed_element(*ta.chain, agree_depth, g));
            vb.push_back(embed_element(*tb.chain, agree_depth, g));
        }
        const CxaElement fa = make_cxa_element(space, ta.chain, std::move(va));
        const CxaElement fb = make_cxa_element(space, tb.chain, std::move(vb));
        return std::abs(total_lip(fa) - total_lip(fb));
    };

    double worst = 0.0;
    const int np = space->size();
    if (full_basis) {
        const int m = shared.block_sizes[0];
        for (int x = 0; x < np; ++x) {
            const auto probe = [&](const CMat& unit) {
                std::vector<AlgebraElement> values(static_cast<size_t>(np),
                                                   AlgebraElement::zero(shared));
                values[static_cast<size_t>(x)].blocks[0] = unit;
                worst = std::max(worst, discrepancy(values));
            };
            for (int i = 0; i < m; ++i) {
                CMat u(m);
                u(i, i) = 1.0;
                probe(u);
            }
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) {
                    CMat re(m);
                    re(i, j) = 1.0;
                    re(j, i) = 1.0;
                    probe(re);
                    CMat im(m);
                    im(i, j) = Cx(0.0, 1.0);
                    im(j, i) = Cx(0.0, -1.0);
                    probe(im);
                }
        }
    } else {
        Rng rng(seed);
        for (int s = 0; s < samples; ++s) {
            std::vector<AlgebraElement> values;
            values.reserve(static_cast<size_t>(np));
            for (int x = 0; x < np; ++x) values.push_back(random_self_adjoint(shared, rng));
            worst = std::max(worst, discrepancy(values));
        }
    }
    return worst;
}

} // namespace qmetric
