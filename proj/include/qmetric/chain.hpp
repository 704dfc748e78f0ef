#pragma once

#include "qmetric/algebra.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace qmetric {

// Unital embedding A_n -> A_{n+1} described by Bratteli multiplicities:
// mult[i][j] copies of source block i sit inside target block j.
struct MultiplicityEmbedding {
    BlockAlgebra source;
    BlockAlgebra target;
    std::vector<std::vector<int>> mult;
};

// Raw chain description before validation.
struct ChainData {
    std::vector<BlockAlgebra> levels;              // A_0 ... A_T, A_0 = C1
    std::vector<MultiplicityEmbedding> embeddings; // T of them
    std::vector<double> top_trace_weights;         // per block of A_T
    std::vector<double> beta;                      // T+1 strictly positive, nonincreasing
};

struct ChainReport {
    bool ok = true;
    std::vector<std::string> problems;
    // block sizes per level, echoed for the caller
    std::vector<std::vector<int>> level_dims;
};

// Checks every chain invariant without throwing: level shapes, A_0 = C1,
// unitality of each embedding, every source block mapped somewhere, trace
// weight positivity and normalization, beta positivity and monotonicity,
// faithfulness of the pullback traces on a matrix-unit basis.
ChainReport validate_chain(const ChainData& data);

// Validated truncated chain with all query caches built up front:
// composed embeddings as copy-position maps, pullback traces, pushed
// matrix-unit bases, and the Gram factorization per level.  Immutable
// afterwards, so all queries are pure and safe to share across threads.
class AfChain {
public:
    // throws DomainError carrying the validation report when data is invalid
    explicit AfChain(ChainData data);

    int top_level() const { return static_cast<int>(data_.levels.size()) - 1; }
    const BlockAlgebra& level(int n) const;
    const BlockAlgebra& top() const { return data_.levels.back(); }
    const TraceState& top_trace() const { return top_trace_; }
    // pullback trace tau_T o iota on level n
    const TraceState& level_trace(int n) const;
    const std::vector<double>& beta() const { return data_.beta; }
    double beta_at(int n) const;
    const ChainData& data() const { return data_; }

    // where each copy of a source block lands in the top algebra
    struct Copy {
        int top_block;
        int offset; // diagonal offset of the copy inside the top block
    };
    const std::vector<std::vector<Copy>>& copies_at(int n) const;

    bool structurally_equal(const AfChain& other) const;

private:
    friend AlgebraElement embed_element(const AfChain&, int, const AlgebraElement&);
    friend AlgebraElement conditional_expectation(const AfChain&, int, const AlgebraElement&);

    void build_caches();

    ChainData data_;
    TraceState top_trace_;
    std::vector<TraceState> level_traces_;
    // copies_[n][l] = placements of source block l of level n inside A_T
    std::vector<std::vector<std::vector<Copy>>> copies_;

    // pushed matrix-unit basis of level n, stored sparsely
    struct BasisEntry {
        // top-algebra positions carrying coefficient 1
        std::vector<std::array<int, 3>> positions; // (top block, row, col)
    };
    struct LevelProjector {
        std::vector<BasisEntry> basis;  // indexed like the matrix units of A_n
        bool diagonal_gram = false;
        std::vector<double> gram_diag;  // when diagonal
        CMat gram_chol;                 // dense lower factor otherwise
    };
    std::vector<LevelProjector> projectors_; // for n = 0..T-1; level T is the identity
};

// Image of a under the composed canonical embedding of level n into the top.
AlgebraElement embed_element(const AfChain& c, int n, const AlgebraElement& a);

// Trace-preserving conditional expectation onto the image of level n,
// computed as the GNS-orthogonal projection via the cached Gram factor.
AlgebraElement conditional_expectation(const AfChain& c, int n, const AlgebraElement& f);

// max over n <= T of ||f - E_n(f)|| / beta(n); requires f self-adjoint
double af_lip_norm(const AfChain& c, const AlgebraElement& f);

} // namespace qmetric
