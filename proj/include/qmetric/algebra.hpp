#pragma once

#include "qmetric/matrix.hpp"

#include <string>
#include <vector>

namespace qmetric {

// Finite-dimensional C*-algebra presented as an ordered direct sum of full
// complex matrix blocks of sizes (m_0, ..., m_k).
struct BlockAlgebra {
    std::vector<int> block_sizes;

    BlockAlgebra() = default;
    explicit BlockAlgebra(std::vector<int> sizes) : block_sizes(std::move(sizes)) {}

    int num_blocks() const { return static_cast<int>(block_sizes.size()); }
    // carrier dimension, sum of m_l (side of the block-diagonal picture)
    int total_dim() const;
    // complex dimension of the algebra, sum of m_l^2
    int complex_dim() const;

    bool operator==(const BlockAlgebra& other) const { return block_sizes == other.block_sizes; }
    bool operator!=(const BlockAlgebra& other) const { return !(*this == other); }

    std::string describe() const;
};

// Throws DomainError unless every block size is >= 1 and the list is nonempty.
void validate_algebra(const BlockAlgebra& alg);

// One matrix per block of the parent algebra.
struct AlgebraElement {
    BlockAlgebra algebra;
    std::vector<CMat> blocks;

    static AlgebraElement zero(const BlockAlgebra& alg);
    static AlgebraElement unit(const BlockAlgebra& alg);
    // scalar r placed as r * 1
    static AlgebraElement scalar(const BlockAlgebra& alg, Cx r);
};

// Faithful tracial state: strictly positive weight per block with
// sum_l t_l * m_l = 1.  tau(a) = sum_l t_l * Tr(a_l).
struct TraceState {
    BlockAlgebra algebra;
    std::vector<double> weights;
};

// Validating constructors; throw DomainError / ShapeError on bad data.
TraceState make_trace_state(const BlockAlgebra& alg, std::vector<double> weights);
// weight 1/total_dim on every block (the normalized trace)
TraceState normalized_trace(const BlockAlgebra& alg);

// elementwise arithmetic; all check block structure and throw ShapeError
AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement sub(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement scale(Cx s, const AlgebraElement& a);
AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement adjoint_of(const AlgebraElement& a);
// (ab + ba)/2
AlgebraElement jordan_product(const AlgebraElement& a, const AlgebraElement& b);
// (ab - ba)/(2i)
AlgebraElement lie_product(const AlgebraElement& a, const AlgebraElement& b);

// per-entry tolerance for the self-adjointness predicate
inline constexpr double kSelfAdjointTol = 1e-12;

bool is_self_adjoint(const AlgebraElement& a, double tol = kSelfAdjointTol);
// explicit symmetrization (a + a*)/2; never applied silently by other ops
AlgebraElement symmetrized(const AlgebraElement& a);
// throws DomainError when a is not self-adjoint within tol
void require_self_adjoint(const AlgebraElement& a, const char* where);

// Eigenvalues per block, each ascending.  Requires self-adjoint input.
std::vector<std::vector<double>> hermitian_spectrum(const AlgebraElement& a);
// Full eigensystems per block when eigenvectors are needed.
std::vector<EigenSystem> hermitian_eigensystems(const AlgebraElement& a);

// C*-norm: max over blocks of the spectral norm; non-self-adjoint input goes
// through sqrt of the largest eigenvalue of a*a.
double operator_norm(const AlgebraElement& a);

Cx apply_trace(const TraceState& tau, const AlgebraElement& a);
// GNS inner product <a, b> = tau(b* a); sesquilinear, conjugate-linear in b.
Cx gns_inner(const TraceState& tau, const AlgebraElement& a, const AlgebraElement& b);

} // namespace qmetric
