#include "qmetric/algebra.hpp"
#include "qmetric/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qmetric {

int BlockAlgebra::total_dim() const {
    int s = 0;
    for (int m : block_sizes) s += m;
    return s;
}

int BlockAlgebra::complex_dim() const {
    int s = 0;
    for (int m : block_sizes) s += m * m;
    return s;
}

std::string BlockAlgebra::describe() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < block_sizes.size(); ++i) {
        if (i) os << ",";
        os << block_sizes[i];
    }
    os << ")";
    return os.str();
}

void validate_algebra(const BlockAlgebra& alg) {
    if (alg.block_sizes.empty())
        throw DomainError("algebra needs at least one block");
    for (size_t i = 0; i < alg.block_sizes.size(); ++i)
        if (alg.block_sizes[i] < 1)
            throw DomainError("block " + std::to_string(i) + " has size " +
                              std::to_string(alg.block_sizes[i]) + ", must be >= 1");
}

AlgebraElement AlgebraElement::zero(const BlockAlgebra& alg) {
    AlgebraElement e;
    e.algebra = alg;
    e.blocks.reserve(alg.block_sizes.size());
    for (int m : alg.block_sizes) e.blocks.emplace_back(m);
    return e;
}

AlgebraElement AlgebraElement::unit(const BlockAlgebra& alg) {
    return scalar(alg, Cx(1.0, 0.0));
}

AlgebraElement AlgebraElement::scalar(const BlockAlgebra& alg, Cx r) {
    AlgebraElement e = zero(alg);
    for (size_t l = 0; l < e.blocks.size(); ++l)
        for (int i = 0; i < e.blocks[l].n; ++i) e.blocks[l](i, i) = r;
    return e;
}

static void check_parent(const AlgebraElement& a, const AlgebraElement& b, const char* op) {
    if (a.algebra != b.algebra)
        throw ShapeError(std::string(op) + ": elements live on different algebras " +
                         a.algebra.describe() + " vs " + b.algebra.describe());
}

static void check_element(const AlgebraElement& a, const char* op) {
    if (a.blocks.size() != a.algebra.block_sizes.size())
        throw ShapeError(std::string(op) + ": block count mismatch");
    for (size_t l = 0; l < a.blocks.size(); ++l)
        if (a.blocks[l].n != a.algebra.block_sizes[l])
            throw ShapeError(std::string(op) + ": block " + std::to_string(l) + " has dim " +
                             std::to_string(a.blocks[l].n) + ", algebra expects " +
                             std::to_string(a.algebra.block_sizes[l]));
}

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) {
    check_parent(a, b, "add");
    AlgebraElement r = a;
    for (size_t l = 0; l < r.blocks.size(); ++l) r.blocks[l] = a.blocks[l] + b.blocks[l];
    return r;
}

AlgebraElement sub(const AlgebraElement& a, const AlgebraElement& b) {
    check_parent(a, b, "sub");
    AlgebraElement r = a;
    for (size_t l = 0; l < r.blocks.size(); ++l) r.blocks[l] = a.blocks[l] - b.blocks[l];
    return r;
}

AlgebraElement scale(Cx s, const AlgebraElement& a) {
    AlgebraElement r = a;
    for (CMat& m : r.blocks) m = s * m;
    return r;
}

AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) {
    check_parent(a, b, "mul");
    AlgebraElement r = a;
    for (size_t l = 0; l < r.blocks.size(); ++l) r.blocks[l] = a.blocks[l] * b.blocks[l];
    return r;
}

AlgebraElement adjoint_of(const AlgebraElement& a) {
    AlgebraElement r = a;
    for (size_t l = 0; l < r.blocks.size(); ++l) r.blocks[l] = adjoint(a.blocks[l]);
    return r;
}

AlgebraElement jordan_product(const AlgebraElement& a, const AlgebraElement& b) {
    check_parent(a, b, "jordan");
    AlgebraElement r = a;
    for (size_t l = 0; l < r.blocks.size(); ++l) {
        const CMat ab = a.blocks[l] * b.blocks[l];
        const CMat ba = b.blocks[l] * a.blocks[l];
        r.blocks[l] = Cx(0.5, 0.0) * (ab + ba);
    }
    return r;
}

AlgebraElement lie_product(const AlgebraElement& a, const AlgebraElement& b) {
    check_parent(a, b, "lie");
    AlgebraElement r = a;
    for (size_t l = 0; l < r.blocks.size(); ++l) {
        const CMat ab = a.blocks[l] * b.blocks[l];
        const CMat ba = b.blocks[l] * a.blocks[l];
        // (ab - ba)/(2i) = -i/2 (ab - ba)
        r.blocks[l] = Cx(0.0, -0.5) * (ab - ba);
    }
    return r;
}

bool is_self_adjoint(const AlgebraElement& a, double tol) {
    for (const CMat& m : a.blocks)
        if (2.0 * hermiticity_defect(m) > tol) return false;
    return true;
}

AlgebraElement symmetrized(const AlgebraElement& a) {
    AlgebraElement r = a;
    for (size_t l = 0; l < r.blocks.size(); ++l)
        r.blocks[l] = Cx(0.5, 0.0) * (a.blocks[l] + adjoint(a.blocks[l]));
    return r;
}

void require_self_adjoint(const AlgebraElement& a, const char* where) {
    if (!is_self_adjoint(a))
        throw DomainError(std::string(where) + ": element is not self-adjoint "
                          "(entry defect above 1e-12); symmetrize explicitly if intended");
}

std::vector<std::vector<double>> hermitian_spectrum(const AlgebraElement& a) {
    check_element(a, "hermitian_spectrum");
    require_self_adjoint(a, "hermitian_spectrum");
    std::vector<std::vector<double>> out;
    out.reserve(a.blocks.size());
    for (const CMat& m : a.blocks) out.push_back(hermitian_eigenvalues(m));
    return out;
}

std::vector<EigenSystem> hermitian_eigensystems(const AlgebraElement& a) {
    check_element(a, "hermitian_eigensystems");
    require_self_adjoint(a, "hermitian_eigensystems");
    std::vector<EigenSystem> out;
    out.reserve(a.blocks.size());
    for (const CMat& m : a.blocks) out.push_back(hermitian_eigensystem(m));
    return out;
}

double operator_norm(const AlgebraElement& a) {
    check_element(a, "operator_norm");
    double best = 0.0;
    if (is_self_adjoint(a)) {
        for (const CMat& m : a.blocks) best = std::max(best, spectral_norm(m));
    } else {
        for (const CMat& m : a.blocks) {
            const CMat prod = adjoint(m) * m;
            const std::vector<double> vals = hermitian_eigenvalues(prod);
            if (!vals.empty()) best = std::max(best, std::sqrt(std::max(0.0, vals.back())));
        }
    }
    return best;
}

static void check_trace(const TraceState& tau, const AlgebraElement& a, const char* op) {
    if (tau.algebra != a.algebra)
        throw ShapeError(std::string(op) + ": trace lives on " + tau.algebra.describe() +
                         ", element on " + a.algebra.describe());
}

TraceState make_trace_state(const BlockAlgebra& alg, std::vector<double> weights) {
    validate_algebra(alg);
    if (weights.size() != alg.block_sizes.size())
        throw ShapeError("trace weights: expected " + std::to_string(alg.block_sizes.size()) +
                         " entries, got " + std::to_string(weights.size()));
    double total = 0.0;
    for (size_t l = 0; l < weights.size(); ++l) {
        if (!(weights[l] > 0.0))
            throw DomainError("trace weight " + std::to_string(l) +
                              " must be strictly positive (faithfulness)");
        total += weights[l] * alg.block_sizes[l];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("trace weights not normalized: sum t_l m_l = " + std::to_string(total));
    TraceState t;
    t.algebra = alg;
    t.weights = std::move(weights);
    return t;
}

TraceState normalized_trace(const BlockAlgebra& alg) {
    validate_algebra(alg);
    const double w = 1.0 / alg.total_dim();
    return make_trace_state(alg, std::vector<double>(alg.block_sizes.size(), w));
}

Cx apply_trace(const TraceState& tau, const AlgebraElement& a) {
    check_trace(tau, a, "apply_trace");
    Cx s(0.0, 0.0);
    for (size_t l = 0; l < a.blocks.size(); ++l)
        s += tau.weights[l] * matrix_trace(a.blocks[l]);
    return s;
}

Cx gns_inner(const TraceState& tau, const AlgebraElement& a, const AlgebraElement& b) {
    check_trace(tau, a, "gns_inner");
    check_parent(a, b, "gns_inner");
    // tau(b* a) = sum_l t_l sum_ij conj(b_ij) a_ij
    Cx s(0.0, 0.0);
    for (size_t l = 0; l < a.blocks.size(); ++l) {
        Cx blk(0.0, 0.0);
        const CMat& ma = a.blocks[l];
        const CMat& mb = b.blocks[l];
        for (size_t i = 0; i < ma.a.size(); ++i) blk += std::conj(mb.a[i]) * ma.a[i];
        s += tau.weights[l] * blk;
    }
    return s;
}

} // namespace qmetric
