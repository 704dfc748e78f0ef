#pragma once

#include <complex>
#include <vector>

namespace qmetric {

using Cx = std::complex<double>;

// Dense square complex matrix, row major.  Sized for desk-scale blocks
// (n <= 64); all routines below are written for that regime.
struct CMat {
    int n = 0;
    std::vector<Cx> a;

    CMat() = default;
    explicit CMat(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, Cx(0.0, 0.0)) {}

    Cx& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const Cx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    static CMat identity(int dim);
};

CMat operator+(const CMat& x, const CMat& y);
CMat operator-(const CMat& x, const CMat& y);
CMat operator*(const CMat& x, const CMat& y);
CMat operator*(Cx s, const CMat& x);

CMat adjoint(const CMat& x);
Cx matrix_trace(const CMat& x);
double frobenius_norm(const CMat& x);
// max abs entry, used for scale-relative tolerances
double entry_max(const CMat& x);
// max over entries of |x - x*| / 2, the distance to the self-adjoint part
double hermiticity_defect(const CMat& x);

// Eigensystem of a self-adjoint matrix.  values ascending; vectors[k] is the
// unit eigenvector for values[k]; the set is orthonormal.
struct EigenSystem {
    std::vector<double> values;
    std::vector<std::vector<Cx>> vectors;
};

// The matrix X + iY is mapped to the real symmetric form [[X, -Y], [Y, X]]
// and diagonalised by cyclic Jacobi sweeps (off-diagonal Frobenius norm
// driven to 1e-13 relative).  Real eigenvalues come out doubled; we keep
// every other sorted value and rebuild complex eigenvectors clusterwise so
// that the returned set is orthonormal even for degenerate spectra.
EigenSystem hermitian_eigensystem(const CMat& m);

// Eigenvalues only, ascending.
std::vector<double> hermitian_eigenvalues(const CMat& m);

// Largest |eigenvalue| of a self-adjoint matrix, i.e. its operator norm.
double spectral_norm(const CMat& m);

// Cholesky factorisation g = l l* of a Hermitian positive definite matrix.
// Throws DomainError when a pivot drops below tol * scale.
CMat cholesky_factor(const CMat& g, double rel_tol = 1e-12);

// Solves (l l*) x = b given the lower factor l.
std::vector<Cx> cholesky_solve(const CMat& l, const std::vector<Cx>& b);

} // namespace qmetric
