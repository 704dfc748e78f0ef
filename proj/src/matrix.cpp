#include "qmetric/matrix.hpp"
#include "qmetric/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmetric {

CMat CMat::identity(int dim) {
    CMat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

static void check_same_dim(const CMat& x, const CMat& y, const char* op) {
    if (x.n != y.n)
        throw ShapeError(std::string(op) + ": dimension mismatch " +
                         std::to_string(x.n) + " vs " + std::to_string(y.n));
}

CMat operator+(const CMat& x, const CMat& y) {
    check_same_dim(x, y, "matrix add");
    CMat r(x.n);
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

CMat operator-(const CMat& x, const CMat& y) {
    check_same_dim(x, y, "matrix sub");
    CMat r(x.n);
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

CMat operator*(const CMat& x, const CMat& y) {
    check_same_dim(x, y, "matrix mul");
    const int n = x.n;
    CMat r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const Cx xik = x(i, k);
            if (xik == Cx(0.0, 0.0)) continue;
            for (int j = 0; j < n; ++j) r(i, j) += xik * y(k, j);
        }
    return r;
}

CMat operator*(Cx s, const CMat& x) {
    CMat r(x.n);
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = s * x.a[i];
    return r;
}

CMat adjoint(const CMat& x) {
    CMat r(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(j, i) = std::conj(x(i, j));
    return r;
}

Cx matrix_trace(const CMat& x) {
    Cx t(0.0, 0.0);
    for (int i = 0; i < x.n; ++i) t += x(i, i);
    return t;
}

double frobenius_norm(const CMat& x) {
    double s = 0.0;
    for (const Cx& v : x.a) s += std::norm(v);
    return std::sqrt(s);
}

double entry_max(const CMat& x) {
    double m = 0.0;
    for (const Cx& v : x.a) m = std::max(m, std::abs(v));
    return m;
}

double hermiticity_defect(const CMat& x) {
    double m = 0.0;
    for (int i = 0; i < x.n; ++i)
        for (int j = i; j < x.n; ++j)
            m = std::max(m, 0.5 * std::abs(x(i, j) - std::conj(x(j, i))));
    return m;
}

// ---------------------------------------------------------------------------
// Jacobi diagonalisation of a real symmetric matrix, dense, in place.
// Columns of v (when requested) accumulate the eigenvectors.

namespace {

struct RealSym {
    int n = 0;
    std::vector<double> a;
    double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

double off_diag_norm(const RealSym& b) {
    double s = 0.0;
    for (int i = 0; i < b.n; ++i)
        for (int j = 0; j < b.n; ++j)
            if (i != j) s += b.at(i, j) * b.at(i, j);
    return std::sqrt(s);
}

void jacobi_diagonalise(RealSym& b, RealSym* v) {
    const int n = b.n;
    if (v) {
        v->n = n;
        v->a.assign(static_cast<size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) v->at(i, i) = 1.0;
    }
    double scale = 0.0;
    for (double x : b.a) scale += x * x;
    scale = std::sqrt(scale);
    const double target = 1e-13 * std::max(1.0, scale);

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diag_norm(b) <= target) return;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = b.at(p, q);
                if (std::abs(apq) <= 1e-300) {
                    b.at(p, q) = b.at(q, p) = 0.0;
                    continue;
                }
                const double theta = (b.at(q, q) - b.at(p, p)) / (2.0 * apq);
                double t;
                if (theta >= 0.0)
                    t = 1.0 / (theta + std::sqrt(1.0 + theta * theta));
                else
                    t = -1.0 / (-theta + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // rows p and q
                for (int k = 0; k < n; ++k) {
                    const double bp = b.at(p, k), bq = b.at(q, k);
                    b.at(p, k) = c * bp - s * bq;
                    b.at(q, k) = s * bp + c * bq;
                }
                // columns p and q
                for (int k = 0; k < n; ++k) {
                    const double bp = b.at(k, p), bq = b.at(k, q);
                    b.at(k, p) = c * bp - s * bq;
                    b.at(k, q) = s * bp + c * bq;
                }
                if (v) {
                    for (int k = 0; k < n; ++k) {
                        const double vp = v->at(k, p), vq = v->at(k, q);
                        v->at(k, p) = c * vp - s * vq;
                        v->at(k, q) = s * vp + c * vq;
                    }
                }
            }
        }
    }
    if (off_diag_norm(b) > target)
        throw ConvergenceError("jacobi sweep budget exhausted");
}

// [[X, -Y], [Y, X]] for m = X + iY; symmetric exactly when m is self-adjoint.
RealSym real_embedding(const CMat& m) {
    const int n = m.n;
    RealSym b;
    b.n = 2 * n;
    b.a.assign(static_cast<size_t>(2 * n) * (2 * n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = m(i, j).real();
            const double y = m(i, j).imag();
            b.at(i, j) = x;
            b.at(i + n, j + n) = x;
            b.at(i, j + n) = -y;
            b.at(i + n, j) = y;
        }
    return b;
}

} // namespace

std::vector<double> hermitian_eigenvalues(const CMat& m) {
    if (m.n == 0) return {};
    RealSym b = real_embedding(m);
    jacobi_diagonalise(b, nullptr);
    std::vector<double> all(static_cast<size_t>(b.n));
    for (int i = 0; i < b.n; ++i) all[static_cast<size_t>(i)] = b.at(i, i);
    std::sort(all.begin(), all.end());
    // eigenvalues of the real form come in duplicated pairs
    std::vector<double> vals(static_cast<size_t>(m.n));
    for (int i = 0; i < m.n; ++i) vals[static_cast<size_t>(i)] = all[static_cast<size_t>(2 * i)];
    return vals;
}

EigenSystem hermitian_eigensystem(const CMat& m) {
    EigenSystem es;
    const int n = m.n;
    if (n == 0) return es;

    RealSym b = real_embedding(m);
    RealSym v;
    jacobi_diagonalise(b, &v);

    const int nn = 2 * n;
    std::vector<int> order(static_cast<size_t>(nn));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return b.at(i, i) < b.at(j, j); });

    double amax = 0.0;
    for (int i = 0; i < nn; ++i) amax = std::max(amax, std::abs(b.at(i, i)));
    const double cluster_tol = 1e-11 * (1.0 + amax);

    es.values.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        es.values[static_cast<size_t>(i)] = b.at(order[static_cast<size_t>(2 * i)], order[static_cast<size_t>(2 * i)]);
    es.vectors.reserve(static_cast<size_t>(n));

    // Walk clusters of numerically equal eigenvalues.  A cluster of real
    // multiplicity 2k carries a k-dimensional complex eigenspace; the real
    // eigenvectors are an arbitrary basis of the doubled space, so we project
    // back to complex vectors and re-orthonormalise within the cluster.
    int pos = 0;
    while (pos < nn) {
        int end = pos + 1;
        while (end < nn &&
               b.at(order[static_cast<size_t>(end)], order[static_cast<size_t>(end)]) -
                       b.at(order[static_cast<size_t>(end - 1)], order[static_cast<size_t>(end - 1)]) <=
                   cluster_tol)
            ++end;
        const int cluster_size = end - pos;
        const int keep = cluster_size / 2;
        if (2 * keep != cluster_size)
            throw InternalError("eigenvalue cluster of odd real multiplicity");

        // candidates w = u + iv from every real eigenvector in the cluster
        std::vector<std::vector<Cx>> cand;
        cand.reserve(static_cast<size_t>(cluster_size));
        for (int c = pos; c < end; ++c) {
            const int col = order[static_cast<size_t>(c)];
            std::vector<Cx> w(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i)
                w[static_cast<size_t>(i)] = Cx(v.at(i, col), v.at(i + n, col));
            cand.push_back(std::move(w));
        }

        // modified Gram-Schmidt with pivoting on the residual norm
        std::vector<std::vector<Cx>> picked;
        while (static_cast<int>(picked.size()) < keep) {
            int best = -1;
            double best_norm = 0.0;
            for (size_t c = 0; c < cand.size(); ++c) {
                double s = 0.0;
                for (const Cx& x : cand[c]) s += std::norm(x);
                if (s > best_norm) {
                    best_norm = s;
                    best = static_cast<int>(c);
                }
            }
            if (best < 0 || best_norm < 1e-12)
                throw InternalError("could not extract a full eigenvector set");
            std::vector<Cx> w = cand[static_cast<size_t>(best)];
            const double inv = 1.0 / std::sqrt(best_norm);
            for (Cx& x : w) x *= inv;
            for (std::vector<Cx>& c : cand) {
                Cx ip(0.0, 0.0);
                for (int i = 0; i < n; ++i)
                    ip += std::conj(w[static_cast<size_t>(i)]) * c[static_cast<size_t>(i)];
                for (int i = 0; i < n; ++i)
                    c[static_cast<size_t>(i)] -= ip * w[static_cast<size_t>(i)];
            }
            picked.push_back(std::move(w));
        }
        for (std::vector<Cx>& w : picked) es.vectors.push_back(std::move(w));
        pos = end;
    }
    if (static_cast<int>(es.vectors.size()) != n)
        throw InternalError("eigenvector count mismatch");
    return es;
}

double spectral_norm(const CMat& m) {
    if (m.n == 0) return 0.0;
    const std::vector<double> vals = hermitian_eigenvalues(m);
    return std::max(std::abs(vals.front()), std::abs(vals.back()));
}

CMat cholesky_factor(const CMat& g, double rel_tol) {
    const int n = g.n;
    CMat l(n);
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) dmax = std::max(dmax, std::abs(g(i, i)));
    const double pivot_floor = rel_tol * std::max(1.0, dmax);
    for (int j = 0; j < n; ++j) {
        Cx diag = g(j, j);
        for (int k = 0; k < j; ++k) diag -= l(j, k) * std::conj(l(j, k));
        const double d = diag.real();
        if (d <= pivot_floor)
            throw DomainError("matrix not positive definite at pivot " + std::to_string(j));
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            Cx s = g(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / l(j, j).real();
        }
    }
    return l;
}

std::vector<Cx> cholesky_solve(const CMat& l, const std::vector<Cx>& b) {
    const int n = l.n;
    if (static_cast<int>(b.size()) != n)
        throw ShapeError("cholesky solve: rhs length mismatch");
    std::vector<Cx> y(b);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k) y[static_cast<size_t>(i)] -= l(i, k) * y[static_cast<size_t>(k)];
        y[static_cast<size_t>(i)] /= l(i, i).real();
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k)
            y[static_cast<size_t>(i)] -= std::conj(l(k, i)) * y[static_cast<size_t>(k)];
        y[static_cast<size_t>(i)] /= l(i, i).real();
    }
    return y;
}

} // namespace qmetric
