#include "qmetric/mk.hpp"
#include "qmetric/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qmetric {

namespace {

// Real coordinates of self-adjoint blockwise matrices: per block, the
// diagonal entries, then (real, imag) parts of each upper off-diagonal.
struct HermCoords {
    struct Coord {
        int block;
        int i;
        int j;
        int kind; // 0 diagonal, 1 off-diagonal real part, 2 off-diagonal imag part
    };
    BlockAlgebra algebra;
    std::vector<Coord> coords;

    explicit HermCoords(const BlockAlgebra& alg) : algebra(alg) {
        for (int l = 0; l < alg.num_blocks(); ++l) {
            const int m = alg.block_sizes[static_cast<size_t>(l)];
            for (int i = 0; i < m; ++i) coords.push_back({l, i, i, 0});
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) {
                    coords.push_back({l, i, j, 1});
                    coords.push_back({l, i, j, 2});
                }
        }
    }

    int count() const { return static_cast<int>(coords.size()); }

    AlgebraElement build(const double* z) const {
        AlgebraElement a = AlgebraElement::zero(algebra);
        for (size_t k = 0; k < coords.size(); ++k) {
            const Coord& c = coords[k];
            CMat& blk = a.blocks[static_cast<size_t>(c.block)];
            const double v = z[k];
            switch (c.kind) {
            case 0: blk(c.i, c.i) += v; break;
            case 1:
                blk(c.i, c.j) += v;
                blk(c.j, c.i) += v;
                break;
            default:
                blk(c.i, c.j) += Cx(0.0, v);
                blk(c.j, c.i) -= Cx(0.0, v);
            }
        }
        return a;
    }

    // coefficients of z -> Re Tr(w a(z)) for a fixed matrix w per block
    std::vector<double> pairing_row(const AlgebraElement& w) const {
        std::vector<double> out(coords.size(), 0.0);
        for (size_t k = 0; k < coords.size(); ++k) {
            const Coord& c = coords[k];
            const CMat& blk = w.blocks[static_cast<size_t>(c.block)];
            switch (c.kind) {
            case 0: out[k] = blk(c.i, c.i).real(); break;
            case 1: out[k] = (blk(c.j, c.i) + blk(c.i, c.j)).real(); break;
            default: out[k] = (Cx(0.0, 1.0) * (blk(c.j, c.i) - blk(c.i, c.j))).real();
            }
        }
        return out;
    }

    // w* B_k w for a vector w supported in one block; zero elsewhere
    void quad_basis(int block, const std::vector<Cx>& w, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for (size_t k = 0; k < coords.size(); ++k) {
            const Coord& c = coords[k];
            if (c.block != block) continue;
            const Cx z = std::conj(w[static_cast<size_t>(c.i)]) * w[static_cast<size_t>(c.j)];
            switch (c.kind) {
            case 0: out[k] = std::norm(w[static_cast<size_t>(c.i)]); break;
            case 1: out[k] = 2.0 * z.real(); break;
            default: out[k] = -2.0 * z.imag();
            }
        }
    }
};

double quad_form(const CMat& m, const std::vector<Cx>& w) {
    Cx s(0.0, 0.0);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
            s += std::conj(w[static_cast<size_t>(i)]) * m(i, j) * w[static_cast<size_t>(j)];
    return s.real();
}

void check_state(const CxaState& s, const char* where) {
    if (!s.space || !s.chain) throw ShapeError(std::string(where) + ": state missing references");
    if (static_cast<int>(s.densities.size()) != s.space->size())
        throw ShapeError(std::string(where) + ": density count mismatch");
}

void check_state_pair(const CxaState& a, const CxaState& b, const char* where) {
    check_state(a, where);
    check_state(b, where);
    if (!same_space(a.space, b.space))
        throw ShapeError(std::string(where) + ": states live over different spaces");
    if (!same_chain(a.chain, b.chain))
        throw ShapeError(std::string(where) + ": states live over different chains");
}

// Shared pieces of the cutting-plane solver and the commutative oracle.
struct MkWorkspace {
    const FiniteMetricSpace& X;
    const AfChain& chain;
    HermCoords hc;
    int np;
    int K;
    int T;
    double diam;
    double box;
    int nvars;
    int qbase;
    int uvar;
    int vvar;
    std::vector<double> cphi; // np*K pairing coefficients of the objective state
    std::vector<double> cpsi; // same for the anchored state
    // rel[n][k] = B_k - E_n(B_k), the constraint image of each coordinate
    std::vector<std::vector<AlgebraElement>> rel;

    MkWorkspace(const CxaState& phi, const CxaState& psi)
        : X(*phi.space), chain(*phi.chain), hc(chain.top()) {
        np = X.size();
        K = hc.count();
        T = chain.top_level();
        diam = X.diameter();
        box = diam + 2.0 * chain.beta_at(0) + 1.0;
        nvars = 2 * np * K + 2;
        qbase = np * K;
        uvar = 2 * np * K;
        vvar = uvar + 1;
        cphi.resize(static_cast<size_t>(np) * K);
        cpsi.resize(static_cast<size_t>(np) * K);
        for (int x = 0; x < np; ++x) {
            const std::vector<double> rp = hc.pairing_row(phi.densities[static_cast<size_t>(x)]);
            const std::vector<double> rq = hc.pairing_row(psi.densities[static_cast<size_t>(x)]);
            std::copy(rp.begin(), rp.end(), cphi.begin() + static_cast<long>(x) * K);
            std::copy(rq.begin(), rq.end(), cpsi.begin() + static_cast<long>(x) * K);
        }
        rel.resize(static_cast<size_t>(T));
        std::vector<double> unit(static_cast<size_t>(K), 0.0);
        for (int n = 0; n < T; ++n) {
            rel[static_cast<size_t>(n)].reserve(static_cast<size_t>(K));
            for (int k = 0; k < K; ++k) {
                std::fill(unit.begin(), unit.end(), 0.0);
                unit[static_cast<size_t>(k)] = 1.0;
                const AlgebraElement bk = hc.build(unit.data());
                rel[static_cast<size_t>(n)].push_back(
                    sub(bk, conditional_expectation(chain, n, bk)));
            }
        }
    }

    LinearProgram base_lp() const {
        LinearProgram lp = LinearProgram::with_vars(nvars);
        for (int x = 0; x < np; ++x)
            for (int k = 0; k < K; ++k) {
                const double c = cphi[static_cast<size_t>(x) * K + k];
                lp.objective[static_cast<size_t>(x * K + k)] = c;
                lp.objective[static_cast<size_t>(qbase + x * K + k)] = -c;
                lp.upper[static_cast<size_t>(x * K + k)] = box;
                lp.upper[static_cast<size_t>(qbase + x * K + k)] = box;
            }
        // redundant boxes on the split variables keep the dual certificate
        // finite: every variable then has a bound row to absorb deficits
        lp.upper[static_cast<size_t>(uvar)] = 1.0;
        lp.upper[static_cast<size_t>(vvar)] = 1.0;
        // anchor psi(a) = 0 as a pair of opposite inequalities
        std::vector<double> anchor(static_cast<size_t>(nvars), 0.0);
        for (int x = 0; x < np; ++x)
            for (int k = 0; k < K; ++k) {
                const double c = cpsi[static_cast<size_t>(x) * K + k];
                anchor[static_cast<size_t>(x * K + k)] = c;
                anchor[static_cast<size_t>(qbase + x * K + k)] = -c;
            }
        std::vector<double> anchor_neg(anchor);
        for (double& v : anchor_neg) v = -v;
        lp.add_row(std::move(anchor), 0.0);
        lp.add_row(std::move(anchor_neg), 0.0);
        // split budget u + v <= 1
        std::vector<double> uv(static_cast<size_t>(nvars), 0.0);
        uv[static_cast<size_t>(uvar)] = 1.0;
        uv[static_cast<size_t>(vvar)] = 1.0;
        lp.add_row(std::move(uv), 1.0);
        return lp;
    }

    // cut rows: sign * w*(a(x)-a(y))w <= u d(x,y)
    std::vector<double> pair_cut_row(int x, int y, double sign,
                                     const std::vector<double>& q) const {
        std::vector<double> row(static_cast<size_t>(nvars), 0.0);
        for (int k = 0; k < K; ++k) {
            const double c = sign * q[static_cast<size_t>(k)];
            row[static_cast<size_t>(x * K + k)] += c;
            row[static_cast<size_t>(qbase + x * K + k)] -= c;
            row[static_cast<size_t>(y * K + k)] -= c;
            row[static_cast<size_t>(qbase + y * K + k)] += c;
        }
        row[static_cast<size_t>(uvar)] = -X.d(x, y);
        return row;
    }

    // cut rows: sign * w*(a(x) - E_n a(x))w <= v beta(n)
    std::vector<double> level_cut_row(int x, int n, double sign,
                                      const std::vector<double>& q) const {
        std::vector<double> row(static_cast<size_t>(nvars), 0.0);
        for (int k = 0; k < K; ++k) {
            const double c = sign * q[static_cast<size_t>(k)];
            row[static_cast<size_t>(x * K + k)] += c;
            row[static_cast<size_t>(qbase + x * K + k)] -= c;
        }
        row[static_cast<size_t>(vvar)] = -chain.beta_at(n);
        return row;
    }

    // w* rel[n][k] w over all coordinates, for level cuts
    std::vector<double> level_quad(int n, int block, const std::vector<Cx>& w) const {
        std::vector<double> q(static_cast<size_t>(K), 0.0);
        for (int k = 0; k < K; ++k)
            q[static_cast<size_t>(k)] =
                quad_form(rel[static_cast<size_t>(n)][static_cast<size_t>(k)]
                              .blocks[static_cast<size_t>(block)],
                          w);
        return q;
    }

    std::vector<AlgebraElement> decode(const std::vector<double>& sol) const {
        std::vector<AlgebraElement> values;
        values.reserve(static_cast<size_t>(np));
        std::vector<double> z(static_cast<size_t>(K));
        for (int x = 0; x < np; ++x) {
            for (int k = 0; k < K; ++k)
                z[static_cast<size_t>(k)] = sol[static_cast<size_t>(x * K + k)] -
                                            sol[static_cast<size_t>(qbase + x * K + k)];
            values.push_back(hc.build(z.data()));
        }
        return values;
    }
};

} // namespace

CxaState make_cxa_state(SpacePtr space, ChainPtr chain, std::vector<AlgebraElement> densities) {
    if (!space || !chain) throw ShapeError("state needs a space and a chain");
    if (static_cast<int>(densities.size()) != space->size())
        throw ShapeError("state has " + std::to_string(densities.size()) + " densities for " +
                         std::to_string(space->size()) + " points");
    double total = 0.0;
    for (const AlgebraElement& rho : densities) {
        if (rho.algebra != chain->top())
            throw ShapeError("density lives on " + rho.algebra.describe() + ", chain top is " +
                             chain->top().describe());
        for (const std::vector<double>& block_vals : hermitian_spectrum(rho))
            for (double v : block_vals)
                if (v < -1e-10)
                    throw DomainError("density has negative eigenvalue " + std::to_string(v));
        for (const CMat& blk : rho.blocks) total += matrix_trace(blk).real();
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw DomainError("state trace is " + std::to_string(total) + ", must be 1");
    CxaState s;
    s.space = std::move(space);
    s.chain = std::move(chain);
    s.densities = std::move(densities);
    return s;
}

CxaState point_state(const SpacePtr& space, const ChainPtr& chain, int x) {
    if (!space || !chain) throw ShapeError("point_state needs a space and a chain");
    if (x < 0 || x >= space->size())
        throw DomainError("point_state: index " + std::to_string(x) + " out of range");
    std::vector<AlgebraElement> densities;
    densities.reserve(static_cast<size_t>(space->size()));
    const TraceState& tau = chain->top_trace();
    for (int p = 0; p < space->size(); ++p) {
        AlgebraElement rho = AlgebraElement::zero(chain->top());
        if (p == x)
            for (size_t l = 0; l < rho.blocks.size(); ++l)
                for (int i = 0; i < rho.blocks[l].n; ++i)
                    rho.blocks[l](i, i) = tau.weights[l];
        densities.push_back(std::move(rho));
    }
    return make_cxa_state(space, chain, std::move(densities));
}

CxaState point_state(const SpacePtr& space, const ChainPtr& chain, const std::string& label) {
    if (!space) throw ShapeError("point_state needs a space");
    const int x = space->find_label(label);
    if (x < 0) throw DomainError("point_state: unknown point '" + label + "'");
    return point_state(space, chain, x);
}

double state_apply(const CxaState& phi, const CxaElement& g) {
    check_state(phi, "state_apply");
    if (!same_space(phi.space, g.space) || !same_chain(phi.chain, g.chain))
        throw ShapeError("state_apply: state and element disagree on space or chain");
    require_self_adjoint(g, "state_apply");
    double s = 0.0;
    for (size_t x = 0; x < phi.densities.size(); ++x) {
        const AlgebraElement& rho = phi.densities[x];
        const AlgebraElement& val = g.values[x];
        for (size_t l = 0; l < rho.blocks.size(); ++l) {
            const CMat& r = rho.blocks[l];
            const CMat& v = val.blocks[l];
            Cx tr(0.0, 0.0);
            for (int i = 0; i < r.n; ++i)
                for (int j = 0; j < r.n; ++j) tr += r(i, j) * v(j, i);
            s += tr.real();
        }
    }
    return s;
}

MkResult mk_distance(const CxaState& phi, const CxaState& psi, const MkOptions& opt) {
    check_state_pair(phi, psi, "mk_distance");
    if (!(opt.tol >= 1e-9))
        throw DomainError("mk_distance: tol must be >= 1e-9");
    if (opt.max_cuts < 1) throw DomainError("mk_distance: max_cuts must be positive");

    MkWorkspace ws(phi, psi);
    const LinearProgram base = ws.base_lp();

    // Managed pool of cut rows; the birth round feeds the ageing policy of
    // the purge below.  Every cut keeps its trust coefficients inside the
    // row, so the right-hand side is exactly zero.
    struct Cut {
        std::vector<double> row;
        int born = 0;
    };
    std::vector<Cut> cuts;
    int cuts_used = 0;
    auto push_cut = [&](std::vector<double> row, int born) {
        cuts.push_back(Cut{std::move(row), born});
        ++cuts_used;
    };

    // seed every norm constraint with standard-basis cuts plus eigencuts of
    // the constraint image of the objective-gradient element
    {
        std::vector<double> q(static_cast<size_t>(ws.K), 0.0);
        std::vector<AlgebraElement> grad;
        grad.reserve(static_cast<size_t>(ws.np));
        for (int x = 0; x < ws.np; ++x)
            grad.push_back(ws.hc.build(ws.cphi.data() + static_cast<long>(x) * ws.K));

        for (int x = 0; x < ws.np; ++x)
            for (int y = x + 1; y < ws.np; ++y) {
                for (int l = 0; l < ws.chain.top().num_blocks(); ++l) {
                    const int m = ws.chain.top().block_sizes[static_cast<size_t>(l)];
                    std::vector<Cx> e(static_cast<size_t>(m), Cx(0.0, 0.0));
                    for (int i = 0; i < m; ++i) {
                        std::fill(e.begin(), e.end(), Cx(0.0, 0.0));
                        e[static_cast<size_t>(i)] = 1.0;
                        ws.hc.quad_basis(l, e, q);
                        push_cut(ws.pair_cut_row(x, y, +1.0, q), 0);
                        push_cut(ws.pair_cut_row(x, y, -1.0, q), 0);
                    }
                }
                const AlgebraElement diff = sub(grad[static_cast<size_t>(x)],
                                                grad[static_cast<size_t>(y)]);
                if (is_self_adjoint(diff)) {
                    const std::vector<EigenSystem> es = hermitian_eigensystems(diff);
                    for (size_t l = 0; l < es.size(); ++l)
                        for (const std::vector<Cx>& w : es[l].vectors) {
                            ws.hc.quad_basis(static_cast<int>(l), w, q);
                            push_cut(ws.pair_cut_row(x, y, +1.0, q), 0);
                            push_cut(ws.pair_cut_row(x, y, -1.0, q), 0);
                        }
                }
            }
        for (int x = 0; x < ws.np; ++x)
            for (int n = 0; n < ws.T; ++n) {
                for (int l = 0; l < ws.chain.top().num_blocks(); ++l) {
                    const int m = ws.chain.top().block_sizes[static_cast<size_t>(l)];
                    std::vector<Cx> e(static_cast<size_t>(m), Cx(0.0, 0.0));
                    for (int i = 0; i < m; ++i) {
                        std::fill(e.begin(), e.end(), Cx(0.0, 0.0));
                        e[static_cast<size_t>(i)] = 1.0;
                        push_cut(ws.level_cut_row(x, n, +1.0, ws.level_quad(n, l, e)), 0);
                        push_cut(ws.level_cut_row(x, n, -1.0, ws.level_quad(n, l, e)), 0);
                    }
                }
                const AlgebraElement img =
                    sub(grad[static_cast<size_t>(x)],
                        conditional_expectation(ws.chain, n, grad[static_cast<size_t>(x)]));
                if (is_self_adjoint(img)) {
                    const std::vector<EigenSystem> es = hermitian_eigensystems(img);
                    for (size_t l = 0; l < es.size(); ++l)
                        for (const std::vector<Cx>& w : es[l].vectors) {
                            const std::vector<double> lq = ws.level_quad(n, static_cast<int>(l), w);
                            push_cut(ws.level_cut_row(x, n, +1.0, lq), 0);
                            push_cut(ws.level_cut_row(x, n, -1.0, lq), 0);
                        }
                }
            }
    }

    MkResult out;
    out.witness = make_cxa_element(phi.space, phi.chain,
                                   std::vector<AlgebraElement>(
                                       static_cast<size_t>(ws.np),
                                       AlgebraElement::zero(ws.chain.top())));
    double best = -1.0;
    double upper_run = std::numeric_limits<double>::infinity();
    const int max_rounds = 600;

    for (int round = 0; round < max_rounds; ++round) {
        LinearProgram lp = base;
        for (const Cut& c : cuts) lp.add_row(c.row, 0.0);
        // relaxed ties: the pool LPs are heavily degenerate and the exact
        // optimum of each round is never used directly, only the certificate
        const SimplexResult res = simplex_solve(lp, true);
        if (res.status != LpStatus::Optimal)
            throw InternalError("mk LP should be feasible and bounded by construction");
        if (!std::isfinite(res.certified_upper))
            throw InternalError("mk LP certificate escaped its box");
        // every round's pool is still a relaxation of the true constraint
        // set, so each certificate is a valid bound; keep the best one seen
        upper_run = std::min(upper_run, res.certified_upper);
        const double upper = upper_run;

        CxaElement cur = make_cxa_element(phi.space, phi.chain, ws.decode(res.solution));
        const double lip = total_lip(cur);
        const double diff = state_apply(phi, cur) - state_apply(psi, cur);
        const double denom = std::max(1.0, lip);
        const double cand = std::abs(diff) / denom;
        if (cand > best) {
            best = cand;
            out.witness = cxa_scale(Cx(1.0 / denom, 0.0), cur);
        }
        out.upper_bound = upper;
        out.value = std::max(best, 0.0);
        out.cuts_used = cuts_used;
        if (upper - out.value <= opt.tol) return out;

        // hunt for violated norm constraints
        const double u_lp = res.solution[static_cast<size_t>(ws.uvar)];
        const double v_lp = res.solution[static_cast<size_t>(ws.vvar)];
        // the floor must clear the solver's internal right-hand-side
        // relaxation (~1e-9) or satisfied constraints would be re-added as
        // cuts forever
        const double add_floor =
            std::max({opt.tol / 16.0, 4e-9, 1e-13 * (1.0 + std::abs(upper))});
        struct Candidate {
            double viol = 0.0;
            std::vector<double> row;
        };
        std::vector<Candidate> found;
        std::vector<double> q(static_cast<size_t>(ws.K), 0.0);
        for (int x = 0; x < ws.np; ++x)
            for (int y = x + 1; y < ws.np; ++y) {
                const AlgebraElement m = sub(cur.values[static_cast<size_t>(x)],
                                             cur.values[static_cast<size_t>(y)]);
                const double rhs = u_lp * ws.X.d(x, y);
                const std::vector<EigenSystem> es = hermitian_eigensystems(m);
                for (size_t l = 0; l < es.size(); ++l)
                    for (size_t k = 0; k < es[l].values.size(); ++k) {
                        const double mu = es[l].values[k];
                        if (mu - rhs > add_floor) {
                            ws.hc.quad_basis(static_cast<int>(l), es[l].vectors[k], q);
                            found.push_back({mu - rhs, ws.pair_cut_row(x, y, +1.0, q)});
                        }
                        if (-mu - rhs > add_floor) {
                            ws.hc.quad_basis(static_cast<int>(l), es[l].vectors[k], q);
                            found.push_back({-mu - rhs, ws.pair_cut_row(x, y, -1.0, q)});
                        }
                    }
            }
        for (int x = 0; x < ws.np; ++x)
            for (int n = 0; n < ws.T; ++n) {
                const AlgebraElement m =
                    sub(cur.values[static_cast<size_t>(x)],
                        conditional_expectation(ws.chain, n, cur.values[static_cast<size_t>(x)]));
                const double rhs = v_lp * ws.chain.beta_at(n);
                const std::vector<EigenSystem> es = hermitian_eigensystems(m);
                for (size_t l = 0; l < es.size(); ++l)
                    for (size_t k = 0; k < es[l].values.size(); ++k) {
                        const double mu = es[l].values[k];
                        if (mu - rhs > add_floor)
                            found.push_back(
                                {mu - rhs,
                                 ws.level_cut_row(x, n, +1.0,
                                                  ws.level_quad(n, static_cast<int>(l),
                                                                es[l].vectors[k]))});
                        if (-mu - rhs > add_floor)
                            found.push_back(
                                {-mu - rhs,
                                 ws.level_cut_row(x, n, -1.0,
                                                  ws.level_quad(n, static_cast<int>(l),
                                                                es[l].vectors[k]))});
                    }
            }
        if (found.empty()) {
            // nothing left to cut; the remaining gap is float-level
            if (upper - out.value <= opt.tol * 1.5) return out;
            throw ConvergenceError("mk_distance stalled with gap " +
                                       std::to_string(upper - out.value),
                                   out.value, upper);
        }
        // deepest violations first, and only a bounded batch per round so
        // the working LP stays lean
        const size_t max_new = 96;
        if (found.size() > max_new) {
            std::partial_sort(found.begin(), found.begin() + static_cast<long>(max_new),
                              found.end(),
                              [](const Candidate& a, const Candidate& b) { return a.viol > b.viol; });
            found.resize(max_new);
        }
        for (Candidate& c : found) push_cut(std::move(c.row), round + 1);
        if (cuts_used > opt.max_cuts)
            throw ConvergenceError("mk_distance exceeded the cut budget (" +
                                       std::to_string(cuts_used) + " cuts)",
                                   out.value, upper);

        // retire clearly slack cuts, but only when the pool is actually
        // heavy: purging near the optimum drops rows that define it under
        // degeneracy and the loop then thrashes relearning them
        if (cuts.size() > 400) {
            const double drop_slack = 1e-3 * (1.0 + std::abs(upper));
            std::vector<Cut> kept;
            kept.reserve(cuts.size());
            for (Cut& c : cuts) {
                bool keep = round + 1 - c.born < 5;
                if (!keep) {
                    double act = 0.0;
                    for (int v = 0; v < ws.nvars; ++v)
                        act += c.row[static_cast<size_t>(v)] * res.solution[static_cast<size_t>(v)];
                    keep = -act <= drop_slack;
                }
                if (keep) kept.push_back(std::move(c));
            }
            cuts.swap(kept);
        }
    }
    throw ConvergenceError("mk_distance did not converge within the round budget",
                           out.value, out.upper_bound);
}

double mk_bruteforce_commutative(const CxaState& phi, const CxaState& psi) {
    check_state_pair(phi, psi, "mk_bruteforce_commutative");
    for (int m : phi.chain->top().block_sizes)
        if (m != 1)
            throw DomainError("mk_bruteforce_commutative needs a commutative top algebra "
                              "(all blocks 1x1)");

    MkWorkspace ws(phi, psi);
    LinearProgram lp = ws.base_lp();
    // with 1x1 blocks every coordinate is a diagonal coordinate, so the norm
    // constraints expand exactly into +/- rows
    std::vector<double> q(static_cast<size_t>(ws.K), 0.0);
    for (int x = 0; x < ws.np; ++x)
        for (int y = x + 1; y < ws.np; ++y)
            for (int k = 0; k < ws.K; ++k) {
                std::fill(q.begin(), q.end(), 0.0);
                q[static_cast<size_t>(k)] = 1.0;
                lp.add_row(ws.pair_cut_row(x, y, +1.0, q), 0.0);
                lp.add_row(ws.pair_cut_row(x, y, -1.0, q), 0.0);
            }
    for (int x = 0; x < ws.np; ++x)
        for (int n = 0; n < ws.T; ++n)
            for (int l = 0; l < ws.K; ++l) {
                for (int k = 0; k < ws.K; ++k)
                    q[static_cast<size_t>(k)] = ws.rel[static_cast<size_t>(n)][static_cast<size_t>(k)]
                                                    .blocks[static_cast<size_t>(l)](0, 0)
                                                    .real();
                lp.add_row(ws.level_cut_row(x, n, +1.0, q), 0.0);
                lp.add_row(ws.level_cut_row(x, n, -1.0, q), 0.0);
            }
    const SimplexResult res = simplex_solve(lp);
    if (res.status != LpStatus::Optimal)
        throw InternalError("commutative mk LP should be feasible and bounded");
    return res.optimum;
}

AlgebraElement random_self_adjoint(const BlockAlgebra& alg, Rng& rng) {
    AlgebraElement g = AlgebraElement::zero(alg);
    for (CMat& blk : g.blocks) {
        CMat raw(blk.n);
        for (int i = 0; i < blk.n; ++i)
            for (int j = 0; j < blk.n; ++j) raw(i, j) = Cx(rng.gaussian(), rng.gaussian());
        blk = Cx(0.5, 0.0) * (raw + adjoint(raw));
    }
    return g;
}

CxaElement random_cxa_element(const SpacePtr& space, const ChainPtr& chain, Rng& rng) {
    std::vector<AlgebraElement> values;
    values.reserve(static_cast<size_t>(space->size()));
    for (int x = 0; x < space->size(); ++x)
        values.push_back(random_self_adjoint(chain->top(), rng));
    return make_cxa_element(space, chain, std::move(values));
}

CxaState random_state(const SpacePtr& space, const ChainPtr& chain, Rng& rng) {
    std::vector<AlgebraElement> densities;
    densities.reserve(static_cast<size_t>(space->size()));
    double total = 0.0;
    for (int x = 0; x < space->size(); ++x) {
        AlgebraElement rho = AlgebraElement::zero(chain->top());
        for (CMat& blk : rho.blocks) {
            CMat b(blk.n);
            for (int i = 0; i < blk.n; ++i)
                for (int j = 0; j < blk.n; ++j) b(i, j) = Cx(rng.gaussian(), rng.gaussian());
            blk = adjoint(b) * b;
            total += matrix_trace(blk).real();
        }
        densities.push_back(std::move(rho));
    }
    if (!(total > 0.0)) throw InternalError("random state degenerated to zero");
    for (AlgebraElement& rho : densities)
        for (CMat& blk : rho.blocks) blk = Cx(1.0 / total, 0.0) * blk;
    return make_cxa_state(space, chain, std::move(densities));
}

DiameterProbeResult diameter_probe(const SpacePtr& space, const ChainPtr& chain, int samples,
                                   std::uint64_t seed, double tol) {
    if (!space || !chain) throw ShapeError("diameter_probe needs a space and a chain");
    if (samples < 1) throw DomainError("diameter_probe: samples must be >= 1");
    Rng rng(seed);
    DiameterProbeResult out;
    out.bound = space->diameter() + 2.0 * chain->beta_at(0);
    MkOptions opt;
    opt.tol = tol;
    for (int i = 0; i < samples; ++i) {
        const CxaState a = random_state(space, chain, rng);
        const CxaState b = random_state(space, chain, rng);
        const MkResult r = mk_distance(a, b, opt);
        out.rows.push_back({i, r.value});
        out.max_observed = std::max(out.max_observed, r.value);
    }
    return out;
}

} // namespace qmetric
