#include "qmetric/simplex.hpp"
#include "qmetric/errors.hpp"
#include "qmetric/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qmetric {

LinearProgram LinearProgram::with_vars(int n) {
    LinearProgram lp;
    lp.num_vars = n;
    lp.objective.assign(static_cast<size_t>(n), 0.0);
    lp.lower.assign(static_cast<size_t>(n), 0.0);
    lp.upper.assign(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
    return lp;
}

void LinearProgram::add_row(std::vector<double> coeffs, double bound) {
    if (static_cast<int>(coeffs.size()) != num_vars)
        throw ShapeError("LP row has " + std::to_string(coeffs.size()) + " coefficients for " +
                         std::to_string(num_vars) + " variables");
    rows.push_back(std::move(coeffs));
    rhs.push_back(bound);
}

namespace {

constexpr double kCostEps = 1e-9;   // entering threshold on reduced costs
constexpr double kPivotEps = 1e-9;  // ratio-test denominator threshold

// Dictionary tableau for max c.x, A x <= b, x >= 0.  Constraint rows follow
// basic_i = rhs_i - sum_k D[i][k] * nonbasic_k; the objective row follows
// z = objval + sum_k obj[k] * nonbasic_k.
struct Tableau {
    int m = 0;        // active rows
    int cols = 0;     // active nonbasic columns
    int stride = 0;   // allocated row width
    std::vector<double> d;
    std::vector<double> rhs;
    std::vector<double> obj;
    double objval = 0.0;
    std::vector<int> basic;    // variable id per row
    std::vector<int> nonbasic; // variable id per column
    int pivots = 0;
    bool bland = false;
    int stall = 0;
    int stall_limit = 60;

    double& at(int i, int k) { return d[static_cast<size_t>(i) * stride + k]; }
    double at(int i, int k) const { return d[static_cast<size_t>(i) * stride + k]; }

    void pivot(int r, int j) {
        const double p = at(r, j);
        const double inv = 1.0 / p;
        for (int k = 0; k < cols; ++k) at(r, k) *= inv;
        at(r, j) = inv;
        rhs[static_cast<size_t>(r)] *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == r) continue;
            const double f = at(i, j);
            if (f == 0.0) continue;
            for (int k = 0; k < cols; ++k) at(i, k) -= f * at(r, k);
            at(i, j) = -f * at(r, j);
            rhs[static_cast<size_t>(i)] -= f * rhs[static_cast<size_t>(r)];
        }
        const double f = obj[static_cast<size_t>(j)];
        if (f != 0.0) {
            for (int k = 0; k < cols; ++k) obj[static_cast<size_t>(k)] -= f * at(r, k);
            obj[static_cast<size_t>(j)] = -f * at(r, j);
            objval += f * rhs[static_cast<size_t>(r)];
        }
        std::swap(basic[static_cast<size_t>(r)], nonbasic[static_cast<size_t>(j)]);
        ++pivots;
    }

    // returns false when the current dictionary is optimal; throws
    // ConvergenceError on pivot budget exhaustion, sets unbounded flag
    bool step(bool& unbounded, int pivot_cap) {
        int enter = -1;
        if (bland) {
            int best_id = std::numeric_limits<int>::max();
            for (int k = 0; k < cols; ++k)
                if (obj[static_cast<size_t>(k)] > kCostEps &&
                    nonbasic[static_cast<size_t>(k)] < best_id) {
                    best_id = nonbasic[static_cast<size_t>(k)];
                    enter = k;
                }
        } else {
            double best = kCostEps;
            for (int k = 0; k < cols; ++k)
                if (obj[static_cast<size_t>(k)] > best) {
                    best = obj[static_cast<size_t>(k)];
                    enter = k;
                }
        }
        if (enter < 0) return false;

        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        double best_den = 0.0;
        for (int i = 0; i < m; ++i) {
            const double den = at(i, enter);
            if (den <= kPivotEps) continue;
            const double ratio = rhs[static_cast<size_t>(i)] / den;
            if (ratio < best_ratio - 1e-12) {
                best_ratio = ratio;
                best_den = den;
                leave = i;
            } else if (ratio < best_ratio + 1e-12) {
                // tie: under Bland take the smallest id so the anti-cycling
                // argument applies; otherwise take the fattest pivot, which
                // is what keeps the tableau from rotting numerically
                const bool take =
                    bland ? (leave < 0 || basic[static_cast<size_t>(i)] < basic[static_cast<size_t>(leave)])
                          : (den > best_den);
                if (take) {
                    if (ratio < best_ratio) best_ratio = ratio;
                    best_den = den;
                    leave = i;
                }
            }
        }
        if (leave < 0) {
            unbounded = true;
            return false;
        }
        const double before = objval;
        pivot(leave, enter);
        if (pivots > pivot_cap)
            throw ConvergenceError("simplex pivot budget exhausted after " +
                                   std::to_string(pivots) + " pivots");
        if (objval > before + 1e-12) {
            stall = 0;
        } else if (++stall > stall_limit) {
            // anti-cycling from here on; switching back after progress can
            // bounce between modes forever on heavily degenerate instances
            bland = true;
        }
        return true;
    }
};

} // namespace

SimplexResult simplex_solve(const LinearProgram& lp, bool relax_ties) {
    const int n = lp.num_vars;
    if (static_cast<int>(lp.objective.size()) != n ||
        static_cast<int>(lp.lower.size()) != n || static_cast<int>(lp.upper.size()) != n)
        throw ShapeError("LP field sizes disagree with num_vars");
    for (const std::vector<double>& row : lp.rows)
        if (static_cast<int>(row.size()) != n) throw ShapeError("LP row width mismatch");
    auto finite_all = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    if (!finite_all(lp.objective) || !finite_all(lp.rhs) || !finite_all(lp.lower))
        throw DomainError("LP contains a non-finite entry");
    for (const std::vector<double>& row : lp.rows)
        if (!finite_all(row)) throw DomainError("LP row contains a non-finite entry");

    // shift lower bounds to zero and expand finite upper bounds into rows
    std::vector<std::vector<double>> rows = lp.rows;
    std::vector<double> rhs = lp.rhs;
    std::vector<int> bound_row_of(static_cast<size_t>(n), -1);
    for (int v = 0; v < n; ++v) {
        const double lo = lp.lower[static_cast<size_t>(v)];
        if (lo != 0.0)
            for (size_t r = 0; r < rows.size(); ++r) rhs[r] -= rows[r][static_cast<size_t>(v)] * lo;
        const double up = lp.upper[static_cast<size_t>(v)];
        if (std::isfinite(up)) {
            if (up < lo) {
                SimplexResult res;
                res.status = LpStatus::Infeasible;
                return res;
            }
            std::vector<double> bound_row(static_cast<size_t>(n), 0.0);
            bound_row[static_cast<size_t>(v)] = 1.0;
            bound_row_of[static_cast<size_t>(v)] = static_cast<int>(rows.size());
            rows.push_back(std::move(bound_row));
            rhs.push_back(up - lo);
        }
    }

    const int m = static_cast<int>(rows.size());

    // the pivoting itself runs on a slightly relaxed right-hand side: a
    // deterministic positive perturbation separates the ties that otherwise
    // leave big cut-pool LPs grinding across degenerate plateaus.  The
    // certificate at the end prices against the unperturbed data, so the
    // reported bound does not pay for this.
    std::vector<double> rhs_solve = rhs;
    if (relax_ties) {
        Rng tie_rng(0x2545f4914f6cdd1dull);
        for (double& b : rhs_solve) b += 1e-9 * tie_rng.uniform();
    }
    const bool need_phase1 =
        std::any_of(rhs_solve.begin(), rhs_solve.end(), [](double b) { return b < 0.0; });

    Tableau t;
    t.m = m;
    t.cols = n;
    t.stride = n + (need_phase1 ? 1 : 0);
    t.d.assign(static_cast<size_t>(m) * std::max(t.stride, 1), 0.0);
    t.rhs = rhs_solve;
    t.basic.resize(static_cast<size_t>(m));
    t.nonbasic.resize(static_cast<size_t>(t.stride));
    for (int i = 0; i < m; ++i) {
        t.basic[static_cast<size_t>(i)] = n + i; // slack ids
        for (int k = 0; k < n; ++k) t.at(i, k) = rows[static_cast<size_t>(i)][static_cast<size_t>(k)];
    }
    for (int k = 0; k < n; ++k) t.nonbasic[static_cast<size_t>(k)] = k;
    // degenerate plateaus of length O(m) are routine on large cut pools, so the
    // switch to Bland's rule has to scale with the instance or it fires early
    // and then crawls
    t.stall_limit = 60 + (m + n) / 2;
    const int pivot_cap = 20000 + 40 * (m + n);

    if (need_phase1) {
        const int aux_col = n;
        const int aux_id = n + m;
        t.cols = n + 1;
        t.nonbasic[static_cast<size_t>(aux_col)] = aux_id;
        for (int i = 0; i < m; ++i) t.at(i, aux_col) = -1.0;
        // auxiliary objective: maximize -x0
        t.obj.assign(static_cast<size_t>(t.cols), 0.0);
        t.obj[static_cast<size_t>(aux_col)] = -1.0;

        // initial pivot on the most negative row makes every rhs nonnegative
        int worst = 0;
        for (int i = 1; i < m; ++i)
            if (t.rhs[static_cast<size_t>(i)] < t.rhs[static_cast<size_t>(worst)]) worst = i;
        t.pivot(worst, aux_col);

        bool unbounded = false;
        while (t.step(unbounded, pivot_cap)) {
        }
        if (unbounded) throw InternalError("phase one cannot be unbounded");
        if (t.objval < -1e-7) {
            SimplexResult res;
            res.status = LpStatus::Infeasible;
            res.pivots = t.pivots;
            return res;
        }
        // remove the auxiliary from the basis if it lingers at value zero
        bool aux_dropped = false;
        for (int i = 0; i < t.m; ++i) {
            if (t.basic[static_cast<size_t>(i)] != aux_id) continue;
            int col = -1;
            for (int k = 0; k < t.cols; ++k)
                if (t.nonbasic[static_cast<size_t>(k)] != aux_id &&
                    std::abs(t.at(i, k)) > kPivotEps) {
                    col = k;
                    break;
                }
            if (col >= 0) {
                t.pivot(i, col);
            } else {
                // vacuous row (aux = 0 identically): swap to the end, drop it,
                // and keep the extra nonbasic column, which is a real variable
                const int last = t.m - 1;
                if (i != last) {
                    for (int k = 0; k < t.cols; ++k) std::swap(t.at(i, k), t.at(last, k));
                    std::swap(t.rhs[static_cast<size_t>(i)], t.rhs[static_cast<size_t>(last)]);
                    std::swap(t.basic[static_cast<size_t>(i)], t.basic[static_cast<size_t>(last)]);
                }
                --t.m;
                aux_dropped = true;
            }
            break;
        }
        if (!aux_dropped) {
            // retire the auxiliary column
            int aux_at = -1;
            for (int k = 0; k < t.cols; ++k)
                if (t.nonbasic[static_cast<size_t>(k)] == aux_id) aux_at = k;
            if (aux_at < 0) throw InternalError("auxiliary variable unaccounted for");
            const int last_col = t.cols - 1;
            if (aux_at != last_col) {
                for (int i = 0; i < t.m; ++i) std::swap(t.at(i, aux_at), t.at(i, last_col));
                std::swap(t.nonbasic[static_cast<size_t>(aux_at)], t.nonbasic[static_cast<size_t>(last_col)]);
            }
            --t.cols;
        }
    }

    // (re)install the true objective in terms of the current nonbasic set
    t.obj.assign(static_cast<size_t>(t.cols), 0.0);
    t.objval = 0.0;
    for (int v = 0; v < n; ++v) {
        const double cv = lp.objective[static_cast<size_t>(v)];
        if (cv == 0.0) continue;
        bool placed = false;
        for (int k = 0; k < t.cols && !placed; ++k)
            if (t.nonbasic[static_cast<size_t>(k)] == v) {
                t.obj[static_cast<size_t>(k)] += cv;
                placed = true;
            }
        if (placed) continue;
        for (int i = 0; i < t.m; ++i)
            if (t.basic[static_cast<size_t>(i)] == v) {
                t.objval += cv * t.rhs[static_cast<size_t>(i)];
                for (int k = 0; k < t.cols; ++k)
                    t.obj[static_cast<size_t>(k)] -= cv * t.at(i, k);
                placed = true;
                break;
            }
        if (!placed) throw InternalError("variable missing from dictionary");
    }

    bool unbounded = false;
    while (t.step(unbounded, pivot_cap)) {
    }
    SimplexResult res;
    res.pivots = t.pivots;
    if (unbounded) {
        res.status = LpStatus::Unbounded;
        return res;
    }

    // dual feasibility holds by the exit condition; read out the solution
    res.status = LpStatus::Optimal;
    res.solution.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < t.m; ++i) {
        const int v = t.basic[static_cast<size_t>(i)];
        if (v < n) res.solution[static_cast<size_t>(v)] = t.rhs[static_cast<size_t>(i)];
    }
    for (int v = 0; v < n; ++v) res.solution[static_cast<size_t>(v)] += lp.lower[static_cast<size_t>(v)];
    // recompute the objective from the solution to avoid accumulation drift
    double val = 0.0;
    for (int v = 0; v < n; ++v) val += lp.objective[static_cast<size_t>(v)] * res.solution[static_cast<size_t>(v)];
    res.optimum = val;

    // weak-duality certificate: for any y >= 0 with rows^T y >= c every
    // feasible x obeys c.x <= y.rhs + c.lo, so pricing a dual vector with
    // fresh arithmetic bounds the LP optimum independently of whatever
    // roundoff accumulated in the tableau.  Dual deficits are absorbed by
    // bumping the bound row of the offending variable, which is exact.
    {
        const int m_int = static_cast<int>(rows.size());

        auto price = [&](std::vector<double> y) -> double {
            for (double& w : y) w = std::max(w, 0.0);
            for (int v = 0; v < n; ++v) {
                double r = lp.objective[static_cast<size_t>(v)];
                for (int i = 0; i < m_int; ++i)
                    if (y[static_cast<size_t>(i)] != 0.0)
                        r -= y[static_cast<size_t>(i)] * rows[static_cast<size_t>(i)][static_cast<size_t>(v)];
                if (r > 0.0) {
                    const int br = bound_row_of[static_cast<size_t>(v)];
                    if (br < 0) return std::numeric_limits<double>::infinity();
                    // the bound row touches only v, so bumps cannot interact
                    y[static_cast<size_t>(br)] += r;
                }
            }
            double cert = 0.0;
            for (int i = 0; i < m_int; ++i) cert += y[static_cast<size_t>(i)] * rhs[static_cast<size_t>(i)];
            for (int v = 0; v < n; ++v)
                cert += lp.objective[static_cast<size_t>(v)] * lp.lower[static_cast<size_t>(v)];
            return cert;
        };

        // dual as read off the final reduced costs
        std::vector<double> y_raw(static_cast<size_t>(m_int), 0.0);
        for (int k = 0; k < t.cols; ++k) {
            const int id = t.nonbasic[static_cast<size_t>(k)];
            if (id >= n && id < n + m_int)
            y_raw[static_cast<size_t>(id - n)] = std::max(0.0, -t.obj[static_cast<size_t>(k)]);
        }
        double cert = price(y_raw);

        // polish: re-derive the dual from the original data by least squares
        // over the active set (tight rows vs basic structurals), which is
        // immune to tableau drift and prices much tighter after long runs
        std::vector<int> tight;
        for (int k = 0; k < t.cols; ++k) {
            const int id = t.nonbasic[static_cast<size_t>(k)];
            if (id >= n && id < n + m_int) tight.push_back(id - n);
        }
        std::vector<int> bvars;
        for (int i = 0; i < t.m; ++i)
            if (t.basic[static_cast<size_t>(i)] < n) bvars.push_back(t.basic[static_cast<size_t>(i)]);
        const int tn = static_cast<int>(tight.size());
        if (tn > 0 && !bvars.empty()) {
            std::vector<std::vector<double>> g(static_cast<size_t>(tn),
                                               std::vector<double>(static_cast<size_t>(tn), 0.0));
            std::vector<double> rv(static_cast<size_t>(tn), 0.0);
            for (int a = 0; a < tn; ++a) {
                const std::vector<double>& ra = rows[static_cast<size_t>(tight[static_cast<size_t>(a)])];
                for (int b = a; b < tn; ++b) {
                    const std::vector<double>& rb = rows[static_cast<size_t>(tight[static_cast<size_t>(b)])];
                    double s = 0.0;
                    for (int v : bvars) s += ra[static_cast<size_t>(v)] * rb[static_cast<size_t>(v)];
                    g[static_cast<size_t>(a)][static_cast<size_t>(b)] = s;
                    g[static_cast<size_t>(b)][static_cast<size_t>(a)] = s;
                }
                double s = 0.0;
                for (int v : bvars) s += ra[static_cast<size_t>(v)] * lp.objective[static_cast<size_t>(v)];
                rv[static_cast<size_t>(a)] = s;
            }
            for (int a = 0; a < tn; ++a)
                g[static_cast<size_t>(a)][static_cast<size_t>(a)] +=
                    1e-10 * (1.0 + g[static_cast<size_t>(a)][static_cast<size_t>(a)]);
            // in-place Cholesky solve of the ridged normal equations
            bool ok = true;
            for (int a = 0; a < tn && ok; ++a) {
                double d = g[static_cast<size_t>(a)][static_cast<size_t>(a)];
                for (int k = 0; k < a; ++k)
                    d -= g[static_cast<size_t>(a)][static_cast<size_t>(k)] *
                         g[static_cast<size_t>(a)][static_cast<size_t>(k)];
                if (d <= 0.0) {
                    ok = false;
                    break;
                }
                const double rt = std::sqrt(d);
                g[static_cast<size_t>(a)][static_cast<size_t>(a)] = rt;
                for (int b = a + 1; b < tn; ++b) {
                    double s = g[static_cast<size_t>(b)][static_cast<size_t>(a)];
                    for (int k = 0; k < a; ++k)
                        s -= g[static_cast<size_t>(b)][static_cast<size_t>(k)] *
                             g[static_cast<size_t>(a)][static_cast<size_t>(k)];
                    g[static_cast<size_t>(b)][static_cast<size_t>(a)] = s / rt;
                }
            }
            if (ok) {
                // keep a pristine copy of the normal matrix for refinement
                std::vector<std::vector<double>> g0(static_cast<size_t>(tn),
                                                    std::vector<double>(static_cast<size_t>(tn)));
                for (int a = 0; a < tn; ++a) {
                    const std::vector<double>& ra = rows[static_cast<size_t>(tight[static_cast<size_t>(a)])];
                    for (int b = a; b < tn; ++b) {
                        const std::vector<double>& rb =
                            rows[static_cast<size_t>(tight[static_cast<size_t>(b)])];
                        double s = 0.0;
                        for (int v : bvars) s += ra[static_cast<size_t>(v)] * rb[static_cast<size_t>(v)];
                        g0[static_cast<size_t>(a)][static_cast<size_t>(b)] = s;
                        g0[static_cast<size_t>(b)][static_cast<size_t>(a)] = s;
                    }
                }
                const std::vector<double> rv0 = rv;
                auto chol_solve = [&](std::vector<double>& x) {
                    for (int a = 0; a < tn; ++a) {
                        double s = x[static_cast<size_t>(a)];
                        for (int k = 0; k < a; ++k)
                            s -= g[static_cast<size_t>(a)][static_cast<size_t>(k)] * x[static_cast<size_t>(k)];
                        x[static_cast<size_t>(a)] = s / g[static_cast<size_t>(a)][static_cast<size_t>(a)];
                    }
                    for (int a = tn - 1; a >= 0; --a) {
                        double s = x[static_cast<size_t>(a)];
                        for (int k = a + 1; k < tn; ++k)
                            s -= g[static_cast<size_t>(k)][static_cast<size_t>(a)] * x[static_cast<size_t>(k)];
                        x[static_cast<size_t>(a)] = s / g[static_cast<size_t>(a)][static_cast<size_t>(a)];
                    }
                };
                chol_solve(rv);
                // two refinement sweeps push the residual toward roundoff,
                // which matters because pricing amplifies it by the box width
                for (int sweep = 0; sweep < 2; ++sweep) {
                    std::vector<double> resid(static_cast<size_t>(tn));
                    for (int a = 0; a < tn; ++a) {
                        double s = rv0[static_cast<size_t>(a)];
                        for (int b = 0; b < tn; ++b)
                            s -= g0[static_cast<size_t>(a)][static_cast<size_t>(b)] * rv[static_cast<size_t>(b)];
                        resid[static_cast<size_t>(a)] = s;
                    }
                    chol_solve(resid);
                    for (int a = 0; a < tn; ++a) rv[static_cast<size_t>(a)] += resid[static_cast<size_t>(a)];
                }
                std::vector<double> y_pol(static_cast<size_t>(m_int), 0.0);
                for (int a = 0; a < tn; ++a)
                    y_pol[static_cast<size_t>(tight[static_cast<size_t>(a)])] = rv[static_cast<size_t>(a)];
                cert = std::min(cert, price(std::move(y_pol)));
            }
        }
        res.certified_upper = cert;
    }
    return res;
}

} // namespace qmetric
