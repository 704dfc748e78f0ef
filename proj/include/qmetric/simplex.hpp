#pragma once

#include <limits>
#include <string>
#include <vector>

namespace qmetric {

// Dense linear program: maximize objective . x subject to the inequality
// rows and per-variable bounds.  Lower bounds must be finite (variables are
// shifted internally); an infinite upper bound is expressed as +inf.
struct LinearProgram {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<std::vector<double>> rows; // coefficient rows, one per constraint
    std::vector<double> rhs;               // row . x <= rhs
    std::vector<double> lower;             // finite
    std::vector<double> upper;             // may be +inf

    // convenience construction with bounds x >= 0, x unbounded above
    static LinearProgram with_vars(int n);
    void add_row(std::vector<double> coeffs, double bound);
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct SimplexResult {
    LpStatus status = LpStatus::Optimal;
    double optimum = 0.0;
    std::vector<double> solution;
    int pivots = 0;
    // Weak-duality bound rebuilt from the original data and the final dual
    // vector: optimum of the LP never exceeds it, whatever roundoff did to
    // the tableau.  +inf when a missing upper bound leaves it uncapped.
    double certified_upper = std::numeric_limits<double>::infinity();
};

// Dense primal simplex on the dictionary tableau; phase one only when some
// shifted right-hand side is negative.  Pivot choice is steepest reduced
// cost with ratio-test ties broken toward the largest pivot element, falling
// back to Bland's rule after a degenerate stall so cycling is impossible.
// With relax_ties the pivoting runs on a deterministically perturbed
// right-hand side (~1e-9 per row) that breaks the degenerate ties large cut
// pools produce; the reported optimum then overshoots the true one by up to
// the dual weight of that slack, and the returned point may violate rows by
// the same amount.  certified_upper is always priced against the unperturbed
// data, so it stays a valid bound in either mode.
SimplexResult simplex_solve(const LinearProgram& lp, bool relax_ties = false);

} // namespace qmetric
