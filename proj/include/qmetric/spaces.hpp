#pragma once

#include <string>
#include <vector>

namespace qmetric {

// Finite metric space: point labels plus the full distance matrix.
struct FiniteMetricSpace {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> dist;

    int size() const { return static_cast<int>(labels.size()); }
    double d(int i, int j) const { return dist[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    double diameter() const;
    // index of a label, or -1
    int find_label(const std::string& name) const;

    bool operator==(const FiniteMetricSpace& other) const {
        return labels == other.labels && dist == other.dist;
    }
};

// Validating constructor: symmetry, zero diagonal, positivity off the
// diagonal, triangle inequality within 1e-12 (violations name the triple).
FiniteMetricSpace make_space(std::vector<std::string> labels,
                             std::vector<std::vector<double>> dist);

// Positive-integer sequence prefix with the first-disagreement metric.
struct BaireSeq {
    std::vector<int> entries;

    int length() const { return static_cast<int>(entries.size()); }
    bool operator==(const BaireSeq& other) const { return entries == other.entries; }
};

BaireSeq make_baire_seq(std::vector<int> entries);

// d((x1,y1),(x2,y2)) = d_X(x1,x2) + d_Y(y1,y2); labels are "x|y".
FiniteMetricSpace product_1_metric(const FiniteMetricSpace& x, const FiniteMetricSpace& y);

// max over points of the distance to the nearest subset member
double hausdorff_subset(const FiniteMetricSpace& x, const std::vector<int>& subset);

// Farthest-point net: starts at point 0, repeatedly adds the point farthest
// from the net while that distance exceeds eps.  Deterministic in the point
// order; the result satisfies hausdorff_subset(x, net) <= eps.
std::vector<int> greedy_net(const FiniteMetricSpace& x, double eps);

// restriction of the metric to a point subset (for oracle comparisons)
FiniteMetricSpace restrict_space(const FiniteMetricSpace& x, const std::vector<int>& subset);

// Exact Gromov-Hausdorff distance as half the minimal distortion over all
// correspondences (subsets of X x Y surjective onto both factors), found by
// bitmask enumeration.  Requires |X|*|Y| <= 16.
double gh_bruteforce(const FiniteMetricSpace& x, const FiniteMetricSpace& y);

// 0 when equal, else 2^(-m) for the first index m where the entries differ;
// lengths must match.
double baire_distance(const BaireSeq& a, const BaireSeq& b);

} // namespace qmetric
