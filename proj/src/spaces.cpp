#include "qmetric/spaces.hpp"
#include "qmetric/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qmetric {

double FiniteMetricSpace::diameter() const {
    double best = 0.0;
    for (size_t i = 0; i < dist.size(); ++i)
        for (size_t j = i + 1; j < dist.size(); ++j) best = std::max(best, dist[i][j]);
    return best;
}

int FiniteMetricSpace::find_label(const std::string& name) const {
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == name) return static_cast<int>(i);
    return -1;
}

FiniteMetricSpace make_space(std::vector<std::string> labels,
                             std::vector<std::vector<double>> dist) {
    const size_t n = labels.size();
    if (n == 0) throw DomainError("metric space needs at least one point");
    if (dist.size() != n)
        throw ShapeError("distance matrix has " + std::to_string(dist.size()) + " rows for " +
                         std::to_string(n) + " points");
    for (size_t i = 0; i < n; ++i)
        if (dist[i].size() != n)
            throw ShapeError("distance row " + std::to_string(i) + " has " +
                             std::to_string(dist[i].size()) + " entries");
    for (size_t i = 0; i < n; ++i) {
        if (dist[i][i] != 0.0)
            throw DomainError("nonzero self-distance at point " + labels[i]);
        for (size_t j = 0; j < n; ++j) {
            if (!std::isfinite(dist[i][j]) || dist[i][j] < 0.0)
                throw DomainError("bad distance between " + labels[i] + " and " + labels[j]);
            if (dist[i][j] != dist[j][i])
                throw DomainError("asymmetric distance between " + labels[i] + " and " + labels[j]);
            if (i != j && dist[i][j] <= 0.0)
                throw DomainError("distinct points " + labels[i] + " and " + labels[j] +
                                  " at distance 0");
        }
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k)
                if (dist[i][k] > dist[i][j] + dist[j][k] + 1e-12)
                    throw DomainError("triangle inequality violated for (" + labels[i] + ", " +
                                      labels[j] + ", " + labels[k] + ")");
    FiniteMetricSpace s;
    s.labels = std::move(labels);
    s.dist = std::move(dist);
    return s;
}

BaireSeq make_baire_seq(std::vector<int> entries) {
    if (entries.empty()) throw DomainError("sequence prefix must be nonempty");
    for (size_t i = 0; i < entries.size(); ++i)
        if (entries[i] < 1)
            throw DomainError("sequence entry " + std::to_string(i) + " is " +
                              std::to_string(entries[i]) + ", must be >= 1");
    BaireSeq s;
    s.entries = std::move(entries);
    return s;
}

FiniteMetricSpace product_1_metric(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
    FiniteMetricSpace p;
    const int nx = x.size(), ny = y.size();
    p.labels.reserve(static_cast<size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            p.labels.push_back(x.labels[static_cast<size_t>(i)] + "|" +
                               y.labels[static_cast<size_t>(j)]);
    const int np = nx * ny;
    p.dist.assign(static_cast<size_t>(np), std::vector<double>(static_cast<size_t>(np), 0.0));
    for (int i1 = 0; i1 < nx; ++i1)
        for (int j1 = 0; j1 < ny; ++j1)
            for (int i2 = 0; i2 < nx; ++i2)
                for (int j2 = 0; j2 < ny; ++j2)
                    p.dist[static_cast<size_t>(i1 * ny + j1)][static_cast<size_t>(i2 * ny + j2)] =
                        x.d(i1, i2) + y.d(j1, j2);
    return p;
}

double hausdorff_subset(const FiniteMetricSpace& x, const std::vector<int>& subset) {
    if (subset.empty()) throw DomainError("hausdorff_subset: empty subset");
    for (int s : subset)
        if (s < 0 || s >= x.size())
            throw RangeError("hausdorff_subset: point index " + std::to_string(s) + " out of range");
    double worst = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int s : subset) nearest = std::min(nearest, x.d(i, s));
        worst = std::max(worst, nearest);
    }
    return worst;
}

std::vector<int> greedy_net(const FiniteMetricSpace& x, double eps) {
    if (!(eps > 0.0)) throw DomainError("greedy_net: eps must be positive");
    std::vector<int> net{0};
    for (;;) {
        int farthest = -1;
        double far_d = 0.0;
        for (int i = 0; i < x.size(); ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (int s : net) nearest = std::min(nearest, x.d(i, s));
            if (nearest > far_d) {
                far_d = nearest;
                farthest = i;
            }
        }
        if (farthest < 0 || far_d <= eps) break;
        net.push_back(farthest);
    }
    return net;
}

FiniteMetricSpace restrict_space(const FiniteMetricSpace& x, const std::vector<int>& subset) {
    if (subset.empty()) throw DomainError("restrict_space: empty subset");
    FiniteMetricSpace r;
    for (int s : subset) {
        if (s < 0 || s >= x.size())
            throw RangeError("restrict_space: point index out of range");
        r.labels.push_back(x.labels[static_cast<size_t>(s)]);
    }
    const size_t n = subset.size();
    r.dist.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            r.dist[i][j] = x.d(subset[i], subset[j]);
    return r;
}

double gh_bruteforce(const FiniteMetricSpace& x, const FiniteMetricSpace& y) {
    const int nx = x.size(), ny = y.size();
    const int cells = nx * ny;
    if (cells > 16)
        throw CapacityError("gh_bruteforce handles |X|*|Y| <= 16 (got " + std::to_string(cells) +
                            "); use hausdorff_subset-based net bounds for larger spaces");
    double best = std::numeric_limits<double>::infinity();
    const unsigned total = 1u << cells;
    for (unsigned mask = 1; mask < total; ++mask) {
        // both-way surjectivity
        unsigned seen_x = 0, seen_y = 0;
        for (int c = 0; c < cells; ++c)
            if (mask & (1u << c)) {
                seen_x |= 1u << (c / ny);
                seen_y |= 1u << (c % ny);
            }
        if (seen_x != (1u << nx) - 1u || seen_y != (1u << ny) - 1u) continue;
        double distortion = 0.0;
        for (int c1 = 0; c1 < cells && distortion < best; ++c1) {
            if (!(mask & (1u << c1))) continue;
            for (int c2 = c1; c2 < cells; ++c2) {
                if (!(mask & (1u << c2))) continue;
                const double gap =
                    std::abs(x.d(c1 / ny, c2 / ny) - y.d(c1 % ny, c2 % ny));
                distortion = std::max(distortion, gap);
            }
        }
        best = std::min(best, distortion);
    }
    return 0.5 * best;
}

double baire_distance(const BaireSeq& a, const BaireSeq& b) {
    if (a.length() != b.length())
        throw DomainError("baire_distance: sequences have different lengths " +
                          std::to_string(a.length()) + " vs " + std::to_string(b.length()));
    for (int m = 0; m < a.length(); ++m)
        if (a.entries[static_cast<size_t>(m)] != b.entries[static_cast<size_t>(m)])
            return std::pow(2.0, -m);
    return 0.0;
}

} // namespace qmetric
