#include "qmetric/chain.hpp"
#include "qmetric/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace qmetric {

namespace {

std::string level_tag(int n) { return "level " + std::to_string(n); }

} // namespace

ChainReport validate_chain(const ChainData& data) {
    ChainReport rep;
    auto bad = [&rep](const std::string& msg) {
        rep.ok = false;
        rep.problems.push_back(msg);
    };

    if (data.levels.empty()) {
        bad("chain has no levels");
        return rep;
    }
    for (size_t n = 0; n < data.levels.size(); ++n) {
        rep.level_dims.push_back(data.levels[n].block_sizes);
        try {
            validate_algebra(data.levels[n]);
        } catch (const Error& e) {
            bad(level_tag(static_cast<int>(n)) + ": " + e.what());
        }
    }
    if (!rep.ok) return rep;

    const int T = static_cast<int>(data.levels.size()) - 1;
    if (data.levels[0].block_sizes != std::vector<int>{1})
        bad("level 0 must be the scalars C1 (single block of size 1), got " +
            data.levels[0].describe());

    if (static_cast<int>(data.embeddings.size()) != T)
        bad("expected " + std::to_string(T) + " embeddings, got " +
            std::to_string(data.embeddings.size()));

    bool mult_ok = rep.ok;
    for (size_t n = 0; n < data.embeddings.size() && n + 1 < data.levels.size(); ++n) {
        const MultiplicityEmbedding& e = data.embeddings[n];
        const BlockAlgebra& src = data.levels[n];
        const BlockAlgebra& tgt = data.levels[n + 1];
        if (e.source != src || e.target != tgt) {
            bad(level_tag(static_cast<int>(n)) + ": embedding endpoints " + e.source.describe() +
                "->" + e.target.describe() + " disagree with adjacent levels " + src.describe() +
                "->" + tgt.describe());
            mult_ok = false;
            continue;
        }
        const int ks = src.num_blocks();
        const int kt = tgt.num_blocks();
        if (static_cast<int>(e.mult.size()) != ks) {
            bad(level_tag(static_cast<int>(n)) + ": multiplicity matrix has " +
                std::to_string(e.mult.size()) + " rows, expected " + std::to_string(ks));
            mult_ok = false;
            continue;
        }
        bool shape_ok = true;
        for (int i = 0; i < ks; ++i) {
            if (static_cast<int>(e.mult[i].size()) != kt) {
                bad(level_tag(static_cast<int>(n)) + ": multiplicity row " + std::to_string(i) +
                    " has " + std::to_string(e.mult[i].size()) + " columns, expected " +
                    std::to_string(kt));
                shape_ok = false;
            }
        }
        if (!shape_ok) {
            mult_ok = false;
            continue;
        }
        for (int i = 0; i < ks; ++i) {
            int row_sum = 0;
            for (int j = 0; j < kt; ++j) {
                if (e.mult[i][j] < 0) {
                    bad(level_tag(static_cast<int>(n)) + ": negative multiplicity at (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
                    mult_ok = false;
                }
                row_sum += e.mult[i][j];
            }
            if (row_sum < 1) {
                bad(level_tag(static_cast<int>(n)) + ": source block " + std::to_string(i) +
                    " maps nowhere");
                mult_ok = false;
            }
        }
        for (int j = 0; j < kt; ++j) {
            int fill = 0;
            for (int i = 0; i < ks; ++i) fill += e.mult[i][j] * src.block_sizes[i];
            if (fill != tgt.block_sizes[j]) {
                bad("unitality violated at " + level_tag(static_cast<int>(n)) + ": target block " +
                    std::to_string(j) + " filled to " + std::to_string(fill) + " of " +
                    std::to_string(tgt.block_sizes[j]));
                mult_ok = false;
            }
        }
    }

    try {
        make_trace_state(data.levels.back(), data.top_trace_weights);
    } catch (const Error& e) {
        bad(std::string("top trace: ") + e.what());
    }

    if (static_cast<int>(data.beta.size()) != T + 1) {
        bad("beta needs " + std::to_string(T + 1) + " entries, got " +
            std::to_string(data.beta.size()));
    } else {
        for (size_t n = 0; n < data.beta.size(); ++n)
            if (!(data.beta[n] > 0.0))
                bad("beta(" + std::to_string(n) + ") must be strictly positive");
        for (size_t n = 0; n + 1 < data.beta.size(); ++n)
            if (data.beta[n + 1] > data.beta[n] + 1e-15) {
                bad("beta not nonincreasing at index " + std::to_string(n));
                break;
            }
    }

    // Pullback traces: weight of a level-n block is the sum of top weights
    // over its copies; faithfulness needs every such sum to be positive.
    // Only meaningful when the multiplicity data made sense.
    if (mult_ok && rep.problems.empty()) {
        std::vector<std::vector<int>> reach(data.levels.back().block_sizes.size());
        // copies per top block for the current level, counted downward
        std::vector<std::vector<int>> count; // count[l][j] = copies of block l in top block j
        const int top_blocks = data.levels.back().num_blocks();
        count.assign(data.levels.back().block_sizes.size(), {});
        for (int l = 0; l < top_blocks; ++l) {
            count[static_cast<size_t>(l)].assign(static_cast<size_t>(top_blocks), 0);
            count[static_cast<size_t>(l)][static_cast<size_t>(l)] = 1;
        }
        for (int n = T - 1; n >= 0; --n) {
            const MultiplicityEmbedding& e = data.embeddings[static_cast<size_t>(n)];
            const int ks = e.source.num_blocks();
            const int kt = e.target.num_blocks();
            std::vector<std::vector<int>> next(static_cast<size_t>(ks));
            for (int i = 0; i < ks; ++i) {
                next[static_cast<size_t>(i)].assign(static_cast<size_t>(top_blocks), 0);
                for (int j = 0; j < kt; ++j)
                    for (int b = 0; b < top_blocks; ++b)
                        next[static_cast<size_t>(i)][static_cast<size_t>(b)] +=
                            e.mult[i][j] * count[static_cast<size_t>(j)][static_cast<size_t>(b)];
            }
            count = std::move(next);
            for (size_t i = 0; i < count.size(); ++i) {
                double w = 0.0;
                for (int b = 0; b < top_blocks; ++b)
                    w += count[i][static_cast<size_t>(b)] *
                         data.top_trace_weights[static_cast<size_t>(b)];
                if (!(w > 0.0))
                    bad("pullback trace not faithful: " + level_tag(n) + " block " +
                        std::to_string(i) + " has weight " + std::to_string(w));
            }
        }
    }

    rep.ok = rep.problems.empty();
    return rep;
}

AfChain::AfChain(ChainData data) : data_(std::move(data)) {
    const ChainReport rep = validate_chain(data_);
    if (!rep.ok) {
        std::ostringstream os;
        os << "invalid chain:";
        for (const std::string& p : rep.problems) os << "\n  - " << p;
        throw DomainError(os.str());
    }
    top_trace_ = make_trace_state(data_.levels.back(), data_.top_trace_weights);
    build_caches();
}

const BlockAlgebra& AfChain::level(int n) const {
    if (n < 0 || n > top_level())
        throw RangeError("level " + std::to_string(n) + " out of range 0.." +
                         std::to_string(top_level()));
    return data_.levels[static_cast<size_t>(n)];
}

const TraceState& AfChain::level_trace(int n) const {
    level(n); // range check
    return level_traces_[static_cast<size_t>(n)];
}

double AfChain::beta_at(int n) const {
    level(n); // range check
    return data_.beta[static_cast<size_t>(n)];
}

const std::vector<std::vector<AfChain::Copy>>& AfChain::copies_at(int n) const {
    level(n); // range check
    return copies_[static_cast<size_t>(n)];
}

bool AfChain::structurally_equal(const AfChain& other) const {
    if (data_.levels.size() != other.data_.levels.size()) return false;
    for (size_t n = 0; n < data_.levels.size(); ++n)
        if (data_.levels[n] != other.data_.levels[n]) return false;
    for (size_t n = 0; n < data_.embeddings.size(); ++n)
        if (data_.embeddings[n].mult != other.data_.embeddings[n].mult) return false;
    return data_.top_trace_weights == other.data_.top_trace_weights &&
           data_.beta == other.data_.beta;
}

void AfChain::build_caches() {
    const int T = top_level();
    copies_.assign(static_cast<size_t>(T) + 1, {});

    // top level embeds identically
    {
        std::vector<std::vector<Copy>>& top_copies = copies_[static_cast<size_t>(T)];
        top_copies.resize(static_cast<size_t>(top().num_blocks()));
        for (int l = 0; l < top().num_blocks(); ++l)
            top_copies[static_cast<size_t>(l)].push_back(Copy{l, 0});
    }

    // walk downward, composing the canonical block-diagonal layout: inside a
    // target block, source copies are ordered by (source block, copy index)
    for (int n = T - 1; n >= 0; --n) {
        const MultiplicityEmbedding& e = data_.embeddings[static_cast<size_t>(n)];
        const int ks = e.source.num_blocks();
        const int kt = e.target.num_blocks();
        std::vector<std::vector<Copy>>& here = copies_[static_cast<size_t>(n)];
        const std::vector<std::vector<Copy>>& up = copies_[static_cast<size_t>(n) + 1];
        here.resize(static_cast<size_t>(ks));
        // offsets of each copy inside every target block
        for (int j = 0; j < kt; ++j) {
            int off = 0;
            for (int i = 0; i < ks; ++i) {
                const int m = e.source.block_sizes[static_cast<size_t>(i)];
                for (int c = 0; c < e.mult[static_cast<size_t>(i)][static_cast<size_t>(j)]; ++c) {
                    for (const Copy& upc : up[static_cast<size_t>(j)])
                        here[static_cast<size_t>(i)].push_back(
                            Copy{upc.top_block, upc.offset + off});
                    off += m;
                }
            }
        }
    }

    // pullback traces
    level_traces_.clear();
    level_traces_.reserve(static_cast<size_t>(T) + 1);
    for (int n = 0; n <= T; ++n) {
        const BlockAlgebra& alg = data_.levels[static_cast<size_t>(n)];
        std::vector<double> w(static_cast<size_t>(alg.num_blocks()), 0.0);
        for (int l = 0; l < alg.num_blocks(); ++l)
            for (const Copy& c : copies_[static_cast<size_t>(n)][static_cast<size_t>(l)])
                w[static_cast<size_t>(l)] += top_trace_.weights[static_cast<size_t>(c.top_block)];
        level_traces_.push_back(make_trace_state(alg, std::move(w)));
    }

    // pushed matrix-unit bases and Gram factors for n < T
    projectors_.clear();
    projectors_.resize(static_cast<size_t>(T));
    for (int n = 0; n < T; ++n) {
        LevelProjector& proj = projectors_[static_cast<size_t>(n)];
        const BlockAlgebra& alg = data_.levels[static_cast<size_t>(n)];
        proj.basis.reserve(static_cast<size_t>(alg.complex_dim()));
        for (int l = 0; l < alg.num_blocks(); ++l) {
            const int m = alg.block_sizes[static_cast<size_t>(l)];
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    BasisEntry be;
                    for (const Copy& c : copies_[static_cast<size_t>(n)][static_cast<size_t>(l)])
                        be.positions.push_back({c.top_block, c.offset + i, c.offset + j});
                    proj.basis.push_back(std::move(be));
                }
        }
        const int dim = static_cast<int>(proj.basis.size());

        // Gram matrix under the GNS inner product.  Canonical embeddings put
        // distinct units at disjoint positions, so this comes out diagonal;
        // the dense path stays as a guard for future non-canonical layouts.
        std::unordered_map<std::int64_t, std::vector<int>> by_pos;
        for (int u = 0; u < dim; ++u)
            for (const std::array<int, 3>& p : proj.basis[static_cast<size_t>(u)].positions) {
                const std::int64_t key =
                    (static_cast<std::int64_t>(p[0]) << 42) |
                    (static_cast<std::int64_t>(p[1]) << 21) | static_cast<std::int64_t>(p[2]);
                by_pos[key].push_back(u);
            }
        CMat gram(dim);
        for (const auto& [key, us] : by_pos) {
            const int top_block = static_cast<int>(key >> 42);
            const double t = top_trace_.weights[static_cast<size_t>(top_block)];
            for (int u : us)
                for (int v : us) gram(u, v) += t;
        }
        double max_diag = 0.0;
        for (int u = 0; u < dim; ++u) max_diag = std::max(max_diag, gram(u, u).real());
        bool diagonal = true;
        for (int u = 0; u < dim && diagonal; ++u)
            for (int v = 0; v < dim; ++v)
                if (u != v && std::abs(gram(u, v)) > 1e-14 * std::max(1.0, max_diag)) {
                    diagonal = false;
                    break;
                }
        proj.diagonal_gram = diagonal;
        if (diagonal) {
            proj.gram_diag.resize(static_cast<size_t>(dim));
            for (int u = 0; u < dim; ++u) {
                const double g = gram(u, u).real();
                if (!(g > 0.0))
                    throw InternalError("singular Gram entry at level " + std::to_string(n));
                proj.gram_diag[static_cast<size_t>(u)] = g;
            }
        } else {
            try {
                proj.gram_chol = cholesky_factor(gram);
            } catch (const DomainError&) {
                throw InternalError("Gram matrix is singular at level " + std::to_string(n) +
                                    "; pullback trace should have prevented this");
            }
        }
    }
}

AlgebraElement embed_element(const AfChain& c, int n, const AlgebraElement& a) {
    const BlockAlgebra& src = c.level(n); // range check inside
    if (a.algebra != src)
        throw ShapeError("embed_element: element lives on " + a.algebra.describe() +
                         ", level " + std::to_string(n) + " is " + src.describe());
    AlgebraElement out = AlgebraElement::zero(c.top());
    const std::vector<std::vector<AfChain::Copy>>& copies = c.copies_at(n);
    for (int l = 0; l < src.num_blocks(); ++l) {
        const CMat& blk = a.blocks[static_cast<size_t>(l)];
        for (const AfChain::Copy& cp : copies[static_cast<size_t>(l)]) {
            CMat& dst = out.blocks[static_cast<size_t>(cp.top_block)];
            for (int i = 0; i < blk.n; ++i)
                for (int j = 0; j < blk.n; ++j)
                    dst(cp.offset + i, cp.offset + j) += blk(i, j);
        }
    }
    return out;
}

AlgebraElement conditional_expectation(const AfChain& c, int n, const AlgebraElement& f) {
    c.level(n); // range check
    if (f.algebra != c.top())
        throw ShapeError("conditional_expectation: element lives on " + f.algebra.describe() +
                         ", top algebra is " + c.top().describe());
    if (n == c.top_level()) return f;

    const AfChain::LevelProjector& proj = c.projectors_[static_cast<size_t>(n)];
    const int dim = static_cast<int>(proj.basis.size());
    std::vector<Cx> rhs(static_cast<size_t>(dim), Cx(0.0, 0.0));
    for (int u = 0; u < dim; ++u) {
        Cx s(0.0, 0.0);
        for (const std::array<int, 3>& p : proj.basis[static_cast<size_t>(u)].positions)
            s += c.top_trace_.weights[static_cast<size_t>(p[0])] *
                 f.blocks[static_cast<size_t>(p[0])](p[1], p[2]);
        rhs[static_cast<size_t>(u)] = s;
    }
    std::vector<Cx> coef;
    if (proj.diagonal_gram) {
        coef.resize(static_cast<size_t>(dim));
        for (int u = 0; u < dim; ++u)
            coef[static_cast<size_t>(u)] = rhs[static_cast<size_t>(u)] / proj.gram_diag[static_cast<size_t>(u)];
    } else {
        coef = cholesky_solve(proj.gram_chol, rhs);
    }
    AlgebraElement out = AlgebraElement::zero(c.top());
    for (int u = 0; u < dim; ++u)
        for (const std::array<int, 3>& p : proj.basis[static_cast<size_t>(u)].positions)
            out.blocks[static_cast<size_t>(p[0])](p[1], p[2]) += coef[static_cast<size_t>(u)];
    return out;
}

double af_lip_norm(const AfChain& c, const AlgebraElement& f) {
    require_self_adjoint(f, "af_lip_norm");
    if (f.algebra != c.top())
        throw ShapeError("af_lip_norm: element must live on the top algebra");
    double best = 0.0;
    // the level-T term is identically zero (E_T = identity)
    for (int n = 0; n < c.top_level(); ++n) {
        const AlgebraElement r = sub(f, conditional_expectation(c, n, f));
        best = std::max(best, operator_norm(r) / c.beta_at(n));
    }
    return best;
}

} // namespace qmetric
