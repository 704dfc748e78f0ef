#include "qmetric/io.hpp"
#include "qmetric/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <utility>

namespace qmetric {

namespace {

using Json = nlohmann::ordered_json;

Json parse_json(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

const Json& field(const Json& doc, const char* key, const std::string& origin) {
    if (!doc.is_object()) throw ParseError(origin + ": top level must be an object");
    const auto it = doc.find(key);
    if (it == doc.end()) throw ParseError(origin + ": missing key '" + key + "'");
    return *it;
}

double as_number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + " must be a number");
    return j.get<double>();
}

int as_int(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ParseError(where + " must be an integer");
    return j.get<int>();
}

const Json& as_array(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + " must be an array");
    return j;
}

Cx as_complex(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(where + " must be a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

CMat as_matrix(const Json& j, const std::string& where) {
    as_array(j, where);
    const int n = static_cast<int>(j.size());
    if (n == 0) throw ParseError(where + " must be a nonempty square matrix");
    CMat m(n);
    for (int r = 0; r < n; ++r) {
        const Json& row = j[static_cast<size_t>(r)];
        const std::string rw = where + "[" + std::to_string(r) + "]";
        as_array(row, rw);
        if (static_cast<int>(row.size()) != n)
            throw ParseError(rw + " has " + std::to_string(row.size()) + " entries, expected " +
                             std::to_string(n));
        for (int c = 0; c < n; ++c)
            m(r, c) = as_complex(row[static_cast<size_t>(c)],
                                 rw + "[" + std::to_string(c) + "]");
    }
    return m;
}

Json matrix_to_json(const CMat& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.n; ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.n; ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<AlgebraElement> parse_value_list(const Json& j, const std::string& where,
                                             const SpacePtr& space, const ChainPtr& chain) {
    if (!space || !chain) throw ShapeError(where + ": missing space or chain");
    as_array(j, where);
    if (static_cast<int>(j.size()) != space->size())
        throw ParseError(where + " has " + std::to_string(j.size()) + " points, space has " +
                         std::to_string(space->size()));
    const BlockAlgebra& top = chain->top();
    std::vector<AlgebraElement> out;
    out.reserve(j.size());
    for (size_t x = 0; x < j.size(); ++x) {
        const std::string wx = where + "[" + std::to_string(x) + "]";
        const Json& blocks = as_array(j[x], wx);
        if (static_cast<int>(blocks.size()) != top.num_blocks())
            throw ParseError(wx + " has " + std::to_string(blocks.size()) +
                             " blocks, the chain top has " + std::to_string(top.num_blocks()));
        AlgebraElement a = AlgebraElement::zero(top);
        for (size_t l = 0; l < blocks.size(); ++l) {
            const std::string wl = wx + "[" + std::to_string(l) + "]";
            CMat m = as_matrix(blocks[l], wl);
            if (m.n != top.block_sizes[l])
                throw ParseError(wl + " is " + std::to_string(m.n) + "x" + std::to_string(m.n) +
                                 ", block wants " + std::to_string(top.block_sizes[l]));
            a.blocks[l] = std::move(m);
        }
        out.push_back(std::move(a));
    }
    return out;
}

Json value_list_to_json(const std::vector<AlgebraElement>& values) {
    Json pts = Json::array();
    for (const AlgebraElement& a : values) {
        Json blocks = Json::array();
        for (const CMat& m : a.blocks) blocks.push_back(matrix_to_json(m));
        pts.push_back(std::move(blocks));
    }
    return pts;
}

} // namespace

ChainData parse_chain_text(const std::string& text, const std::string& origin) {
    const Json doc = parse_json(text, origin);
    ChainData data;

    const Json& blocks = as_array(field(doc, "blocks", origin), origin + ": blocks");
    for (size_t n = 0; n < blocks.size(); ++n) {
        const std::string wn = origin + ": blocks[" + std::to_string(n) + "]";
        const Json& level = as_array(blocks[n], wn);
        BlockAlgebra alg;
        for (size_t l = 0; l < level.size(); ++l)
            alg.block_sizes.push_back(as_int(level[l], wn + "[" + std::to_string(l) + "]"));
        data.levels.push_back(std::move(alg));
    }

    const Json& mult = as_array(field(doc, "mult", origin), origin + ": mult");
    for (size_t n = 0; n < mult.size(); ++n) {
        const std::string wn = origin + ": mult[" + std::to_string(n) + "]";
        const Json& mat = as_array(mult[n], wn);
        MultiplicityEmbedding e;
        if (n + 1 < data.levels.size()) {
            e.source = data.levels[n];
            e.target = data.levels[n + 1];
        }
        for (size_t r = 0; r < mat.size(); ++r) {
            const std::string wr = wn + "[" + std::to_string(r) + "]";
            const Json& row = as_array(mat[r], wr);
            std::vector<int> vals;
            for (size_t c = 0; c < row.size(); ++c)
                vals.push_back(as_int(row[c], wr + "[" + std::to_string(c) + "]"));
            e.mult.push_back(std::move(vals));
        }
        data.embeddings.push_back(std::move(e));
    }

    const Json& tw = as_array(field(doc, "trace_weights", origin), origin + ": trace_weights");
    for (size_t l = 0; l < tw.size(); ++l)
        data.top_trace_weights.push_back(
            as_number(tw[l], origin + ": trace_weights[" + std::to_string(l) + "]"));

    const Json& beta = as_array(field(doc, "beta", origin), origin + ": beta");
    for (size_t n = 0; n < beta.size(); ++n)
        data.beta.push_back(as_number(beta[n], origin + ": beta[" + std::to_string(n) + "]"));

    return data;
}

FiniteMetricSpace parse_space_text(const std::string& text, const std::string& origin) {
    const Json doc = parse_json(text, origin);
    std::vector<std::string> labels;
    const Json& jl = as_array(field(doc, "labels", origin), origin + ": labels");
    for (size_t i = 0; i < jl.size(); ++i) {
        if (!jl[i].is_string())
            throw ParseError(origin + ": labels[" + std::to_string(i) + "] must be a string");
        labels.push_back(jl[i].get<std::string>());
    }
    const Json& jd = as_array(field(doc, "dist", origin), origin + ": dist");
    std::vector<std::vector<double>> dist;
    for (size_t r = 0; r < jd.size(); ++r) {
        const std::string wr = origin + ": dist[" + std::to_string(r) + "]";
        const Json& row = as_array(jd[r], wr);
        std::vector<double> vals;
        for (size_t c = 0; c < row.size(); ++c)
            vals.push_back(as_number(row[c], wr + "[" + std::to_string(c) + "]"));
        dist.push_back(std::move(vals));
    }
    return make_space(std::move(labels), std::move(dist));
}

CxaElement parse_element_text(const std::string& text, const std::string& origin,
                              const SpacePtr& space, const ChainPtr& chain) {
    const Json doc = parse_json(text, origin);
    std::vector<AlgebraElement> values =
        parse_value_list(field(doc, "values", origin), origin + ": values", space, chain);
    return make_cxa_element(space, chain, std::move(values));
}

CxaState parse_state_text(const std::string& text, const std::string& origin,
                          const SpacePtr& space, const ChainPtr& chain) {
    const Json doc = parse_json(text, origin);
    std::vector<AlgebraElement> densities =
        parse_value_list(field(doc, "densities", origin), origin + ": densities", space, chain);
    return make_cxa_state(space, chain, std::move(densities));
}

AfChain parse_chain(const std::string& path) {
    return AfChain(parse_chain_text(read_text_file(path), path));
}

FiniteMetricSpace parse_space(const std::string& path) {
    return parse_space_text(read_text_file(path), path);
}

CxaElement parse_element(const std::string& path, const SpacePtr& space, const ChainPtr& chain) {
    return parse_element_text(read_text_file(path), path, space, chain);
}

CxaState parse_state(const std::string& path, const SpacePtr& space, const ChainPtr& chain) {
    return parse_state_text(read_text_file(path), path, space, chain);
}

std::string serialize_chain(const ChainData& data) {
    Json doc = Json::object();
    Json blocks = Json::array();
    for (const BlockAlgebra& alg : data.levels) blocks.push_back(alg.block_sizes);
    doc["blocks"] = std::move(blocks);
    Json mult = Json::array();
    for (const MultiplicityEmbedding& e : data.embeddings) mult.push_back(e.mult);
    doc["mult"] = std::move(mult);
    doc["trace_weights"] = data.top_trace_weights;
    doc["beta"] = data.beta;
    return doc.dump(2) + "\n";
}

std::string serialize_space(const FiniteMetricSpace& x) {
    Json doc = Json::object();
    doc["labels"] = x.labels;
    doc["dist"] = x.dist;
    return doc.dump(2) + "\n";
}

std::string serialize_element(const CxaElement& g) {
    Json doc = Json::object();
    doc["values"] = value_list_to_json(g.values);
    return doc.dump(2) + "\n";
}

std::string serialize_state(const CxaState& s) {
    Json doc = Json::object();
    doc["densities"] = value_list_to_json(s.densities);
    return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out << content;
    if (!out) throw ParseError(path + ": write failed");
}

} // namespace qmetric
