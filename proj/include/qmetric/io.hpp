#pragma once

#include "qmetric/chain.hpp"
#include "qmetric/cxa.hpp"
#include "qmetric/mk.hpp"
#include "qmetric/spaces.hpp"

#include <string>

namespace qmetric {

// JSON documents, one object per file.
//
//   chain:   {"blocks": [[1],[2,1],...], "mult": [[[...]],...],
//             "trace_weights": [...], "beta": [...]}
//            mult[n] has one row per block of level n and one column per
//            block of level n+1.
//   space:   {"labels": [...], "dist": [[...],...]}
//   element: {"values": [per point, per block, matrix rows of [re, im]]}
//   state:   {"densities": same nesting as element values}
//
// Parse errors carry the origin plus a line/column or field path; objects are
// fully validated before being returned.  serialize(parse(x)) re-parses to an
// equal object, with stable key order and shortest round-trip decimals.

ChainData parse_chain_text(const std::string& text, const std::string& origin);
FiniteMetricSpace parse_space_text(const std::string& text, const std::string& origin);
CxaElement parse_element_text(const std::string& text, const std::string& origin,
                              const SpacePtr& space, const ChainPtr& chain);
CxaState parse_state_text(const std::string& text, const std::string& origin,
                          const SpacePtr& space, const ChainPtr& chain);

AfChain parse_chain(const std::string& path);
FiniteMetricSpace parse_space(const std::string& path);
CxaElement parse_element(const std::string& path, const SpacePtr& space, const ChainPtr& chain);
CxaState parse_state(const std::string& path, const SpacePtr& space, const ChainPtr& chain);

std::string serialize_chain(const ChainData& data);
std::string serialize_space(const FiniteMetricSpace& x);
std::string serialize_element(const CxaElement& g);
std::string serialize_state(const CxaState& s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace qmetric
