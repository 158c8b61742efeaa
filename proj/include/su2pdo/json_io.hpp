#pragma once

#include <string>

#include <json.hpp>

#include "su2pdo/calculus.hpp"
#include "su2pdo/fourier.hpp"
#include "su2pdo/stack.hpp"
#include "su2pdo/vsym.hpp"

namespace su2pdo::io {

using json = nlohmann::json;

// Coefficient file:
//   {"band_limit_x2": int,
//    "blocks": [{"l_x2": int, "re": [[...]], "im": [[...]]}, ...]}
// blocks sorted by l_x2; matrix row 0 corresponds to m = -l.
json coeff_to_json(const CoeffStack& f);
CoeffStack coeff_from_json(const json& j);

// Grid-function file:
//   {"grid": {"n_phi": int, "n_theta": int, "n_psi": int},
//    "values_re": [...], "values_im": [...]}
// node order is phi-major: ((i_phi * n_theta + i_theta) * n_psi + i_psi).
json gridfn_to_json(const GridFunction& f);
GridFunction gridfn_from_json(const json& j);

// Symbol file:
//   {"band_limit_x2": int, "layout": "invariant"|"varying",
//    "grid": {...}|null,
//    "blocks": [{"node": int|null, "l_x2": int, "re": [[...]], "im": [[...]]}]}
// varying blocks sorted by (node, l_x2) and evaluated at the grid nodes.
json symbol_to_json(const Symbol& s);
Symbol symbol_from_json(const json& j);

json grid_spec_to_json(const GridSpec& s);
GridSpec grid_spec_from_json(const json& j);

json decay_report_to_json(const DecayReport& r);
json expansion_to_json(const SymbolExpansion& e);

json load_json(const std::string& path);
void save_json(const std::string& path, const json& j);  // "-" writes stdout
std::string dump(const json& j);

}  // namespace su2pdo::io
