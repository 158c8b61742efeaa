#include "su2pdo/json_io.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace su2pdo::io {

namespace {

json mat_re(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j).real());
    rows.push_back(std::move(r));
  }
  return rows;
}

json mat_im(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j).imag());
    rows.push_back(std::move(r));
  }
  return rows;
}

Mat mat_from(const json& re, const json& im, int expect) {
  if (!re.is_array() || !im.is_array() || re.size() != im.size())
    throw std::invalid_argument("block re/im arrays malformed");
  const int rows = static_cast<int>(re.size());
  if (expect >= 0 && rows != expect)
    throw std::invalid_argument("block dimension does not match l_x2");
  Mat m(rows, rows);
  for (int i = 0; i < rows; ++i) {
    const json& rr = re[i];
    const json& ri = im[i];
    if (!rr.is_array() || static_cast<int>(rr.size()) != rows || ri.size() != rr.size())
      throw std::invalid_argument("block rows malformed");
    for (int j = 0; j < rows; ++j) m(i, j) = cplx(rr[j].get<double>(), ri[j].get<double>());
  }
  return m;
}

json block_entry(int l_x2, const Mat& m, int node) {
  json b;
  b["l_x2"] = l_x2;
  b["node"] = node < 0 ? json(nullptr) : json(node);
  b["re"] = mat_re(m);
  b["im"] = mat_im(m);
  return b;
}

}  // namespace

json coeff_to_json(const CoeffStack& f) {
  json j;
  j["band_limit_x2"] = f.band_x2();
  json blocks = json::array();
  for (int l = 0; l <= f.band_x2(); ++l) {
    json b;
    b["l_x2"] = l;
    b["re"] = mat_re(f.block(l));
    b["im"] = mat_im(f.block(l));
    blocks.push_back(std::move(b));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

CoeffStack coeff_from_json(const json& j) {
  const int band = j.at("band_limit_x2").get<int>();
  if (band < 0 || band > 64) throw std::invalid_argument("band_limit_x2 out of range");
  CoeffStack f(band);
  for (const json& b : j.at("blocks")) {
    const int l = b.at("l_x2").get<int>();
    if (l < 0 || l > band) throw std::invalid_argument("block l_x2 out of range");
    f.block(l) = mat_from(b.at("re"), b.at("im"), l + 1);
  }
  return f;
}

json grid_spec_to_json(const GridSpec& s) {
  json g;
  g["n_phi"] = s.n_phi;
  g["n_theta"] = s.n_theta;
  g["n_psi"] = s.n_psi;
  return g;
}

GridSpec grid_spec_from_json(const json& j) {
  GridSpec s{j.at("n_phi").get<int>(), j.at("n_theta").get<int>(), j.at("n_psi").get<int>()};
  if (s.n_phi < 1 || s.n_theta < 1 || s.n_psi < 1)
    throw std::invalid_argument("grid dimensions must be positive");
  return s;
}

json gridfn_to_json(const GridFunction& f) {
  json j;
  j["grid"] = grid_spec_to_json(f.grid->spec());
  json re = json::array(), im = json::array();
  for (int k = 0; k < f.values.size(); ++k) {
    re.push_back(f.values[k].real());
    im.push_back(f.values[k].imag());
  }
  j["values_re"] = std::move(re);
  j["values_im"] = std::move(im);
  return j;
}

GridFunction gridfn_from_json(const json& j) {
  GridSpec s = grid_spec_from_json(j.at("grid"));
  GridPtr g = quadrature_grid(s);
  const json& re = j.at("values_re");
  const json& im = j.at("values_im");
  if (static_cast<int>(re.size()) != g->node_count() || re.size() != im.size())
    throw std::invalid_argument("values length does not match the grid");
  Vec v(g->node_count());
  for (int k = 0; k < g->node_count(); ++k)
    v[k] = cplx(re[k].get<double>(), im[k].get<double>());
  return GridFunction{g, std::move(v)};
}

json symbol_to_json(const Symbol& s) {
  json j;
  if (s.invariant()) {
    j["band_limit_x2"] = s.inv->band_x2();
    j["layout"] = "invariant";
    j["grid"] = nullptr;
    json blocks = json::array();
    for (int l = 0; l <= s.inv->band_x2(); ++l) blocks.push_back(block_entry(l, s.inv->block(l), -1));
    j["blocks"] = std::move(blocks);
    return j;
  }
  const VaryingSymbol& v = *s.var;
  j["band_limit_x2"] = v.top_key();
  j["layout"] = "varying";
  j["grid"] = grid_spec_to_json(v.ctx->grid->spec());
  const int N = v.ctx->grid->node_count();
  json blocks = json::array();
  for (int r = 0; r < N; ++r) {
    for (const auto& [x, V] : v.blocks) {
      const int d = x + 1;
      Mat nodal = vs_nodal_block(v, x);
      Mat m(d, d);
      for (int ia = 0; ia < d; ++ia)
        for (int ib = 0; ib < d; ++ib) m(ia, ib) = nodal(r, ia * d + ib);
      blocks.push_back(block_entry(x, m, r));
    }
  }
  j["blocks"] = std::move(blocks);
  return j;
}

Symbol symbol_from_json(const json& j) {
  const int band = j.at("band_limit_x2").get<int>();
  if (band < 0 || band > 64) throw std::invalid_argument("band_limit_x2 out of range");
  const std::string layout = j.at("layout").get<std::string>();
  if (layout == "invariant") {
    InvariantSymbol s(band);
    for (const json& b : j.at("blocks")) {
      const int l = b.at("l_x2").get<int>();
      if (l < 0 || l > band) throw std::invalid_argument("block l_x2 out of range");
      s.block(l) = mat_from(b.at("re"), b.at("im"), l + 1);
    }
    return Symbol(s);
  }
  if (layout != "varying") throw std::invalid_argument("layout must be invariant or varying");
  GridSpec spec = grid_spec_from_json(j.at("grid"));
  VCtxPtr ctx = shared_vcontext(quadrature_grid(spec), band);
  const int N = ctx->grid->node_count();
  std::map<int, Mat> nodal;
  for (const json& b : j.at("blocks")) {
    const int l = b.at("l_x2").get<int>();
    const int r = b.at("node").get<int>();
    if (l < 0 || l > band) throw std::invalid_argument("block l_x2 out of range");
    if (r < 0 || r >= N) throw std::invalid_argument("block node index out of range");
    const int d = l + 1;
    auto it = nodal.find(l);
    if (it == nodal.end()) it = nodal.emplace(l, Mat::Zero(N, d * d)).first;
    Mat m = mat_from(b.at("re"), b.at("im"), d);
    for (int ia = 0; ia < d; ++ia)
      for (int ib = 0; ib < d; ++ib) it->second(r, ia * d + ib) = m(ia, ib);
  }
  return Symbol(vs_from_nodal(ctx, nodal));
}

json decay_report_to_json(const DecayReport& r) {
  auto rows = [](const std::vector<DecayRow>& v) {
    json a = json::array();
    for (const DecayRow& d : v) {
      json e;
      e["p"] = d.p;
      e["xi_x2"] = d.xi_x2;
      e["sup"] = d.sup;
      a.push_back(std::move(e));
    }
    return a;
  };
  json j;
  j["m"] = r.m;
  j["entry_rows"] = rows(r.entry_rows);
  j["block_rows"] = rows(r.block_rows);
  json ce = json::array(), cb = json::array();
  for (const auto& v : r.conjugated_entry_rows) ce.push_back(rows(v));
  for (const auto& v : r.conjugated_block_rows) cb.push_back(rows(v));
  j["conjugated_entry_rows"] = std::move(ce);
  j["conjugated_block_rows"] = std::move(cb);
  j["decaying"] = r.decaying;
  return j;
}

json expansion_to_json(const SymbolExpansion& e) {
  json j;
  j["truncation"] = e.truncation;
  json terms = json::array();
  for (const ExpansionTerm& t : e.terms) {
    json te;
    te["order"] = t.order_hint;
    te["symbol"] = symbol_to_json(t.symbol);
    terms.push_back(std::move(te));
  }
  j["terms"] = std::move(terms);
  return j;
}

json load_json(const std::string& path) {
  if (path == "-") return json::parse(std::cin);
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  return json::parse(in);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void save_json(const std::string& path, const json& j) {
  if (path == "-" || path.empty()) {
    std::cout << dump(j);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << dump(j);
}

}  // namespace su2pdo::io
