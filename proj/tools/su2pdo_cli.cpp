#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "su2pdo/calculus.hpp"
#include "su2pdo/check.hpp"
#include "su2pdo/expr.hpp"
#include "su2pdo/fourier.hpp"
#include "su2pdo/json_io.hpp"
#include "su2pdo/kernels.hpp"
#include "su2pdo/stack.hpp"
#include "su2pdo/symbol.hpp"
#include "su2pdo/vsym.hpp"

namespace {

using su2pdo::io::json;

struct Opts {
  std::string in = "-";
  std::string out = "-";
  std::string file_a;
  std::string file_b;
  std::string op_text;
  std::string symbol_file;
  std::string which;
  std::string mode = "exact";
  std::string suite = "all";
  std::vector<int> alpha;
  int band_x2 = 8;
  int f_band_x2 = -1;
  int order = 2;
  int grid_band_x2 = 0;  // 0 = derive from the x-band
  int n_phi = 0, n_theta = 0, n_psi = 0;
  bool deterministic = false;
  bool print_config = false;
};

// Smallest grid band whose certified product band covers products of three
// band-limited factors at the given x-band.
int auto_grid_band(int xband_x2) { return (3 * xband_x2 + 2) / 4; }

su2pdo::VCtxPtr make_context(const Opts& o, int xband_x2) {
  const int gb = o.grid_band_x2 > 0 ? o.grid_band_x2 : auto_grid_band(xband_x2);
  return su2pdo::shared_vcontext(su2pdo::quadrature_grid(gb), xband_x2);
}

json config_json(const std::string& cmd, const Opts& o) {
  json j;
  j["command"] = cmd;
  j["band_limit_x2"] = o.band_x2;
  j["order"] = o.order;
  j["grid_band_x2"] = o.grid_band_x2 > 0 ? o.grid_band_x2 : auto_grid_band(o.band_x2);
  j["deterministic"] = o.deterministic;
  j["mode"] = o.mode;
  j["suite"] = o.suite;
  return j;
}

int cmd_analyze(const Opts& o) {
  su2pdo::GridFunction f = su2pdo::io::gridfn_from_json(su2pdo::io::load_json(o.in));
  su2pdo::CoeffStack c = su2pdo::analyze(*f.grid, f.values, o.band_x2, o.f_band_x2);
  su2pdo::io::save_json(o.out, su2pdo::io::coeff_to_json(c));
  return 0;
}

int cmd_synthesize(const Opts& o) {
  su2pdo::CoeffStack c = su2pdo::io::coeff_from_json(su2pdo::io::load_json(o.in));
  su2pdo::GridPtr g;
  if (o.n_phi > 0 && o.n_theta > 0 && o.n_psi > 0)
    g = su2pdo::quadrature_grid(su2pdo::GridSpec{o.n_phi, o.n_theta, o.n_psi});
  else
    g = su2pdo::quadrature_grid(std::max(o.band_x2, c.band_x2()));
  su2pdo::GridFunction f{g, su2pdo::synthesize(c, *g)};
  su2pdo::io::save_json(o.out, su2pdo::io::gridfn_to_json(f));
  return 0;
}

su2pdo::Symbol symbol_from_opts(const Opts& o, int xi_max_x2) {
  su2pdo::expr::Node n = su2pdo::expr::parse(o.op_text);
  su2pdo::VCtxPtr ctx;
  if (su2pdo::expr::uses_multiplication(n)) ctx = make_context(o, o.band_x2);
  return su2pdo::expr::symbol_of(n, o.band_x2, ctx, xi_max_x2, o.order);
}

int cmd_symbol(const Opts& o) {
  su2pdo::Symbol s = symbol_from_opts(o, o.band_x2);
  su2pdo::io::save_json(o.out, su2pdo::io::symbol_to_json(s));
  return 0;
}

int cmd_diff(const Opts& o) {
  su2pdo::Symbol s = su2pdo::io::symbol_from_json(su2pdo::io::load_json(o.in));
  su2pdo::Symbol d;
  if (!o.alpha.empty()) {
    if (o.alpha.size() != 3) throw std::invalid_argument("--alpha needs three integers");
    d = su2pdo::multi_difference(s, su2pdo::MultiIndex{{o.alpha[0], o.alpha[1], o.alpha[2]}});
  } else if (o.which == "+" || o.which == "-" || o.which == "0") {
    d = su2pdo::difference(s, o.which == "+" ? +1 : (o.which == "-" ? -1 : 0));
  } else {
    throw std::invalid_argument("diff needs --which +|-|0 or --alpha a,b,c");
  }
  su2pdo::io::save_json(o.out, su2pdo::io::symbol_to_json(d));
  return 0;
}

int cmd_compose(const Opts& o) {
  su2pdo::Symbol a = su2pdo::io::symbol_from_json(su2pdo::io::load_json(o.file_a));
  su2pdo::Symbol b = su2pdo::io::symbol_from_json(su2pdo::io::load_json(o.file_b));
  su2pdo::io::save_json(o.out, su2pdo::io::symbol_to_json(su2pdo::compose(a, b, o.order)));
  return 0;
}

int cmd_adjoint(const Opts& o) {
  su2pdo::Symbol s = su2pdo::io::symbol_from_json(su2pdo::io::load_json(o.in));
  su2pdo::io::save_json(o.out, su2pdo::io::symbol_to_json(su2pdo::adjoint_symbol(s, o.order)));
  return 0;
}

int cmd_parametrix(const Opts& o) {
  su2pdo::Symbol s;
  if (!o.op_text.empty())
    s = symbol_from_opts(o, o.band_x2);
  else if (!o.in.empty() && o.in != "-")
    s = su2pdo::io::symbol_from_json(su2pdo::io::load_json(o.in));
  else
    s = su2pdo::io::symbol_from_json(su2pdo::io::load_json("-"));
  su2pdo::SymbolExpansion px = su2pdo::parametrix(s, o.order);
  json j = su2pdo::io::expansion_to_json(px);
  const su2pdo::Symbol& b0 = px.terms.at(0).symbol;
  const int top = b0.invariant() ? b0.inv->band_x2() : b0.var->top_key();
  try {
    j["b0_fitted_order"] = su2pdo::estimate_order(b0, std::min(4, top), top);
  } catch (const su2pdo::NumericalError&) {
    j["b0_fitted_order"] = nullptr;
  }
  su2pdo::io::save_json(o.out, j);
  return 0;
}

int cmd_apply(const Opts& o) {
  if (o.op_text.empty() == o.symbol_file.empty())
    throw std::invalid_argument("apply needs exactly one of --op and --symbol");
  su2pdo::CoeffStack f = su2pdo::io::coeff_from_json(su2pdo::io::load_json(o.in));
  su2pdo::CoeffStack out;
  if (!o.op_text.empty()) {
    out = su2pdo::expr::apply(su2pdo::expr::parse(o.op_text), f);
  } else {
    su2pdo::Symbol s = su2pdo::io::symbol_from_json(su2pdo::io::load_json(o.symbol_file));
    if (s.invariant()) {
      out = su2pdo::apply_symbol(*s.inv, f.truncated(s.inv->band_x2()));
    } else {
      const int band = f.band_x2() + s.var->ctx->xband_x2;
      su2pdo::GridPtr g = su2pdo::quadrature_grid_for_products(band, 2 * band);
      su2pdo::Vec nodal = su2pdo::vs_quantize(*s.var, f, *g);
      out = su2pdo::analyze(*g, nodal, band, band);
    }
  }
  su2pdo::io::save_json(o.out, su2pdo::io::coeff_to_json(out));
  return 0;
}

int cmd_solve(const Opts& o) {
  su2pdo::expr::Node n = su2pdo::expr::parse(o.op_text);
  su2pdo::CoeffStack g = su2pdo::io::coeff_from_json(su2pdo::io::load_json(o.in));
  if (o.mode == "exact") {
    if (su2pdo::expr::uses_multiplication(n))
      throw std::invalid_argument("exact mode needs an invariant operator expression");
    su2pdo::Symbol s =
        su2pdo::expr::symbol_of(n, g.band_x2(), su2pdo::VCtxPtr(), g.band_x2(), o.order);
    su2pdo::CoeffStack f = su2pdo::solve_invariant(*s.inv, g);
    su2pdo::io::save_json(o.out, su2pdo::io::coeff_to_json(f));
    return 0;
  }
  if (o.mode != "parametrix") throw std::invalid_argument("mode must be exact or parametrix");
  const int xband = o.band_x2;
  const int xi_max = g.band_x2() + o.order + 3;
  su2pdo::VCtxPtr ctx = make_context(o, xband);
  su2pdo::Symbol a = su2pdo::expr::symbol_of(n, xi_max, ctx, xi_max, o.order);

  su2pdo::CoeffStack f;
  if (a.invariant()) {
    su2pdo::SymbolExpansion px = su2pdo::parametrix(a, o.order);
    f = su2pdo::apply_symbol(*px.total().inv, g);
  } else {
    su2pdo::SymbolExpansion px = su2pdo::parametrix(a, o.order);
    su2pdo::Symbol b = px.total();
    if (b.var->top_key() < g.band_x2())
      throw su2pdo::NumericalError("parametrix band does not cover the data band");
    const int band = g.band_x2() + xband;
    su2pdo::GridPtr tg = su2pdo::quadrature_grid_for_products(band, 2 * band);
    su2pdo::Vec nodal = su2pdo::vs_quantize(*b.var, g, *tg);
    f = su2pdo::analyze(*tg, nodal, band, band);
  }
  su2pdo::CoeffStack af = su2pdo::expr::apply(n, f);
  su2pdo::CoeffStack r = su2pdo::lc({{1.0, &af}, {-1.0, &g}});
  const double residual = su2pdo::stack_norm(r) / su2pdo::stack_norm(g);
  json rep;
  rep["mode"] = "parametrix";
  rep["order"] = o.order;
  rep["residual"] = residual;
  std::cerr << su2pdo::io::dump(rep);
  su2pdo::io::save_json(o.out, su2pdo::io::coeff_to_json(f));
  return 0;
}

int cmd_check(const Opts& o) {
  std::vector<su2pdo::check::CheckResult> rs = su2pdo::check::run_suite(o.suite);
  json arr = json::array();
  bool all_pass = true;
  for (const auto& r : rs) {
    json e;
    e["name"] = r.name;
    e["pass"] = r.pass;
    e["max_err"] = r.max_err;
    arr.push_back(std::move(e));
    all_pass = all_pass && r.pass;
  }
  su2pdo::io::save_json(o.out, arr);
  return all_pass ? 0 : 4;
}

int cmd_grid(const Opts& o) {
  su2pdo::GridPtr g;
  if (o.n_phi > 0 && o.n_theta > 0 && o.n_psi > 0)
    g = su2pdo::quadrature_grid(su2pdo::GridSpec{o.n_phi, o.n_theta, o.n_psi});
  else
    g = su2pdo::quadrature_grid(o.band_x2);
  json j;
  j["grid"] = su2pdo::io::grid_spec_to_json(g->spec());
  j["node_count"] = g->node_count();
  j["band_x2"] = g->band_x2();
  j["certified_product_band_x2"] = g->certified_product_band_x2();
  j["weight_sum_error"] = std::abs(g->weights().sum() - 1.0);
  j["gram_residual"] = g->gram_residual(std::min(g->band_x2(), 8));
  su2pdo::io::save_json(o.out, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global pseudo-differential operator calculus on SU(2)"};
  app.require_subcommand(0, 1);
  Opts o;

  app.add_flag("--deterministic", o.deterministic,
               "fixed summation order, scalar kernels, fixed seeds");
  app.add_flag("--print-config", o.print_config, "print the effective configuration and exit");

  auto add_common = [&](CLI::App* c, bool with_order = true) {
    c->add_option("--band-limit-x2", o.band_x2, "band limit as a doubled half-integer")
        ->check(CLI::Range(0, 32))
        ->capture_default_str();
    if (with_order)
      c->add_option("--order", o.order, "expansion truncation order")
          ->check(CLI::Range(0, 3))
          ->capture_default_str();
    c->add_option("--out", o.out, "output file (- for stdout)")->capture_default_str();
    c->fallthrough();
  };

  CLI::App* c_analyze = app.add_subcommand("analyze", "grid function -> Fourier coefficients");
  add_common(c_analyze, false);
  c_analyze->add_option("--in", o.in, "grid-function JSON");
  c_analyze->add_option("--f-band-x2", o.f_band_x2, "declared band of the sampled data");

  CLI::App* c_synth = app.add_subcommand("synthesize", "Fourier coefficients -> grid function");
  add_common(c_synth, false);
  c_synth->add_option("--in", o.in, "coefficient JSON");
  c_synth->add_option("--n-phi", o.n_phi, "explicit grid dimension");
  c_synth->add_option("--n-theta", o.n_theta, "explicit grid dimension");
  c_synth->add_option("--n-psi", o.n_psi, "explicit grid dimension");

  CLI::App* c_symbol = app.add_subcommand("symbol", "symbol of an operator expression");
  add_common(c_symbol);
  c_symbol->add_option("--op", o.op_text, "operator expression")->required();
  c_symbol->add_option("--grid-band-x2", o.grid_band_x2,
                       "grid band for multiplication atoms (0 = auto)");

  CLI::App* c_diff = app.add_subcommand("diff", "difference operator on a symbol file");
  add_common(c_diff, false);
  c_diff->add_option("--in", o.in, "symbol JSON");
  c_diff->add_option("--which", o.which, "channel: +, - or 0");
  c_diff->add_option("--alpha", o.alpha, "multi-index a1,a2,a3")->delimiter(',');

  CLI::App* c_compose = app.add_subcommand("compose", "composition expansion of two symbols");
  add_common(c_compose);
  c_compose->add_option("--a", o.file_a, "left symbol JSON")->required();
  c_compose->add_option("--b", o.file_b, "right symbol JSON")->required();

  CLI::App* c_adj = app.add_subcommand("adjoint", "adjoint expansion of a symbol");
  add_common(c_adj);
  c_adj->add_option("--in", o.in, "symbol JSON");

  CLI::App* c_par = app.add_subcommand("parametrix", "parametrix expansion of an elliptic symbol");
  add_common(c_par);
  c_par->add_option("--op", o.op_text, "operator expression");
  c_par->add_option("--in", o.in, "symbol JSON (alternative to --op)");
  c_par->add_option("--grid-band-x2", o.grid_band_x2,
                    "grid band for multiplication atoms (0 = auto)");

  CLI::App* c_apply = app.add_subcommand("apply", "apply an operator to coefficients");
  add_common(c_apply, false);
  c_apply->add_option("--in", o.in, "coefficient JSON");
  c_apply->add_option("--op", o.op_text, "operator expression (exact action)");
  c_apply->add_option("--symbol", o.symbol_file, "symbol JSON (quantized action)");

  CLI::App* c_solve = app.add_subcommand("solve", "solve A f = g");
  add_common(c_solve);
  c_solve->add_option("--op", o.op_text, "operator expression")->required();
  c_solve->add_option("--in", o.in, "right-hand side coefficient JSON");
  c_solve->add_option("--mode", o.mode, "exact or parametrix")->capture_default_str();
  c_solve->add_option("--grid-band-x2", o.grid_band_x2,
                      "grid band for multiplication atoms (0 = auto)");

  CLI::App* c_check = app.add_subcommand("check", "run an invariant suite");
  add_common(c_check, false);
  c_check->add_option("--suite", o.suite, "suite name or 'all'")->capture_default_str();

  CLI::App* c_grid = app.add_subcommand("grid", "quadrature grid report");
  add_common(c_grid, false);
  c_grid->add_option("--n-phi", o.n_phi, "explicit grid dimension");
  c_grid->add_option("--n-theta", o.n_theta, "explicit grid dimension");
  c_grid->add_option("--n-psi", o.n_psi, "explicit grid dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (o.deterministic) su2pdo::kernels::force_scalar(true);

  CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands()[0];
  if (o.print_config) {
    std::cout << su2pdo::io::dump(config_json(sub ? sub->get_name() : "", o));
    return 0;
  }
  if (!sub) {
    std::cerr << app.help();
    return 2;
  }

  try {
    const std::string& name = sub->get_name();
    if (name == "analyze") return cmd_analyze(o);
    if (name == "synthesize") return cmd_synthesize(o);
    if (name == "symbol") return cmd_symbol(o);
    if (name == "diff") return cmd_diff(o);
    if (name == "compose") return cmd_compose(o);
    if (name == "adjoint") return cmd_adjoint(o);
    if (name == "parametrix") return cmd_parametrix(o);
    if (name == "apply") return cmd_apply(o);
    if (name == "solve") return cmd_solve(o);
    if (name == "check") return cmd_check(o);
    if (name == "grid") return cmd_grid(o);
    std::cerr << "error: unknown subcommand\n";
    return 2;
  } catch (const su2pdo::expr::ExprError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const su2pdo::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
