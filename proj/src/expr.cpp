#include "su2pdo/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "su2pdo/calculus.hpp"
#include "su2pdo/symbol.hpp"

namespace su2pdo::expr {

namespace {

const char* kAtomNames[] = {"I", "D+", "D-", "D0", "A1", "A2", "A3", "Lap", "q+", "q-", "q0"};

bool is_atom_name(const std::string& s) {
  for (const char* a : kAtomNames)
    if (s == a) return true;
  return false;
}

std::string atom_list() {
  std::string out;
  for (const char* a : kAtomNames) {
    if (!out.empty()) out += ", ";
    out += a;
  }
  return out;
}

struct Token {
  enum Type { Ident, Number, Plus, Minus, Star, Caret, LParen, RParen, End } type;
  std::string text;
  double num = 0.0;
  int pos = 0;  // 1-based
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> ts;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    const int pos = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i + 1;
      while (j < n && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
      std::string word = text.substr(i, j - i);
      // D and q bind a following sign into the atom name (D+, q-).
      if ((word == "D" || word == "q") && j < n && (text[j] == '+' || text[j] == '-')) {
        word += text[j];
        ++j;
      }
      ts.push_back({Token::Ident, word, 0.0, pos});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < n && text[j] == '.') {
        ++j;
        while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < n && (text[j] == 'e' || text[j] == 'E')) {
        size_t k = j + 1;
        if (k < n && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) {
          j = k;
          while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        }
      }
      std::string lit = text.substr(i, j - i);
      if (lit == ".") throw ExprError("malformed number '.'", pos);
      ts.push_back({Token::Number, lit, std::strtod(lit.c_str(), nullptr), pos});
      i = j;
      continue;
    }
    Token::Type t;
    switch (c) {
      case '+': t = Token::Plus; break;
      case '-': t = Token::Minus; break;
      case '*': t = Token::Star; break;
      case '^': t = Token::Caret; break;
      case '(': t = Token::LParen; break;
      case ')': t = Token::RParen; break;
      default: {
        std::ostringstream os;
        os << "unexpected character '" << c << "'";
        throw ExprError(os.str(), pos);
      }
    }
    ts.push_back({t, std::string(1, c), 0.0, pos});
    ++i;
  }
  ts.push_back({Token::End, "", 0.0, static_cast<int>(n) + 1});
  return ts;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> ts) : ts_(std::move(ts)) {}

  Node run() {
    Node e = expr();
    if (cur().type != Token::End) fail("unexpected trailing input");
    return e;
  }

 private:
  const Token& cur() const { return ts_[at_]; }

  void advance() { ++at_; }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << what << " at position " << cur().pos;
    throw ExprError(os.str(), cur().pos);
  }

  Node expr() {
    std::vector<Node> terms;
    terms.push_back(term());
    while (cur().type == Token::Plus || cur().type == Token::Minus) {
      const bool minus = cur().type == Token::Minus;
      advance();
      Node t = term();
      if (minus) {
        Node neg;
        neg.kind = Kind::Product;
        Node s;
        s.kind = Kind::Scalar;
        s.value = -1.0;
        neg.children.push_back(std::move(s));
        neg.children.push_back(std::move(t));
        terms.push_back(std::move(neg));
      } else {
        terms.push_back(std::move(t));
      }
    }
    if (terms.size() == 1) return std::move(terms[0]);
    Node s;
    s.kind = Kind::Sum;
    s.children = std::move(terms);
    return s;
  }

  Node term() {
    std::vector<Node> factors;
    factors.push_back(factor());
    while (cur().type == Token::Star) {
      advance();
      factors.push_back(factor());
    }
    if (factors.size() == 1) return std::move(factors[0]);
    Node p;
    p.kind = Kind::Product;
    p.children = std::move(factors);
    return p;
  }

  Node factor() {
    Node a = atom();
    if (cur().type != Token::Caret) return a;
    advance();
    if (cur().type != Token::Number) fail("expected unsigned integer exponent");
    const Token& t = cur();
    for (char c : t.text)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        fail("expected unsigned integer exponent");
    Node p;
    p.kind = Kind::Power;
    p.exponent = static_cast<int>(t.num);
    p.children.push_back(std::move(a));
    advance();
    return p;
  }

  Node atom() {
    const Token& t = cur();
    if (t.type == Token::Ident) {
      if (!is_atom_name(t.text)) {
        std::ostringstream os;
        os << "unknown identifier '" << t.text << "' at position " << t.pos
           << " (known: " << atom_list() << ")";
        throw ExprError(os.str(), t.pos);
      }
      Node n;
      n.kind = Kind::Op;
      n.op = t.text;
      advance();
      return n;
    }
    if (t.type == Token::Number) {
      Node n;
      n.kind = Kind::Scalar;
      n.value = t.num;
      advance();
      return n;
    }
    if (t.type == Token::LParen) {
      advance();
      Node e = expr();
      if (cur().type != Token::RParen) fail("expected ')'");
      advance();
      return e;
    }
    fail("expected an atom");
  }

  std::vector<Token> ts_;
  size_t at_ = 0;
};

int q_channel(const std::string& op) { return op == "q+" ? +1 : (op == "q-" ? -1 : 0); }

}  // namespace

Node parse(const std::string& text) { return Parser(tokenize(text)).run(); }

std::string to_string(const Node& n) {
  std::ostringstream os;
  switch (n.kind) {
    case Kind::Op:
      os << n.op;
      break;
    case Kind::Scalar:
      os << "Scalar(" << n.value << ")";
      break;
    case Kind::Sum:
    case Kind::Product: {
      os << (n.kind == Kind::Sum ? "Sum(" : "Product(");
      for (size_t i = 0; i < n.children.size(); ++i) {
        if (i) os << ", ";
        os << to_string(n.children[i]);
      }
      os << ")";
      break;
    }
    case Kind::Power:
      os << "Power(" << to_string(n.children[0]) << ", " << n.exponent << ")";
      break;
  }
  return os.str();
}

bool uses_multiplication(const Node& n) {
  if (n.kind == Kind::Op) return n.op[0] == 'q';
  for (const Node& c : n.children)
    if (uses_multiplication(c)) return true;
  return false;
}

CoeffStack apply(const Node& n, const CoeffStack& f) {
  switch (n.kind) {
    case Kind::Op: {
      if (n.op[0] == 'q') return q_times(f, q_channel(n.op));
      if (n.op == "I") return f;
      return apply_symbol(builtin_symbol(n.op, f.band_x2()), f);
    }
    case Kind::Scalar:
      return lc({{n.value, &f}});
    case Kind::Sum: {
      CoeffStack out = zero_stack(0);
      for (const Node& c : n.children) {
        CoeffStack t = apply(c, f);
        out = lc({{1.0, &out}, {1.0, &t}});
      }
      return out;
    }
    case Kind::Product: {
      CoeffStack g = f;
      for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) g = apply(*it, g);
      return g;
    }
    case Kind::Power: {
      CoeffStack g = f;
      for (int i = 0; i < n.exponent; ++i) g = apply(n.children[0], g);
      return g;
    }
  }
  throw std::logic_error("unreachable expression kind");
}

namespace {

InvariantSymbol scale_invariant(InvariantSymbol s, cplx c) {
  for (int l = 0; l <= s.band_x2(); ++l) s.block(l) *= c;
  return s;
}

Symbol sum_symbols(std::vector<Symbol> parts, const VCtxPtr& ctx, int xi_max) {
  bool allinv = true;
  for (const Symbol& p : parts)
    if (!p.invariant()) allinv = false;
  if (allinv) {
    std::vector<std::pair<cplx, const CoeffStack*>> ts;
    for (const Symbol& p : parts) ts.push_back({1.0, &p.inv->blocks});
    return Symbol(InvariantSymbol(lc(ts)));
  }
  std::vector<VaryingSymbol> hold;
  hold.reserve(parts.size());
  for (const Symbol& p : parts)
    hold.push_back(p.invariant() ? vs_from_invariant(ctx, *p.inv, xi_max) : *p.var);
  std::vector<std::pair<cplx, const VaryingSymbol*>> ts;
  for (const VaryingSymbol& h : hold) ts.push_back({1.0, &h});
  return Symbol(vs_lc(ts));
}

Symbol build_symbol(const Node& n, int inv_band, const VCtxPtr& ctx, int xi_max, int order) {
  switch (n.kind) {
    case Kind::Op: {
      if (n.op[0] == 'q') {
        if (!ctx) throw std::invalid_argument("multiplication atoms need a varying context");
        return Symbol(vs_mult_function(ctx, q_function(q_channel(n.op)), xi_max));
      }
      return Symbol(builtin_symbol(n.op, inv_band));
    }
    case Kind::Scalar:
      return Symbol(scale_invariant(builtin_symbol("I", inv_band), n.value));
    case Kind::Sum: {
      std::vector<Symbol> parts;
      parts.reserve(n.children.size());
      for (const Node& c : n.children) parts.push_back(build_symbol(c, inv_band, ctx, xi_max, order));
      return sum_symbols(std::move(parts), ctx, xi_max);
    }
    case Kind::Product: {
      Symbol acc = build_symbol(n.children.back(), inv_band, ctx, xi_max, order);
      for (auto it = std::next(n.children.rbegin()); it != n.children.rend(); ++it)
        acc = compose(build_symbol(*it, inv_band, ctx, xi_max, order), acc, order);
      return acc;
    }
    case Kind::Power: {
      Symbol base = build_symbol(n.children[0], inv_band, ctx, xi_max, order);
      if (n.exponent == 0) return Symbol(builtin_symbol("I", inv_band));
      Symbol acc = base;
      for (int i = 1; i < n.exponent; ++i) acc = compose(base, acc, order);
      return acc;
    }
  }
  throw std::logic_error("unreachable expression kind");
}

}  // namespace

Symbol symbol_of(const Node& n, int inv_band_x2, const VCtxPtr& ctx, int xi_max_x2, int order) {
  const bool q = uses_multiplication(n);
  const int band = q ? xi_max_x2 : inv_band_x2;
  return build_symbol(n, band, q ? ctx : VCtxPtr(), xi_max_x2, order);
}

}  // namespace su2pdo::expr
