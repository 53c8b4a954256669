#include "flamesmith/syntax.hpp"

#include <cctype>
#include <map>

namespace flamesmith {

namespace {

const std::map<std::string, std::pair<const char*, const char*>>& greek() {
  // name -> (unicode, latex)
  static const std::map<std::string, std::pair<const char*, const char*>> table = {
      {"alpha", {"α", "\\alpha"}}, {"beta", {"β", "\\beta"}},   {"gamma", {"γ", "\\gamma"}},
      {"delta", {"δ", "\\delta"}}, {"zeta", {"ζ", "\\zeta"}},   {"eta", {"η", "\\eta"}},
      {"theta", {"θ", "\\theta"}}, {"kappa", {"κ", "\\kappa"}}, {"lambda", {"λ", "\\lambda"}},
      {"mu", {"μ", "\\mu"}},       {"nu", {"ν", "\\nu"}},       {"xi", {"ξ", "\\xi"}},
      {"rho", {"ρ", "\\rho"}},     {"sigma", {"σ", "\\sigma"}}, {"tau", {"τ", "\\tau"}},
      {"phi", {"φ", "\\phi"}},     {"chi", {"χ", "\\chi"}},     {"psi", {"ψ", "\\psi"}},
      {"omega", {"ω", "\\omega"}},
  };
  return table;
}

// Greek letter conventionally used for an element of a Latin-named vector.
std::string element_letter(const std::string& root) {
  static const std::map<std::string, std::string> letters = {
      {"a", "alpha"}, {"b", "beta"}, {"c", "gamma"}, {"d", "delta"}, {"e", "epsilon"},
      {"x", "chi"},   {"y", "psi"},  {"z", "zeta"},  {"u", "upsilon"}, {"v", "nu"},
  };
  auto it = letters.find(root);
  return it == letters.end() ? root : it->second;
}

}  // namespace

std::string display_name(const std::string& name, Style style) {
  if (style == Style::File) return name;
  if (!name.empty() && name[0] == '$') {
    std::string rest = name.substr(1);
    std::string letter = rest.substr(0, 1);
    std::string sub = rest.size() > 1 ? rest.substr(1) : "";
    if (!sub.empty() && sub[0] == '_') sub = sub.substr(1);
    std::string base;
    if (letter == "E")
      base = style == Style::Text ? "ℰ" : "\\mathcal{E}";
    else
      base = style == Style::Text ? letter : "\\mathcal{" + letter + "}";
    if (sub.empty()) return base;
    return style == Style::Text ? base + "_" + sub : base + "_{" + sub + "}";
  }
  auto it = greek().find(name);
  if (it != greek().end()) return style == Style::Text ? it->second.first : it->second.second;
  if (style == Style::Latex) {
    auto us = name.find('_');
    if (us != std::string::npos) return name.substr(0, us) + "_{" + name.substr(us + 1) + "}";
    if (name.size() > 1) return "\\mathit{" + name + "}";
  }
  return name;
}

namespace {

enum Prec { kSum = 1, kProduct = 2, kPower = 3, kAtom = 4 };

class Printer {
 public:
  explicit Printer(Style style) : style_(style) {}

  std::string operator()(const Expr& e) { return print(e).first; }

  std::string path(const VecPath& p) {
    if (p.region == Region::Whole) return display_name(p.root, style_);
    if (p.region == Region::R1) return exposed(p.root);
    if (style_ == Style::Latex) return display_name(p.root, style_) + "_{" + region_suffix(p.region) + "}";
    return p.root + "_" + region_suffix(p.region);
  }

 private:
  std::string exposed(const std::string& root) {
    if (style_ == Style::File) return root + "_1";
    std::string letter = element_letter(root);
    auto it = greek().find(letter);
    if (it == greek().end()) return root + (style_ == Style::Latex ? "_{1}" : "_1");
    return std::string(style_ == Style::Text ? it->second.first : it->second.second) + "_1";
  }

  std::string wrap(const std::pair<std::string, int>& p, int need) {
    if (p.second >= need) return p.first;
    return style_ == Style::Latex ? "\\left(" + p.first + "\\right)" : "(" + p.first + ")";
  }

  const char* minus() const { return style_ == Style::Text ? " − " : " - "; }

  std::string constant(const Rational& v, int& prec) {
    std::string s = to_string(v);
    prec = kAtom;
    if (v < 0 || !is_integer(v)) prec = kProduct;
    if (style_ == Style::Text && v < 0) s = "−" + s.substr(1);
    if (style_ == Style::Latex && !is_integer(v))
      s = std::string(v < 0 ? "-" : "") + "\\frac{" + Rational(abs(v)).get_num().get_str() + "}{" + v.get_den().get_str() + "}";
    return s;
  }

  // Inclusive upper bound of an exclusive one, for math-style sums.
  static Expr inclusive(const Expr& hi) {
    if (hi.is_const()) return Expr::constant(hi.value() - 1);
    if (hi.kind() == ExprKind::Add && hi.rhs().is_const(1)) return hi.lhs();
    if (hi.kind() == ExprKind::Sub && hi.rhs().is_const()) return Expr::sub(hi.lhs(), Expr::constant(hi.rhs().value() + 1));
    return Expr::sub(hi, num(1));
  }

  std::string script(const Expr& e) {
    auto p = print(e);
    if (style_ == Style::File) return wrap(p, kAtom);
    if (p.first.size() == 1) return p.first;
    return "{" + p.first + "}";
  }

  std::pair<std::string, int> print(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Const: {
        int prec = kAtom;
        std::string s = constant(e.value(), prec);
        return {s, prec};
      }
      case ExprKind::Var: return {display_name(e.name(), style_), kAtom};
      case ExprKind::Elem: {
        if (e.path().region == Region::R1 && e.index().is_const(0)) return {exposed(e.path().root), kAtom};
        if (style_ == Style::File) return {path(e.path()) + "[" + print(e.index()).first + "]", kAtom};
        if (e.path().region == Region::Whole) return {path(e.path()) + "_" + script(e.index()), kAtom};
        std::string p = path(e.path());
        return {(style_ == Style::Latex ? "(" + p + ")" : "(" + p + ")") + "_" + script(e.index()), kAtom};
      }
      case ExprKind::Sum: {
        std::string i = display_name(e.name(), style_);
        if (style_ == Style::File)
          return {"sum(" + i + " = " + print(e.lo()).first + " ..< " + print(e.hi()).first + ", " + print(e.body()).first +
                      ")",
                  kAtom};
        std::string lo = print(e.lo()).first;
        std::string hi = print(inclusive(e.hi())).first;
        std::string body = wrap(print(e.body()), kProduct);
        if (style_ == Style::Text) return {"Σ_{" + i + "=" + lo + "}^{" + hi + "} " + body, kSum};
        return {"\\sum_{" + i + "=" + lo + "}^{" + hi + "} " + body, kSum};
      }
      case ExprKind::Add: return {wrap(print(e.lhs()), kSum) + " + " + wrap(print(e.rhs()), kSum + 1), kSum};
      case ExprKind::Sub: return {wrap(print(e.lhs()), kSum) + minus() + wrap(print(e.rhs()), kSum + 1), kSum};
      case ExprKind::Mul: {
        const char* op = style_ == Style::File ? " * " : style_ == Style::Text ? " × " : " \\times ";
        // Math notation writes a coefficient or sum next to its factor.
        return {wrap(print(e.lhs()), kProduct) + op + wrap(print(e.rhs()), kProduct + 1), kProduct};
      }
      case ExprKind::Div: {
        if (style_ == Style::Latex)
          return {"\\frac{" + print(e.lhs()).first + "}{" + print(e.rhs()).first + "}", kAtom};
        return {wrap(print(e.lhs()), kProduct) + " / " + wrap(print(e.rhs()), kProduct + 1), kProduct};
      }
      case ExprKind::Pow: {
        std::string base = wrap(print(e.lhs()), kAtom);
        return {base + "^" + script(e.rhs()), kPower};
      }
      case ExprKind::Len: return {"m(" + path(e.path()) + ")", kAtom};
      case ExprKind::Poly: {
        std::string f = style_ == Style::File ? "pi" : style_ == Style::Text ? "π" : "\\pi";
        return {f + "(" + path(e.path()) + ", " + print(e.point()).first + ")", kAtom};
      }
    }
    return {"?", kAtom};
  }

  Style style_;
};

const char* rel_symbol(Rel r, Style style) {
  switch (r) {
    case Rel::Eq: return "=";
    case Rel::Ne: return style == Style::File ? "!=" : style == Style::Text ? "≠" : "\\neq";
    case Rel::Le: return style == Style::File ? "<=" : style == Style::Text ? "≤" : "\\leq";
    case Rel::Lt: return "<";
  }
  return "?";
}

bool is_false_atom(const Atom& a) { return a.rel == Rel::Lt && a.lhs.is_const(0) && a.rhs.is_const(0); }

}  // namespace

std::string print(const Expr& e, Style style) { return Printer(style)(e); }

std::string print(const Atom& a, Style style) {
  if (is_false_atom(a)) return style == Style::Latex ? "\\mathrm{false}" : "false";
  return print(a.lhs, style) + " " + rel_symbol(a.rel, style) + " " + print(a.rhs, style);
}

std::string print(const Predicate& p, Style style) {
  if (p.atoms.empty()) return style == Style::Latex ? "\\mathrm{true}" : "true";
  const char* conj = style == Style::File ? " && " : style == Style::Text ? " ∧ " : " \\wedge ";
  std::string out;
  for (std::size_t i = 0; i < p.atoms.size(); ++i) {
    const Atom& a = p.atoms[i];
    if (i) out += conj;
    out += print(a, style);
    // Chains like 0 <= k <= n read better outside the file format.
    while (style != Style::File && i + 1 < p.atoms.size() && a.rel != Rel::Eq && a.rel != Rel::Ne &&
           !is_false_atom(a)) {
      const Atom& b = p.atoms[i + 1];
      if ((b.rel != Rel::Le && b.rel != Rel::Lt) || b.lhs != p.atoms[i].rhs) break;
      if (p.atoms[i].rel != Rel::Le && p.atoms[i].rel != Rel::Lt) break;
      out += std::string(" ") + rel_symbol(b.rel, style) + " " + print(b.rhs, style);
      ++i;
    }
  }
  return out;
}

std::string print(const Stmt& s, Style style) {
  Printer pr(style);
  const bool file = style == Style::File;
  const char* arrow = style == Style::Text ? " → " : " \\rightarrow ";
  const char* back = style == Style::Text ? " ← " : " \\leftarrow ";
  auto stack = [&](std::vector<std::string> parts) {
    std::string out;
    if (style == Style::Latex) {
      out = "\\left(\\begin{array}{c}";
      for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " \\\\ \\hline " : "") + parts[i];
      return out + "\\end{array}\\right)";
    }
    out = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " / " : "") + parts[i];
    return out + ")";
  };
  auto two = [&](const std::string& v) {
    return stack({pr.path({v, Region::T}), pr.path({v, Region::B})});
  };
  auto three = [&](const std::string& v) {
    return stack({pr.path({v, Region::R0}), pr.path({v, Region::R1}), pr.path({v, Region::R2})});
  };
  switch (s.kind) {
    case StmtKind::Skip: return "skip";
    case StmtKind::Assign: {
      std::string lhs, rhs;
      for (std::size_t i = 0; i < s.targets.size(); ++i) {
        lhs += (i ? ", " : "") + display_name(s.targets[i], style);
        rhs += (i ? ", " : "") + print(s.exprs[i], style);
      }
      return lhs + " := " + rhs;
    }
    case StmtKind::Seq: {
      std::string out;
      for (std::size_t i = 0; i < s.body.size(); ++i) out += (i ? "; " : "") + print(s.body[i], style);
      return out;
    }
    case StmtKind::While:
      return "while " + print(s.guard, style) + " do " + print(s.body.at(0), style) + " od";
    case StmtKind::PartitionInit:
      if (file) return "partition " + s.vec + (s.split == SplitAt::Top ? " top" : " bottom");
      return display_name(s.vec, style) + arrow + two(s.vec);
    case StmtKind::Repartition:
      if (file) return "repartition " + s.vec + (s.expose == Expose::FromBottom ? " from-bottom" : " from-top");
      return two(s.vec) + arrow + three(s.vec);
    case StmtKind::MergeBack:
      if (file) return "merge " + s.vec + (s.expose == Expose::FromBottom ? " from-bottom" : " from-top");
      return two(s.vec) + back + three(s.vec);
    case StmtKind::CounterIncr: {
      if (file) return s.vec + " += " + std::to_string(s.amount);
      std::string c = display_name(s.vec, style);
      return c + " := " + c + " + " + std::to_string(s.amount);
    }
  }
  return "?";
}

namespace {

enum class Tok { Ident, Number, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> tokenize(std::string_view text, std::size_t line, std::size_t column) {
  static const char* ops[] = {"..<", ":=", "+=", "!=", "<=", ">=", "&&", "+", "-", "*", "/", "^", "(",
                              ")",   "[",  "]",  ",",  "=",  "<",  ">",  ";"};
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++column;
      continue;
    }
    Token t;
    t.line = line;
    t.column = column;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t j = i + 1;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(text.substr(i, j - i));
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = Tok::Number;
      t.text = std::string(text.substr(i, j - i));
    } else {
      for (const char* op : ops) {
        std::string_view o(op);
        if (text.substr(i, o.size()) == o) {
          t.kind = Tok::Op;
          t.text = std::string(o);
          break;
        }
      }
      if (t.kind != Tok::Op) throw ParseError(line, column, "a token", std::string(1, c));
    }
    i += t.text.size();
    column += t.text.size();
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = column;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const ParseScope& scope)
      : toks_(tokenize(text, scope.line, scope.column)), scope_(scope) {}

  Expr expression() {
    Expr e = term();
    while (peek_op("+") || peek_op("-")) {
      bool plus = next().text == "+";
      Expr r = term();
      e = plus ? Expr::add(e, r) : Expr::sub(e, r);
    }
    return e;
  }

  Predicate predicate() {
    std::vector<Atom> atoms;
    do {
      if (peek_ident("true") && !is_relop(toks_[pos_ + 1])) {
        next();
        continue;
      }
      if (peek_ident("false") && !is_relop(toks_[pos_ + 1])) {
        next();
        atoms.push_back(Predicate::falsity().atoms[0]);
        continue;
      }
      Expr lhs = expression();
      if (!is_relop(peek())) fail("a comparison");
      while (is_relop(peek())) {
        std::string op = next().text;
        Expr rhs = expression();
        if (op == "=") atoms.push_back(eq(lhs, rhs));
        else if (op == "!=") atoms.push_back(ne(lhs, rhs));
        else if (op == "<=") atoms.push_back(le(lhs, rhs));
        else if (op == "<") atoms.push_back(lt(lhs, rhs));
        else if (op == ">=") atoms.push_back(le(rhs, lhs));
        else atoms.push_back(lt(rhs, lhs));
        lhs = rhs;
      }
    } while (accept_op("&&"));
    return Predicate(std::move(atoms));
  }

  Stmt statement() {
    std::vector<Stmt> parts{simple()};
    while (accept_op(";")) parts.push_back(simple());
    return seq(std::move(parts));
  }

  void finish() {
    if (peek().kind != Tok::End) fail("end of input");
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool peek_op(const char* op) const { return peek().kind == Tok::Op && peek().text == op; }
  bool peek_ident(const char* id) const { return peek().kind == Tok::Ident && peek().text == id; }
  static bool is_relop(const Token& t) {
    return t.kind == Tok::Op &&
           (t.text == "=" || t.text == "!=" || t.text == "<=" || t.text == "<" || t.text == ">=" || t.text == ">");
  }
  bool accept_op(const char* op) {
    if (!peek_op(op)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    throw ParseError(t.line, t.column, expected, t.kind == Tok::End ? "end of input" : t.text);
  }
  void expect_op(const char* op) {
    if (!accept_op(op)) fail(std::string("'") + op + "'");
  }
  std::string ident() {
    if (peek().kind != Tok::Ident) fail("a name");
    return next().text;
  }
  void expect_ident(const char* id) {
    if (!peek_ident(id)) fail(std::string("'") + id + "'");
    next();
  }

  std::optional<VecPath> resolve(const std::string& name) const {
    if (scope_.vectors.count(name)) return VecPath{name, Region::Whole};
    auto us = name.rfind('_');
    if (us == std::string::npos) return std::nullopt;
    std::string root = name.substr(0, us);
    std::string suffix = name.substr(us + 1);
    if (!scope_.vectors.count(root)) return std::nullopt;
    static const std::map<std::string, Region> regions = {
        {"T", Region::T}, {"B", Region::B}, {"0", Region::R0}, {"1", Region::R1}, {"2", Region::R2}};
    auto it = regions.find(suffix);
    if (it == regions.end()) return std::nullopt;
    return VecPath{root, it->second};
  }

  VecPath path() {
    const Token& t = peek();
    std::string name = ident();
    auto p = resolve(name);
    if (!p) throw ParseError(t.line, t.column, "a vector or vector region", name);
    return *p;
  }

  Expr term() {
    Expr e = unary();
    while (peek_op("*") || peek_op("/")) {
      bool mul = next().text == "*";
      Expr r = unary();
      e = mul ? Expr::mul(e, r) : Expr::div(e, r);
    }
    return e;
  }

  Expr unary() {
    if (accept_op("-")) {
      if (peek().kind == Tok::Number && !(toks_[pos_ + 1].kind == Tok::Op && toks_[pos_ + 1].text == "^"))
        return Expr::constant(-Rational(next().text));
      return Expr::mul(num(-1), unary());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept_op("^")) return Expr::pow(base, unary());
    return base;
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) return Expr::constant(Rational(next().text));
    if (accept_op("(")) {
      Expr e = expression();
      expect_op(")");
      return e;
    }
    if (t.kind != Tok::Ident) fail("an expression");
    std::string name = next().text;
    if (name == "sum" && accept_op("(")) {
      std::string bound = ident();
      Expr lo, hi;
      if (accept_op("=")) {
        lo = expression();
        expect_op("..<");
        hi = expression();
      } else {
        expect_op(",");
        lo = expression();
        expect_op(",");
        Expr inclusive = expression();
        // Inclusive upper bounds become exclusive here, once.
        if (inclusive.kind() == ExprKind::Sub && inclusive.rhs().is_const(1))
          hi = inclusive.lhs();
        else if (inclusive.is_const())
          hi = Expr::constant(inclusive.value() + 1);
        else
          hi = Expr::add(inclusive, num(1));
      }
      expect_op(",");
      Expr body = expression();
      expect_op(")");
      return Expr::sum(bound, lo, hi, body);
    }
    if (name == "m" && accept_op("(")) {
      VecPath p = path();
      expect_op(")");
      return Expr::len(p);
    }
    if (name == "pi" && accept_op("(")) {
      VecPath p = path();
      expect_op(",");
      Expr point = expression();
      expect_op(")");
      return Expr::poly(p, point);
    }
    auto p = resolve(name);
    if (accept_op("[")) {
      if (!p) throw ParseError(t.line, t.column, "a vector", name);
      Expr idx = expression();
      expect_op("]");
      return Expr::elem(*p, idx);
    }
    if (p && p->region == Region::R1) return Expr::exposed(p->root);
    if (p) throw ParseError(t.line, t.column, "a scalar", name);
    return Expr::var(name);
  }

  Expose direction() {
    std::string first = ident();
    if (first != "from") fail("'from-bottom' or 'from-top'");
    expect_op("-");
    std::string which = ident();
    if (which == "bottom") return Expose::FromBottom;
    if (which == "top") return Expose::FromTop;
    --pos_;
    fail("'bottom' or 'top'");
  }

  Stmt simple() {
    if (peek_ident("skip")) {
      next();
      return skip();
    }
    if (peek_ident("partition")) {
      next();
      std::string v = path().root;
      std::string where = ident();
      if (where != "top" && where != "bottom") {
        --pos_;
        fail("'top' or 'bottom'");
      }
      return partition(v, where == "top" ? SplitAt::Top : SplitAt::Bottom);
    }
    if (peek_ident("repartition") || peek_ident("merge")) {
      bool re = next().text == "repartition";
      std::string v = path().root;
      Expose e = direction();
      return re ? repartition(v, e) : merge_back(v, e);
    }
    if (peek_ident("while")) {
      next();
      Predicate g = predicate();
      expect_ident("do");
      Stmt body = statement();
      expect_ident("od");
      return loop(std::move(g), std::move(body));
    }
    std::vector<std::string> targets{ident()};
    if (accept_op("+=")) {
      bool neg = accept_op("-");
      if (peek().kind != Tok::Number) fail("an integer increment");
      long amount = std::stol(next().text);
      return counter_incr(targets[0], neg ? -amount : amount);
    }
    while (accept_op(",")) targets.push_back(ident());
    expect_op(":=");
    std::vector<Expr> exprs{expression()};
    while (accept_op(",")) exprs.push_back(expression());
    if (exprs.size() != targets.size()) fail(std::to_string(targets.size()) + " expressions");
    return assign(std::move(targets), std::move(exprs));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const ParseScope& scope_;
};

}  // namespace

Expr parse_expr(std::string_view text, const ParseScope& scope) {
  Parser p(text, scope);
  Expr e = p.expression();
  p.finish();
  return e;
}

Predicate parse_predicate(std::string_view text, const ParseScope& scope) {
  Parser p(text, scope);
  Predicate q = p.predicate();
  p.finish();
  return q;
}

Stmt parse_stmt(std::string_view text, const ParseScope& scope) {
  Parser p(text, scope);
  Stmt s = p.statement();
  p.finish();
  return s;
}

}  // namespace flamesmith
