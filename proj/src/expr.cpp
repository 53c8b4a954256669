#include "flamesmith/expr.hpp"

#include "flamesmith/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace flamesmith {

const char* to_string(DerivationErrorKind kind) {
  switch (kind) {
    case DerivationErrorKind::UnsplittableForm: return "UnsplittableForm";
    case DerivationErrorKind::NoGuardFound: return "NoGuardFound";
    case DerivationErrorKind::NoInitFound: return "NoInitFound";
    case DerivationErrorKind::NoTemplateMatch: return "NoTemplateMatch";
    case DerivationErrorKind::UnsupportedStatement: return "UnsupportedStatement";
    case DerivationErrorKind::TargetAbsent: return "TargetAbsent";
    case DerivationErrorKind::IncompleteWorksheet: return "IncompleteWorksheet";
    case DerivationErrorKind::UnsupportedRecurrence: return "UnsupportedRecurrence";
    case DerivationErrorKind::VacuousPrecondition: return "VacuousPrecondition";
  }
  return "DerivationError";
}

std::string region_suffix(Region r) {
  switch (r) {
    case Region::Whole: return "";
    case Region::T: return "T";
    case Region::B: return "B";
    case Region::R0: return "0";
    case Region::R1: return "1";
    case Region::R2: return "2";
  }
  return "";
}

std::string path_name(const VecPath& p) {
  return p.region == Region::Whole ? p.root : p.root + "_" + region_suffix(p.region);
}

struct Expr::Node {
  ExprKind kind = ExprKind::Const;
  Rational value;
  std::string name;
  VecPath path;
  std::vector<Expr> kids;
};

namespace {

std::shared_ptr<const Expr::Node> zero_node() {
  static const auto node = std::make_shared<const Expr::Node>();
  return node;
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(Rational value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Const;
  n->value = std::move(value);
  return Expr(std::move(n));
}

Expr Expr::integer(long value) { return constant(Rational(value)); }

Expr Expr::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Var;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::elem(VecPath vec, Expr index) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Elem;
  n->path = std::move(vec);
  n->kids = {std::move(index)};
  return Expr(std::move(n));
}

Expr Expr::sum(std::string bound, Expr lo, Expr hi, Expr body) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Sum;
  n->name = std::move(bound);
  n->kids = {std::move(lo), std::move(hi), std::move(body)};
  return Expr(std::move(n));
}

Expr Expr::add(Expr lhs, Expr rhs) { return binary(ExprKind::Add, std::move(lhs), std::move(rhs)); }
Expr Expr::sub(Expr lhs, Expr rhs) { return binary(ExprKind::Sub, std::move(lhs), std::move(rhs)); }
Expr Expr::mul(Expr lhs, Expr rhs) { return binary(ExprKind::Mul, std::move(lhs), std::move(rhs)); }
Expr Expr::div(Expr lhs, Expr rhs) { return binary(ExprKind::Div, std::move(lhs), std::move(rhs)); }
Expr Expr::pow(Expr base, Expr exponent) { return binary(ExprKind::Pow, std::move(base), std::move(exponent)); }

Expr Expr::len(VecPath vec) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Len;
  n->path = std::move(vec);
  return Expr(std::move(n));
}

Expr Expr::poly(VecPath vec, Expr point) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Poly;
  n->path = std::move(vec);
  n->kids = {std::move(point)};
  return Expr(std::move(n));
}

Expr Expr::exposed(const std::string& root) { return elem({root, Region::R1}, num(0)); }

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->kids = {std::move(lhs), std::move(rhs)};
  return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
const VecPath& Expr::path() const { return node_->path; }
const std::vector<Expr>& Expr::kids() const { return node_->kids; }

const Expr& Expr::index() const {
  assert(kind() == ExprKind::Elem);
  return node_->kids[0];
}
const Expr& Expr::lo() const {
  assert(kind() == ExprKind::Sum);
  return node_->kids[0];
}
const Expr& Expr::hi() const {
  assert(kind() == ExprKind::Sum);
  return node_->kids[1];
}
const Expr& Expr::body() const {
  assert(kind() == ExprKind::Sum);
  return node_->kids[2];
}
const Expr& Expr::lhs() const {
  assert(node_->kids.size() == 2);
  return node_->kids[0];
}
const Expr& Expr::rhs() const {
  assert(node_->kids.size() == 2);
  return node_->kids[1];
}
const Expr& Expr::point() const {
  assert(kind() == ExprKind::Poly);
  return node_->kids[0];
}

bool Expr::is_const(long v) const { return kind() == ExprKind::Const && value() == v; }
bool Expr::is_var(const std::string& n) const { return kind() == ExprKind::Var && name() == n; }

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
  switch (a.kind) {
    case ExprKind::Const:
      if (a.value != b.value) return false;
      break;
    case ExprKind::Var:
    case ExprKind::Sum:
      if (a.name != b.name) return false;
      break;
    case ExprKind::Elem:
    case ExprKind::Len:
    case ExprKind::Poly:
      if (a.path != b.path) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (a.kids[i] != b.kids[i]) return false;
  return true;
}

std::string Expr::str() const { return print(*this, Style::File); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::add(a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sub(a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul(a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::div(a, b); }
Expr operator+(const Expr& a, long b) { return Expr::add(a, num(b)); }
Expr operator-(const Expr& a, long b) { return Expr::sub(a, num(b)); }
Expr operator*(long a, const Expr& b) { return Expr::mul(num(a), b); }

namespace {

void collect_free(const Expr& e, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (e.kind()) {
    case ExprKind::Var:
      if (std::find(bound.begin(), bound.end(), e.name()) == bound.end()) out.insert(e.name());
      return;
    case ExprKind::Sum:
      collect_free(e.lo(), bound, out);
      collect_free(e.hi(), bound, out);
      bound.push_back(e.name());
      collect_free(e.body(), bound, out);
      bound.pop_back();
      return;
    default:
      for (const Expr& k : e.kids()) collect_free(k, bound, out);
  }
}

}  // namespace

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(e, bound, out);
  return out;
}

bool occurs_free(const Expr& e, const std::string& name) { return free_vars(e).count(name) > 0; }

std::set<VecPath> vec_paths(const Expr& e) {
  std::set<VecPath> out;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (x.kind() == ExprKind::Elem || x.kind() == ExprKind::Len || x.kind() == ExprKind::Poly) out.insert(x.path());
    for (const Expr& k : x.kids()) walk(k);
  };
  walk(e);
  return out;
}

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> kids) {
  switch (e.kind()) {
    case ExprKind::Const:
    case ExprKind::Var:
    case ExprKind::Len:
      return e;
    case ExprKind::Elem: return Expr::elem(e.path(), std::move(kids[0]));
    case ExprKind::Sum: return Expr::sum(e.name(), std::move(kids[0]), std::move(kids[1]), std::move(kids[2]));
    case ExprKind::Add: return Expr::add(std::move(kids[0]), std::move(kids[1]));
    case ExprKind::Sub: return Expr::sub(std::move(kids[0]), std::move(kids[1]));
    case ExprKind::Mul: return Expr::mul(std::move(kids[0]), std::move(kids[1]));
    case ExprKind::Div: return Expr::div(std::move(kids[0]), std::move(kids[1]));
    case ExprKind::Pow: return Expr::pow(std::move(kids[0]), std::move(kids[1]));
    case ExprKind::Poly: return Expr::poly(e.path(), std::move(kids[0]));
  }
  return e;
}

}  // namespace

Expr transform(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& f) {
  Expr node = e;
  if (!e.kids().empty()) {
    std::vector<Expr> kids;
    kids.reserve(e.kids().size());
    bool changed = false;
    for (const Expr& k : e.kids()) {
      kids.push_back(transform(k, f));
      changed = changed || kids.back().identity() != k.identity();
    }
    if (changed) node = rebuild(e, std::move(kids));
  }
  if (auto r = f(node)) return *r;
  return node;
}

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!avoid.count(candidate)) return candidate;
  }
}

Expr subst(const Expr& e, const Bindings& b) {
  if (b.empty()) return e;
  switch (e.kind()) {
    case ExprKind::Var:
      for (const auto& [name, value] : b)
        if (name == e.name()) return value;
      return e;
    case ExprKind::Sum: {
      Expr lo = subst(e.lo(), b);
      Expr hi = subst(e.hi(), b);
      Bindings inner;
      std::set<std::string> incoming;
      for (const auto& [name, value] : b) {
        if (name == e.name()) continue;
        if (!occurs_free(e.body(), name)) continue;
        inner.emplace_back(name, value);
        auto fv = free_vars(value);
        incoming.insert(fv.begin(), fv.end());
      }
      std::string bound = e.name();
      Expr body = e.body();
      if (incoming.count(bound)) {
        std::set<std::string> avoid = incoming;
        auto fb = free_vars(body);
        avoid.insert(fb.begin(), fb.end());
        for (const auto& [name, value] : b) avoid.insert(name);
        std::string renamed = fresh_name(bound, avoid);
        body = subst(body, {{bound, Expr::var(renamed)}});
        bound = renamed;
      }
      return Expr::sum(bound, lo, hi, subst(body, inner));
    }
    default: {
      if (e.kids().empty()) return e;
      std::vector<Expr> kids;
      for (const Expr& k : e.kids()) kids.push_back(subst(k, b));
      return rebuild(e, std::move(kids));
    }
  }
}

}  // namespace

Expr substitute(const Expr& e, const Bindings& bindings) { return subst(e, bindings); }

std::pair<std::size_t, std::size_t> segment(const VecPath& p, const State& s) {
  auto v = s.vectors.find(p.root);
  if (v == s.vectors.end()) throw EvalError(EvalErrorKind::UnboundVariable, "unbound vector " + p.root);
  const std::size_t len = v->second.size();
  if (p.region == Region::Whole) return {0, len};
  auto c = s.cursors.find(p.root);
  if (c == s.cursors.end())
    throw EvalError(EvalErrorKind::BadCursor, "vector " + p.root + " is not partitioned");
  const Cursor& cur = c->second;
  if (cur.split > len) throw EvalError(EvalErrorKind::BadCursor, "cursor of " + p.root + " out of range");
  const std::size_t s0 = cur.split;
  switch (p.region) {
    case Region::T: return {0, s0};
    case Region::B: return {s0, len};
    default: break;
  }
  if (!cur.exposed) throw EvalError(EvalErrorKind::BadCursor, path_name(p) + " referenced outside a repartition");
  // Exposed element sits at [e, e+1).
  std::size_t e = 0;
  if (*cur.exposed == Expose::FromBottom) {
    if (s0 == 0) throw EvalError(EvalErrorKind::BadCursor, "nothing to expose above the split of " + p.root);
    e = s0 - 1;
  } else {
    if (s0 >= len) throw EvalError(EvalErrorKind::BadCursor, "nothing to expose below the split of " + p.root);
    e = s0;
  }
  switch (p.region) {
    case Region::R0: return {0, e};
    case Region::R1: return {e, e + 1};
    case Region::R2: return {e + 1, len};
    default: break;
  }
  return {0, len};
}

namespace {

using Scope = std::vector<std::pair<std::string, Rational>>;

long integral(const Rational& r, const char* what) {
  auto v = as_long(r);
  if (!v) throw EvalError(EvalErrorKind::NonIntegral, std::string(what) + " is not an integer: " + to_string(r));
  return *v;
}

Rational power(const Rational& base, long e) {
  if (e < 0) {
    if (base == 0) throw EvalError(EvalErrorKind::DivisionByZero, "zero raised to a negative power");
    return Rational(1) / power(base, -e);
  }
  Rational out(1);
  for (long i = 0; i < e; ++i) out *= base;
  return out;
}

Rational eval(const Expr& e, const State& s, Scope& scope) {
  switch (e.kind()) {
    case ExprKind::Const: return e.value();
    case ExprKind::Var: {
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->first == e.name()) return it->second;
      auto v = s.scalars.find(e.name());
      if (v == s.scalars.end()) throw EvalError(EvalErrorKind::UnboundVariable, "unbound variable " + e.name());
      return v->second;
    }
    case ExprKind::Elem: {
      auto [first, last] = segment(e.path(), s);
      long i = integral(eval(e.index(), s, scope), "array index");
      if (i < 0 || static_cast<std::size_t>(i) >= last - first)
        throw EvalError(EvalErrorKind::IndexOutOfRange,
                        "index " + std::to_string(i) + " out of range for " + path_name(e.path()) + " of length " +
                            std::to_string(last - first));
      return s.vectors.at(e.path().root)[first + static_cast<std::size_t>(i)];
    }
    case ExprKind::Sum: {
      long lo = integral(eval(e.lo(), s, scope), "sum bound");
      long hi = integral(eval(e.hi(), s, scope), "sum bound");
      Rational total(0);
      for (long i = lo; i < hi; ++i) {
        scope.emplace_back(e.name(), Rational(i));
        total += eval(e.body(), s, scope);
        scope.pop_back();
      }
      return total;
    }
    case ExprKind::Add: return eval(e.lhs(), s, scope) + eval(e.rhs(), s, scope);
    case ExprKind::Sub: return eval(e.lhs(), s, scope) - eval(e.rhs(), s, scope);
    case ExprKind::Mul: return eval(e.lhs(), s, scope) * eval(e.rhs(), s, scope);
    case ExprKind::Div: {
      Rational num = eval(e.lhs(), s, scope);
      Rational den = eval(e.rhs(), s, scope);
      if (den == 0) throw EvalError(EvalErrorKind::DivisionByZero, "division by zero in " + e.str());
      return num / den;
    }
    case ExprKind::Pow: {
      Rational base = eval(e.lhs(), s, scope);
      long exp = integral(eval(e.rhs(), s, scope), "exponent");
      return power(base, exp);
    }
    case ExprKind::Len: {
      auto [first, last] = segment(e.path(), s);
      return Rational(static_cast<long>(last - first));
    }
    case ExprKind::Poly: {
      auto [first, last] = segment(e.path(), s);
      Rational x = eval(e.point(), s, scope);
      const auto& v = s.vectors.at(e.path().root);
      Rational total(0);
      Rational xp(1);
      for (std::size_t i = first; i < last; ++i) {
        total += v[i] * xp;
        xp *= x;
      }
      return total;
    }
  }
  return Rational(0);
}

}  // namespace

Rational evaluate(const Expr& e, const State& s) {
  Scope scope;
  return eval(e, s, scope);
}

std::string describe(const State& s) {
  std::ostringstream out;
  bool first = true;
  auto sep = [&] {
    if (!first) out << ", ";
    first = false;
  };
  for (const auto& [name, v] : s.vectors) {
    sep();
    out << name << " = (";
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << to_string(v[i]);
    out << ")";
    if (auto c = s.cursors.find(name); c != s.cursors.end()) {
      out << " split " << c->second.split;
      if (c->second.exposed)
        out << (*c->second.exposed == Expose::FromBottom ? " exposed-from-bottom" : " exposed-from-top");
    }
  }
  for (const auto& [name, v] : s.scalars) {
    sep();
    out << name << " = " << to_string(v);
  }
  return out.str();
}

}  // namespace flamesmith
