#include "flamesmith/cost.hpp"

#include "flamesmith/interpreter.hpp"
#include "flamesmith/normalize.hpp"
#include "flamesmith/syntax.hpp"

namespace flamesmith {

namespace {

[[noreturn]] void unsupported(const std::string& detail) {
  throw DerivationError(DerivationErrorKind::UnsupportedRecurrence, "cost", detail);
}

}  // namespace

long flop_count(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Const:
    case ExprKind::Var:
    case ExprKind::Len:
    case ExprKind::Elem:  // index arithmetic is addressing, not computation
      return 0;
    case ExprKind::Sum:
    case ExprKind::Poly:
      unsupported("the update contains a loop: " + print(e));
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
      return 1 + flop_count(e.lhs()) + flop_count(e.rhs());
    case ExprKind::Pow: {
      if (!e.rhs().is_const() || !is_integer(e.rhs().value()))
        unsupported("the cost of " + print(e) + " depends on its exponent");
      long k = *as_long(e.rhs().value());
      long base = flop_count(e.lhs());
      if (k == 0) return 0;
      long magnitude = k < 0 ? -k : k;
      return base + magnitude - 1 + (k < 0 ? 1 : 0);
    }
  }
  return 0;
}

long flop_count(const Stmt& s) {
  long total = 0;
  switch (s.kind) {
    case StmtKind::Assign:
      for (const Expr& e : s.exprs) total += flop_count(e);
      return total;
    case StmtKind::Seq:
      for (const Stmt& b : s.body) total += flop_count(b);
      return total;
    case StmtKind::While:
      unsupported("nested loop");
    default:
      return 0;
  }
}

Expr solve_recurrence(const Recurrence& r, const std::string& k) {
  Expr closed = normalize(Expr::constant(r.initial) + Expr::constant(r.increment) * var(k));
  Rational c = r.initial;
  for (long i = 0; i <= 16; ++i) {
    State s;
    s.scalars[k] = Rational(i);
    if (evaluate(closed, s) != c)
      throw std::logic_error("closed form " + print(closed) + " disagrees with the recurrence at " + k + " = " +
                             std::to_string(i));
    c += r.increment;
  }
  Expr step = normalize(substitute(closed, {{k, var(k) + 1}}) - closed);
  if (step != normalize(Expr::constant(r.increment)))
    throw std::logic_error("closed form " + print(closed) + " does not satisfy the recurrence symbolically");
  return closed;
}

Expr progress(const Worksheet& w) {
  const Decl& v = w.vector();
  bool backward = w.direction == Direction::LastToFirst;
  if (w.mode == Mode::Flame) return Expr::len({v.name, backward ? Region::B : Region::T});
  const Decl* index = nullptr;
  for (const Decl& d : w.decls)
    if (d.role == Role::Index) index = &d;
  if (!index) throw SemanticError("indexed worksheet declares no index");
  return backward ? var(v.size) - var(index->name) : var(index->name);
}

namespace {

Expr total_size(const Worksheet& w) {
  const Decl& v = w.vector();
  return w.mode == Mode::Flame ? Expr::len({v.name, Region::Whole}) : var(v.size);
}

std::string fresh_counter(const Worksheet& w) {
  std::string name = "C";
  for (int i = 1;; ++i) {
    bool used = false;
    for (const Decl& d : w.decls) used = used || d.name == name;
    if (!used) return name;
    name = "C" + std::to_string(i);
  }
}

}  // namespace

Worksheet instrument(const Worksheet& w) {
  if (w.cost) return w;
  if (!w.update) throw DerivationError(DerivationErrorKind::IncompleteWorksheet, "8", "no update to count");
  Worksheet out = w;
  CostBlock cb;
  cb.counter = fresh_counter(w);
  cb.increment = flop_count(*w.update);
  Expr closed = solve_recurrence({0, cb.increment});
  NormContext nc = w.norm();
  cb.invariant = Predicate(eq(var(cb.counter), normalize(substitute(closed, {{"k", progress(w)}}), nc)));
  cb.total = normalize(substitute(closed, {{"k", total_size(w)}}), nc);
  out.decls.push_back(Decl{cb.counter, Role::Counter, false, ""});
  out.cost = cb;
  out.obligations.clear();
  return out;
}

CostReport prove_cost(const Worksheet& w, long max_n, const CheckOptions& opts) {
  Worksheet iw = instrument(w);
  const CostBlock& cb = *iw.cost;
  CostReport r;
  r.counter = cb.counter;
  r.recurrence = {0, cb.increment};
  r.closed_form = solve_recurrence(r.recurrence);
  r.cost_invariant = cb.invariant;
  r.total = cb.total;
  r.verification = verify(iw, opts);
  for (const Obligation& o : r.verification)
    if (o.verdict.kind == VerdictKind::Falsified) throw CostInvariantFalsified(o);

  // A point that satisfies the precondition for every size.
  Rational point = 2;
  const Decl& v = iw.vector();
  for (long n = 0; n <= max_n; ++n) {
    std::vector<Rational> coeffs;
    for (long i = 0; i < n; ++i) coeffs.emplace_back(i % 7 - 3);
    State in = make_input(iw, coeffs, point);
    RunResult run_result = run(iw, in, true);
    Rational measured = run_result.final.scalars.at(cb.counter);
    r.runtime_counts.emplace_back(n, measured);
    State sizes;
    sizes.scalars[v.size] = Rational(n);
    sizes.vectors[v.name] = coeffs;
    if (evaluate(cb.total, sizes) != measured) r.mismatches.push_back(n);
  }
  return r;
}

}  // namespace flamesmith
