#include "flamesmith/interpreter.hpp"

#include "flamesmith/syntax.hpp"

namespace flamesmith {

State make_input(const Worksheet& w, const std::vector<Rational>& coeffs, const Rational& point) {
  State s;
  const Decl& v = w.vector();
  s.vectors[v.name] = coeffs;
  s.scalars[v.size] = Rational(static_cast<long>(coeffs.size()));
  for (const Decl& d : w.decls)
    if (d.role == Role::Input && !d.is_vector) s.scalars[d.name] = point;
  return s;
}

namespace {

void assert_holds(const Predicate& p, const State& s, long iteration, const char* which) {
  Truth t = evaluate(p, s);
  if (t == Truth::True) return;
  std::string detail;
  for (const Atom& a : p.atoms)
    if (evaluate(a, s) != Truth::True) {
      detail = print(a) + (evaluate(a, s) == Truth::Undefined ? " is undefined" : " is false");
      break;
    }
  throw InvariantViolation(iteration, which, s, detail);
}

}  // namespace

RunResult run(const Worksheet& w, const State& input, bool check) {
  if (!w.guard) throw DerivationError(DerivationErrorKind::IncompleteWorksheet, "3", "no guard");
  RunResult r;
  State s = input;
  assert_holds(w.pre, s, 0, "precondition");
  execute(w.full_init(), s);
  Predicate inv = w.full_invariant();
  Predicate guard(*w.guard);
  Stmt body = w.body();
  long n = static_cast<long>(s.vectors.at(w.vector().name).size());
  long cap = 10 * n + 10;
  for (;;) {
    r.trace.push_back(s);
    if (check) assert_holds(inv, s, r.iterations, "loop head");
    Truth g = evaluate(guard, s);
    if (g == Truth::Undefined) throw InvariantViolation(r.iterations, "guard", s, print(*w.guard) + " is undefined");
    if (g == Truth::False) break;
    if (r.iterations >= cap) throw NonTermination(cap);
    execute(body, s);
    ++r.iterations;
    if (check) assert_holds(inv, s, r.iterations, "loop bottom");
  }
  if (check) {
    assert_holds(inv && Predicate(negate(*w.guard)), s, r.iterations, "exit");
    assert_holds(w.post, s, r.iterations, "postcondition");
  }
  r.final = s;
  return r;
}

Rational oracle(const std::vector<Rational>& a, const Rational& x) {
  Rational total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rational term = a[i];
    for (std::size_t j = 0; j < i; ++j) term *= x;
    total += term;
  }
  return total;
}

bool nested_form_identity_check(const std::vector<Rational>& a, const Rational& x) {
  Expr nested = num(0);
  for (std::size_t i = a.size(); i-- > 0;) nested = Expr::constant(a[i]) + nested * var("x");
  State s;
  s.scalars["x"] = x;
  return evaluate(nested, s) == oracle(a, x);
}

}  // namespace flamesmith
