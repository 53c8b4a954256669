#include "support.hpp"

#include <doctest.h>

using namespace testing;

TEST_CASE("evaluate: sums, partitions and lengths") {
  State s;
  s.vectors["a"] = {1, 2, 3};
  s.scalars["x"] = 2;
  s.scalars["n"] = 3;
  Expr body = elem("a", var("i")) * pow(var("x"), var("i"));
  CHECK(evaluate(Expr::sum("i", num(0), num(0), body), s) == 0);
  CHECK(evaluate(Expr::sum("i", num(0), num(3), body), s) == 1 + 2 * 2 + 3 * 4);

  s.cursors["a"].split = 1;
  CHECK(evaluate(Expr::poly({"a", Region::B}, var("x")), s) == 2 + 3 * 2);
  CHECK(evaluate(Expr::poly({"a", Region::T}, var("x")), s) == 1);
  CHECK(evaluate(Expr::len({"a", Region::B}), s) == 2);
  CHECK(evaluate(Expr::len({"a", Region::Whole}), s) == 3);
}

TEST_CASE("evaluate: errors") {
  State s;
  s.vectors["a"] = {1, 2};
  s.scalars["n"] = 2;
  CHECK_THROWS_AS(evaluate(var("q"), s), EvalError);
  CHECK_THROWS_AS(evaluate(elem("a", num(2)), s), EvalError);
  CHECK_THROWS_AS(evaluate(Expr::div(num(1), num(0)), s), EvalError);
  try {
    evaluate(elem("a", num(-1)), s);
    FAIL("expected an error");
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalErrorKind::IndexOutOfRange);
  }
}

TEST_CASE("evaluate: exact rationals") {
  State s;
  s.scalars["x"] = make_rational(1, 3);
  CHECK(evaluate(pow(var("x"), num(2)) + Expr::div(num(1), num(9)), s) == make_rational(2, 9));
  CHECK(evaluate(pow(var("x"), num(-2)), s) == 9);
}

TEST_CASE("substitute: bound variables and capture") {
  Expr sum = ex("sum(i = k ..< n, a[i] * x^(i - k))");
  CHECK(substitute(sum, {{"k", var("k") - 1}}) == ex("sum(i = k - 1 ..< n, a[i] * x^(i - (k - 1)))"));
  CHECK(substitute(var("y"), {{"y", num(0)}}) == num(0));
  Expr closed = ex("sum(i = 0 ..< n, a[i])");
  CHECK(substitute(closed, {{"i", num(7)}}) == closed);

  // Substituting an expression that mentions the bound name renames the bound.
  Expr captured = substitute(ex("sum(i = 0 ..< n, a[i] * k)"), {{"k", var("i")}});
  State s;
  s.vectors["a"] = {1, 2, 3};
  s.scalars["n"] = 3;
  s.scalars["i"] = 5;
  CHECK(evaluate(captured, s) == 30);
}

TEST_CASE("substitute: simultaneous bindings") {
  Expr e = var("y") + 10 * var("k");
  Expr swapped = substitute(e, {{"y", var("k")}, {"k", var("y")}});
  State s;
  s.scalars["y"] = 1;
  s.scalars["k"] = 2;
  CHECK(evaluate(swapped, s) == 2 + 10 * 1);
}

TEST_CASE("normalize: worked forms") {
  NormContext nc;
  nc.sizes["a"] = "n";
  nc.indices.insert("k");
  CHECK(normalize(ex("sum(i = k - 1 ..< n, a[i] * x^(i - k + 1))"), nc) ==
        normalize(ex("a[k - 1] + sum(i = k ..< n, a[i] * x^(i - k)) * x"), nc));
  CHECK(normalize(ex("x^0")) == num(1));
  CHECK(normalize(ex("sum(i = n ..< n, a[i] * x^i)")) == num(0));
  CHECK(normalize(ex("2 * 3 + x - x")) == num(6));
  CHECK(equivalent(ex("x^(k + 1)"), ex("x^k * x")));
}

TEST_CASE("property: substitution soundness") {
  Gen g(101);
  int checked = 0;
  for (int t = 0; t < 400; ++t) {
    Expr e = g.expr(3);
    Expr value = g.expr(2);
    std::string v = g.pick({"x", "y", "k"});
    State s = g.state();
    auto rhs_value = try_eval(value, s);
    if (!rhs_value) continue;
    State bound = s;
    bound.scalars[v] = *rhs_value;
    auto direct = try_eval(e, bound);
    auto substituted = try_eval(substitute(e, {{v, value}}), s);
    if (!direct || !substituted) continue;
    CHECK_MESSAGE(*direct == *substituted, print(e) << " with " << v << " := " << print(value));
    ++checked;
  }
  CHECK(checked > 150);
}

TEST_CASE("property: normalization soundness and idempotence") {
  Gen g(202);
  NormContext nc;
  nc.sizes["a"] = "n";
  int checked = 0;
  for (int t = 0; t < 400; ++t) {
    Expr e = g.expr(3);
    Expr once = normalize(e, nc);
    CHECK_MESSAGE(normalize(once, nc) == once, print(e));
    for (int r = 0; r < 4; ++r) {
      State s = g.state();
      auto before = try_eval(e, s);
      auto after = try_eval(once, s);
      if (!before || !after) continue;
      CHECK_MESSAGE(*before == *after, print(e) << " normalized to " << print(once));
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("property: range splitting and empty ranges") {
  Gen g(303);
  Expr body = elem("a", var("i")) * pow(var("x"), var("i"));
  for (int t = 0; t < 100; ++t) {
    State s;
    s.vectors["a"] = g.coeffs(8);
    s.scalars["x"] = g.integer(-3, 3);
    long n = static_cast<long>(s.vectors["a"].size());
    for (long l = 0; l <= n; ++l)
      for (long m = l; m <= n; ++m) {
        long h = g.integer(m, n);
        Rational whole = evaluate(Expr::sum("i", num(l), num(h), body), s);
        Rational parts = evaluate(Expr::sum("i", num(l), num(m), body), s) +
                         evaluate(Expr::sum("i", num(m), num(h), body), s);
        CHECK(whole == parts);
      }
    CHECK(evaluate(Expr::sum("i", num(n), num(n), body), s) == 0);
    CHECK(evaluate(Expr::sum("i", num(n), num(0), body), s) == 0);
  }
}

TEST_CASE("property: file syntax round trip") {
  Gen g(404);
  ParseScope scope;
  scope.vectors = {"a"};
  for (int t = 0; t < 300; ++t) {
    Expr e = g.expr(3);
    std::string text = print(e);
    Expr back = parse_expr(text, scope);
    CHECK_MESSAGE(print(back) == text, text);
    State s = g.state();
    auto v1 = try_eval(e, s);
    auto v2 = try_eval(back, s);
    CHECK(v1.has_value() == v2.has_value());
    if (v1 && v2) CHECK(*v1 == *v2);
  }
}

TEST_CASE("print: styles") {
  Expr e = ex("sum(i = k ..< n, a[i] * x^(i - k))");
  CHECK(print(e, Style::Text) == "Σ_{i=k}^{n − 1} a_i × x^{i − k}");
  CHECK(print(e, Style::Latex).find("\\sum_{i=k}^{n - 1}") != std::string::npos);
  CHECK(print(ex("pi(a_B, chi)"), Style::Text) == "π(a_B, χ)");
  CHECK(display_name("$E0", Style::Text) == "ℰ_0");
}

TEST_CASE("parse: errors carry positions") {
  ParseScope scope;
  scope.vectors = {"a"};
  try {
    parse_expr("x + * y", scope);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 5);
  }
  CHECK_THROWS_AS(parse_expr("a[k", scope), ParseError);
  CHECK_THROWS_AS(parse_predicate("x < ", scope), ParseError);
}
