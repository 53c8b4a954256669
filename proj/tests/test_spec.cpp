#include "support.hpp"

#include <doctest.h>

using namespace testing;

TEST_CASE("parse_spec: polyeval") {
  const OperationSpec& s = polyeval();
  CHECK(s.name == "polyeval");
  CHECK(s.output().name == "y");
  CHECK(s.vector().name == "a");
  CHECK(s.vector().size == "n");
  REQUIRE(s.index() != nullptr);
  CHECK(s.index()->name == "k");
  CHECK(s.pre == pred("0 <= n"));
  // The inclusive DSL bound n-1 is stored as the exclusive bound n.
  REQUIRE(s.post.atoms.size() == 1);
  const Expr& rhs = s.post.atoms[0].rhs;
  REQUIRE(rhs.kind() == ExprKind::Sum);
  CHECK(rhs.lo() == num(0));
  CHECK(rhs.hi() == var("n"));
  CHECK(print(s.post) == "y = sum(i = 0 ..< n, a[i] * x^i)");
}

TEST_CASE("parse_spec: empty sum") {
  OperationSpec s = parse_spec(
      "op empty\nvar y : scalar, out\nvar a : vector(n), in\npre: n = 0\npost: y = sum(i, 0, -1, a[i])\n");
  State st;
  st.vectors["a"] = {};
  st.scalars = {{"n", 0}, {"y", 0}};
  CHECK(evaluate(s.post, st) == Truth::True);
}

TEST_CASE("parse_spec: errors") {
  CHECK_THROWS_AS(parse_spec("op p\nvar a : vector(n), in\nvar x : scalar, in\npre: 0 <= n\n"
                             "post: y = sum(i, 0, n-1, a[i] * x^i)\n"),
                  SemanticError);
  CHECK_THROWS_AS(parse_spec("op p\nvar y : scalar, out\nvar z : scalar, out\nvar a : vector(n), in\n"
                             "pre: 0 <= n\npost: y = sum(i, 0, n-1, a[i])\n"),
                  SemanticError);
  try {
    parse_spec("op p\nvar y : scalar, out\nvar a : vector(n), in\npre: 0 <=\npost: y = sum(i, 0, n-1, a[i])\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  try {
    parse_spec("op p\nvar y : matrix, out\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("parse_spec: comments and blank lines") {
  std::string text = std::string("# header\n\n") + kPolyevalSpec + "# trailing\n";
  CHECK(render_spec(parse_spec(text)) == render_spec(polyeval()));
}

TEST_CASE("render_spec round trip") {
  std::string text = render_spec(polyeval());
  OperationSpec back = parse_spec(text);
  CHECK(render_spec(back) == text);
  CHECK(back.post == polyeval().post);
  CHECK(back.pre == polyeval().pre);
  CHECK(back.decls.size() == polyeval().decls.size());
}

TEST_CASE("to_flame") {
  OperationSpec f = to_flame(polyeval());
  CHECK(f.output().name == "psi");
  CHECK(f.index() == nullptr);
  CHECK(f.pre.is_true());
  CHECK(print(f.post) == "psi = pi(a, chi)");
}
