#include "support.hpp"

#include "flamesmith/wp.hpp"

#include <doctest.h>

using namespace testing;

namespace {

const char* kInv5 = "y = sum(i = k ..< n, a[i] * x^(i - k)) && 0 <= k && k <= n";

NormContext nc() { return polyeval().context().norm(); }

Predicate normal(const std::string& text) { return normalize(pred(text), nc()); }

}  // namespace

TEST_CASE("wp: index update of Invariant 5") {
  Predicate got = wp(st("k := k - 1"), pred(kInv5), nc());
  CHECK(got == normal("y = a[k - 1] + sum(i = k ..< n, a[i] * x^(i - k)) * x && 1 <= k && k <= n + 1"));
  CHECK(print(got) == "y = a[k - 1] + sum(i = k ..< n, a[i] * x^(i - k)) * x && 1 <= k && k <= n + 1");
}

TEST_CASE("wp: simultaneous initialization with holes") {
  Predicate got = wp(st("y, k := $E0, $E1"), pred(kInv5), nc());
  CHECK(got == normal("$E0 = sum(i = $E1 ..< n, a[i] * x^(i - $E1)) && 0 <= $E1 && $E1 <= n"));
}

TEST_CASE("wp: the initialization y := 0; k := n") {
  Predicate got = wp(st("y := 0; k := n"), pred(kInv5), nc());
  CHECK(got == normal("0 <= n"));
}

TEST_CASE("wp: skip and sequence") {
  Predicate r = pred(kInv5);
  CHECK(wp(skip(), r, nc()) == normalize(r, nc()));
  Stmt s1 = st("y := a[k - 1] + y * x");
  Stmt s2 = st("k := k - 1");
  CHECK(wp(seq({s1, s2}), r, nc()) == wp(s1, wp(s2, r, nc()), nc()));
}

TEST_CASE("wp: simultaneous assignment reads the old values") {
  Predicate r = pred("y = 1 && k = 2");
  CHECK(wp(st("y, k := k, y"), r, nc()) == normal("k = 1 && y = 2"));
}

TEST_CASE("wp: counter increments and loops") {
  Predicate r = pred("C = 2 * k");
  CHECK(wp(counter_incr("C", 2), r, nc()) == normal("C + 2 = 2 * k"));
  try {
    wp(loop(pred("0 < k"), st("k := k - 1")), r, nc());
    FAIL("expected UnsupportedStatement");
  } catch (const DerivationError& e) {
    CHECK(e.kind() == DerivationErrorKind::UnsupportedStatement);
  }
}

TEST_CASE("wp: FLAME merge and repartition rewrite paths") {
  Predicate inv = pred("psi = pi(a_B, chi)");
  NormContext fnc;
  fnc.sizes["a"] = "n";
  CHECK(after_repartition(inv, "a", Expose::FromBottom, fnc) == pred("psi = pi(a_2, chi)"));
  Predicate merged = wp(merge_back("a", Expose::FromBottom), inv, fnc);
  CHECK(merged == normalize(pred("psi = a_1 + pi(a_2, chi) * chi"), fnc));
}

TEST_CASE("wp_symbolic_assign") {
  Predicate step6 = pred("y = a[k - 1] + sum(i = k ..< n, a[i] * x^(i - k)) * x && 1 <= k && k <= n + 1");
  CHECK(wp_symbolic_assign("y", step6, "$E", nc()) ==
        normal("$E = a[k - 1] + sum(i = k ..< n, a[i] * x^(i - k)) * x && 1 <= k && k <= n + 1"));
  CHECK(wp_symbolic_assign("y", pred("y = 0"), "$E", nc()) == pred("$E = 0"));

  Predicate r = pred("z = x^k && y = 0");
  Predicate got = wp_symbolic_assign("z", r, "$E", nc());
  Gen g(5);
  for (int t = 0; t < 50; ++t) {
    State s = g.state();
    s.scalars["$E"] = g.integer(-3, 3);
    State direct = s;
    direct.scalars["z"] = s.scalars["$E"];
    CHECK(evaluate(got, s) == evaluate(r, direct));
  }
  try {
    wp_symbolic_assign("z", pred("y = 0"), "$E", nc());
    FAIL("expected TargetAbsent");
  } catch (const DerivationError& e) {
    CHECK(e.kind() == DerivationErrorKind::TargetAbsent);
  }
}

TEST_CASE("property: wp agrees with execution") {
  Gen g(606);
  const std::vector<std::string> stmts = {
      "k := k - 1",
      "y := a[k - 1] + y * x; k := k - 1",
      "y, k := y + a[k] * x^k, k + 1",
      "y := 0; k := n",
      "y, k := k, y",
      "C := C + 2",
  };
  const std::vector<std::string> posts = {kInv5, "y = sum(i = 0 ..< k, a[i] * x^i) && 0 <= k && k <= n",
                                          "y <= k && C = 2 * (n - k)"};
  int checked = 0;
  for (const std::string& stext : stmts)
    for (const std::string& ptext : posts) {
      Stmt s = st(stext);
      Predicate r = pred(ptext);
      Predicate pre = wp(s, r, nc());
      for (int t = 0; t < 200; ++t) {
        State s0 = g.state();
        s0.scalars["C"] = g.integer(-2, 6);
        Truth before = evaluate(pre, s0);
        if (before == Truth::Undefined) continue;
        State s1 = s0;
        try {
          execute(s, s1);
        } catch (const EvalError&) {
          continue;
        }
        Truth after = evaluate(r, s1);
        if (after == Truth::Undefined) continue;
        CHECK_MESSAGE(before == after, stext << " / " << ptext << " at " << describe(s0));
        ++checked;
      }
    }
  CHECK(checked > 1500);
}

TEST_CASE("property: wp is monotone") {
  Context ctx = polyeval().context();
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {std::string(kInv5) + " && 0 < k", kInv5},
      {"k = n && y = 0", "k <= n"},
  };
  for (const auto& [r1, r2] : pairs) {
    REQUIRE(prove(pred(r1), pred(r2), ctx).kind == VerdictKind::Proved);
    for (const char* s : {"k := k - 1", "y := a[k - 1] + y * x; k := k - 1", "y, k := 0, n"}) {
      Verdict v = implies(wp(st(s), pred(r1), nc()), wp(st(s), pred(r2), nc()), ctx);
      CHECK_MESSAGE(v.kind != VerdictKind::Falsified, s << ": " << r1 << " => " << r2);
    }
  }
}
