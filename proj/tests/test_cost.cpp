#include "support.hpp"

#include "flamesmith/cost.hpp"

#include <doctest.h>

using namespace testing;

namespace {

DerivationErrorKind failure_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DerivationError& e) {
    return e.kind();
  }
  FAIL("expected a derivation error");
  return DerivationErrorKind::IncompleteWorksheet;
}

}  // namespace

TEST_CASE("flop_count") {
  CHECK(flop_count(st("y := a[k - 1] + y * x")) == 2);
  CHECK(flop_count(st("y, z := a[k] * z + y, z * x")) == 3);
  CHECK(flop_count(st("y, z := a[k - 1] * z / x + y, z / x")) == 4);
  CHECK(flop_count(ex("x^3")) == 2);
  CHECK(flop_count(ex("x^1")) == 0);
  CHECK(flop_count(ex("x^(-2)")) == 2);
  CHECK(flop_count(ex("a[k + 1]")) == 0);
  CHECK(flop_count(skip()) == 0);
  CHECK(flop_count(st("y := 0; k := n")) == 0);
  CHECK(failure_of([] { flop_count(ex("x^k")); }) == DerivationErrorKind::UnsupportedRecurrence);
  CHECK(failure_of([] { flop_count(ex("sum(i = 0 ..< n, a[i])")); }) == DerivationErrorKind::UnsupportedRecurrence);
}

TEST_CASE("solve_recurrence") {
  CHECK(solve_recurrence({0, 2}) == normalize(ex("2 * k")));
  CHECK(solve_recurrence({5, 0}) == num(5));
  CHECK(solve_recurrence({0, 3}) == normalize(ex("3 * k")));
  for (long b = -2; b <= 2; ++b)
    for (long c = 0; c <= 4; ++c) {
      Expr closed = solve_recurrence({b, c});
      // C_{k+1} - C_k = c and C_0 = b, symbolically and at k = 0..16.
      CHECK(equivalent(substitute(closed, {{"k", var("k") + 1}}) - closed, num(c)));
      CHECK(equivalent(substitute(closed, {{"k", num(0)}}), num(b)));
      Rational ck = b;
      for (long k = 0; k <= 16; ++k) {
        State s;
        s.scalars["k"] = k;
        CHECK(evaluate(closed, s) == ck);
        ck += c;
      }
    }
}

TEST_CASE("instrument: Horner") {
  Worksheet iw = instrument(derived(5, Mode::Flame));
  REQUIRE(iw.cost.has_value());
  CHECK(iw.cost->counter == "C");
  CHECK(iw.cost->increment == 2);
  CHECK(print(iw.cost->invariant) == "C = 2 * m(a_B)");
  CHECK(print(iw.cost->total) == "2 * m(a)");
  CHECK(print(iw.full_init()) == "psi := 0; partition a bottom; C := 0");
  CHECK(print(iw.body()) == "repartition a from-bottom; psi := a_1 + psi * chi; C += 2; merge a from-bottom");
  CHECK(iw.obligations.empty());
  CHECK(print(progress(iw)) == "m(a_B)");

  Worksheet ii = instrument(derived(5, Mode::Indexed));
  CHECK(print(ii.cost->invariant) == "C = 2 * n - 2 * k");
  CHECK(print(ii.cost->total) == "2 * n");
  CHECK(print(instrument(derived(3, Mode::Indexed)).cost->invariant) == "C = 3 * k");
}

TEST_CASE("prove_cost: Horner in both modes") {
  for (Mode m : {Mode::Indexed, Mode::Flame}) {
    CostReport r = prove_cost(derived(5, m));
    CHECK(r.recurrence.initial == 0);
    CHECK(r.recurrence.increment == 2);
    CHECK(print(r.closed_form) == "2 * k");
    REQUIRE(r.verification.size() == 4);
    for (const Obligation& o : r.verification) CHECK(o.verdict.ok());
    REQUIRE(r.runtime_counts.size() == 65);
    for (const auto& [n, c] : r.runtime_counts) CHECK(c == 2 * n);
    CHECK(r.runtime_counts.front() == std::make_pair(0L, Rational(0)));
    CHECK(r.mismatches.empty());
  }
}

TEST_CASE("prove_cost: the other constant-cost algorithms") {
  const std::vector<std::pair<int, long>> expected = {{3, 3}, {4, 4}};
  for (Mode m : {Mode::Indexed, Mode::Flame})
    for (const auto& [id, c] : expected) {
      CostReport r = prove_cost(derived(id, m), 16);
      CHECK(r.recurrence.increment == c);
      for (const auto& [n, count] : r.runtime_counts) CHECK(count == c * n);
    }
}

TEST_CASE("prove_cost: power-dependent updates are refused") {
  for (Mode m : {Mode::Indexed, Mode::Flame})
    for (int id : {1, 2})
      CHECK(failure_of([&] { prove_cost(derived(id, m)); }) == DerivationErrorKind::UnsupportedRecurrence);
}

TEST_CASE("prove_cost: a wrong increment is falsified") {
  Worksheet w = instrument(derived(5, Mode::Flame));
  w.cost->increment = 3;
  try {
    prove_cost(w);
    FAIL("expected the cost invariant to fail");
  } catch (const CostInvariantFalsified& e) {
    CHECK(e.obligation().name == "step");
    REQUIRE(e.obligation().verdict.counterexample.has_value());
    const State& s = *e.obligation().verdict.counterexample;
    CHECK(evaluate(e.obligation().antecedent, s) == Truth::True);
    CHECK(evaluate(e.obligation().consequent, s) != Truth::True);
  }
}

TEST_CASE("prove_cost: the instrumented file round trips") {
  Worksheet iw = instrument(derived(5, Mode::Flame));
  iw.obligations = verify(iw);
  Worksheet back = parse_worksheet(write_worksheet(iw));
  REQUIRE(back.cost.has_value());
  CHECK(back.cost->increment == 2);
  CHECK(back.cost->invariant == iw.cost->invariant);
  CHECK(prove_cost(back, 8).mismatches.empty());
}
