#include "support.hpp"

#include "flamesmith/wp.hpp"

#include <doctest.h>

using namespace testing;

namespace {

const char* kInv5 = "y = sum(i = k ..< n, a[i] * x^(i - k)) && 0 <= k && k <= n";
const char* kPost = "y = sum(i = 0 ..< n, a[i] * x^i)";

Context ctx() { return polyeval().context(); }

// The counterexample satisfies the antecedent and not the consequent.
void check_replay(const Verdict& v, const Predicate& p, const Predicate& q) {
  REQUIRE(v.kind == VerdictKind::Falsified);
  REQUIRE(v.counterexample.has_value());
  CHECK(evaluate(p, *v.counterexample) == Truth::True);
  CHECK(evaluate(q, *v.counterexample) != Truth::True);
}

}  // namespace

TEST_CASE("evaluate predicates") {
  State s;
  s.vectors["a"] = {1, 2};
  s.scalars = {{"n", 2}, {"k", 1}, {"x", 2}, {"y", 2}};
  CHECK(evaluate(pred(kInv5), s) == Truth::True);
  s.scalars["y"] = 3;
  CHECK(evaluate(pred(kInv5), s) == Truth::False);
  CHECK(evaluate(Predicate(), s) == Truth::True);
  CHECK(evaluate(Predicate::falsity(), s) == Truth::False);
  // The range atom is false, so the out-of-range element is never needed.
  s.scalars["k"] = 5;
  CHECK(evaluate(pred("y = a[k] && k <= n"), s) == Truth::False);
  CHECK(evaluate(pred("y = a[k]"), s) == Truth::Undefined);
}

TEST_CASE("negate pushes through atoms") {
  CHECK(negate(lt(num(0), var("k"))) == le(var("k"), num(0)));
  CHECK(negate(le(var("k"), var("n"))) == lt(var("n"), var("k")));
}

TEST_CASE("implies: exit of Invariant 5 is proved") {
  Verdict v = implies(pred(kInv5) && pred("k <= 0"), pred(kPost), ctx());
  CHECK(v.kind == VerdictKind::Proved);
  CHECK(v.tier == 1);
}

TEST_CASE("implies: reflexivity") {
  for (const char* p : {kInv5, kPost, "0 <= k && k < n", "x != 0"}) CHECK(implies(pred(p), pred(p), ctx()).kind == VerdictKind::Proved);
}

TEST_CASE("implies: interval reasoning on index atoms") {
  CHECK(prove(pred("0 < k && k <= n"), pred("1 <= k && k <= n + 1"), ctx()).kind == VerdictKind::Proved);
  CHECK(prove(pred("0 <= k && k <= n && k <= 0"), pred("k = 0"), ctx()).kind == VerdictKind::Proved);
  CHECK(prove(pred("k < 0 && 0 <= k"), Predicate::falsity(), ctx()).kind == VerdictKind::Proved);
}

TEST_CASE("implies: wrong update is falsified with a replayable state") {
  Predicate p = pred(kInv5) && pred("0 < k");
  Predicate q = pred("y = a[k] + y * x");
  Verdict v = implies(p, q, ctx());
  CHECK(v.tier == 2);
  check_replay(v, p, q);
}

TEST_CASE("falsify: deterministic for a fixed seed") {
  Predicate p = pred("0 <= k && k <= n");
  Predicate q = pred("k < n");
  CheckOptions opts;
  opts.seed = 7;
  Verdict a = falsify(p, q, ctx(), opts);
  Verdict b = falsify(p, q, ctx(), opts);
  check_replay(a, p, q);
  CHECK(a.counterexample == b.counterexample);
  CHECK(describe(a) == describe(b));
  CHECK(describe(a) == "Falsified (tier 2, seed 7)");
}

TEST_CASE("falsify: true implications survive sampling") {
  CheckOptions opts;
  opts.trials = 500;
  Verdict v = falsify(pred("0 <= k && k < n"), pred("k + 1 <= n"), ctx(), opts);
  CHECK(v.kind == VerdictKind::Tested);
  CHECK(v.trials == 500);
  CHECK(describe(v) == "Tested (tier 2, 500 trials, seed 42)");
}

TEST_CASE("property: tier-1 proofs survive 10000 random states") {
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {std::string(kInv5) + " && k <= 0", kPost},
      {"0 < k && k <= n", "0 <= k - 1 && k - 1 <= n"},
      {std::string(kInv5) + " && 0 < k", "y = sum(i = k ..< n, a[i] * x^(i - k)) && 1 <= k"},
      {"y = 0 && k = n", "y = sum(i = k ..< n, a[i] * x^(i - k))"},
  };
  CheckOptions opts;
  opts.trials = 10000;
  for (const auto& [p, q] : pairs) {
    REQUIRE_MESSAGE(prove(pred(p), pred(q), ctx()).kind == VerdictKind::Proved, p << " => " << q);
    CHECK_MESSAGE(falsify(pred(p), pred(q), ctx(), opts).kind == VerdictKind::Tested, p << " => " << q);
  }
}

TEST_CASE("sampling: states respect the context") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    State s = random_state(ctx(), rng);
    long n = static_cast<long>(s.vectors.at("a").size());
    CHECK(s.scalars.at("n") == n);
    CHECK(n <= 8);
    CHECK(s.scalars.at("k") >= 0);
    CHECK(s.scalars.at("k") <= n);
    CHECK(abs(s.scalars.at("x")) <= 3);
    for (const Rational& v : s.vectors.at("a")) CHECK(abs(v) <= 5);
  }
  auto s = sample_satisfying(pred(kInv5), ctx(), rng, 1000);
  REQUIRE(s.has_value());
  CHECK(evaluate(pred(kInv5), *s) == Truth::True);
  CHECK_FALSE(sample_satisfying(Predicate::falsity(), ctx(), rng, 50).has_value());
}

TEST_CASE("hoare_test: worked triples") {
  CHECK(hoare_test(pred("0 <= n"), st("y := 0; k := n"), pred(kInv5), ctx()).kind == VerdictKind::Tested);
  CHECK(hoare_test(Predicate(), skip(), Predicate(), ctx()).kind == VerdictKind::Tested);
  Verdict v = hoare_test(pred(kInv5) && pred("0 < k"), st("y := a[k - 1] + y * x; k := k - 1"), pred(kInv5), ctx());
  CHECK(v.kind == VerdictKind::Tested);
  CHECK(v.trials == 1000);

  Verdict bad = hoare_test(pred(kInv5) && pred("0 < k"), st("y := a[k] + y * x; k := k - 1"), pred(kInv5), ctx());
  CHECK(bad.kind == VerdictKind::Falsified);
  REQUIRE(bad.counterexample.has_value());
  State after = *bad.counterexample;
  execute(st("y := a[k] + y * x; k := k - 1"), after);
  CHECK(evaluate(pred(kInv5), after) != Truth::True);

  try {
    hoare_test(Predicate::falsity(), skip(), Predicate(), ctx());
    FAIL("expected a vacuous precondition");
  } catch (const DerivationError& e) {
    CHECK(e.kind() == DerivationErrorKind::VacuousPrecondition);
  }
}
