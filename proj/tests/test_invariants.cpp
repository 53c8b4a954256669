#include "support.hpp"

#include <doctest.h>

using namespace testing;

namespace {

const ModeSpec& indexed() {
  static const ModeSpec ms = mode_spec(polyeval(), Mode::Indexed);
  return ms;
}

const ModeSpec& flame() {
  static const ModeSpec ms = mode_spec(polyeval(), Mode::Flame);
  return ms;
}

const std::vector<InvariantCandidate>& candidates(Mode m) {
  static const std::vector<InvariantCandidate> ic = enumerate_invariants(indexed());
  static const std::vector<InvariantCandidate> fc = enumerate_invariants(flame());
  return m == Mode::Indexed ? ic : fc;
}

const InvariantCandidate& candidate(Mode m, int id) {
  for (const InvariantCandidate& c : candidates(m))
    if (c.id == id) return c;
  throw std::runtime_error("no candidate " + std::to_string(id));
}

}  // namespace

TEST_CASE("mode_spec operands") {
  CHECK(indexed().ops.output == "y");
  CHECK(indexed().ops.vec == "a");
  CHECK(indexed().ops.size == "n");
  CHECK(indexed().ops.index == "k");
  CHECK(indexed().ops.point == "x");
  CHECK(flame().ops.output == "psi");
  CHECK(flame().ops.point == "chi");
  CHECK(flame().ops.index.empty());
}

TEST_CASE("mode_spec rejects a postcondition that is not one sum") {
  OperationSpec s = parse_spec(
      "op two\nvar y : scalar, out\nvar a : vector(n), in\npre: 0 <= n\n"
      "post: y = sum(i, 0, n-1, a[i]) + sum(i, 0, n-1, a[i] * a[i])\n");
  try {
    split_postcondition(mode_spec(s, Mode::Indexed));
    FAIL("expected UnsplittableForm");
  } catch (const DerivationError& e) {
    CHECK(e.kind() == DerivationErrorKind::UnsplittableForm);
  }
}

TEST_CASE("split identity, indexed: every split point of random vectors") {
  SplitIdentity split = split_postcondition(indexed());
  CHECK(split.split == normalize(ex("sum(i = 0 ..< k, a[i] * x^i) + sum(i = k ..< n, a[i] * x^(i - k)) * x^k"),
                                 indexed().spec.context().norm()));
  Gen g(11);
  for (int t = 0; t < 200; ++t) {
    State s;
    s.vectors["a"] = g.coeffs(8);
    s.scalars["x"] = g.integer(-3, 3);
    long n = static_cast<long>(s.vectors["a"].size());
    s.scalars["n"] = n;
    Rational expected = reference_poly(s.vectors["a"], s.scalars["x"]);
    for (long k = 0; k <= n; ++k) {
      s.scalars["k"] = k;
      CHECK(evaluate(split.split, s) == expected);
      CHECK(evaluate(split.range, s) == Truth::True);
    }
  }
}

TEST_CASE("split identity, FLAME: every partition of random vectors") {
  SplitIdentity split = split_postcondition(flame());
  CHECK(print(split.split) == "pi(a_T, chi) + pi(a_B, chi) * chi^m(a_T)");
  Gen g(12);
  for (int t = 0; t < 200; ++t) {
    State s;
    s.vectors["a"] = g.coeffs(8);
    s.scalars["chi"] = g.integer(-3, 3);
    long n = static_cast<long>(s.vectors["a"].size());
    s.scalars["n"] = n;
    Rational expected = reference_poly(s.vectors["a"], s.scalars["chi"]);
    for (long k = 0; k <= n; ++k) {
      s.cursors["a"].split = static_cast<std::size_t>(k);
      CHECK(evaluate(split.split, s) == expected);
    }
  }
}

TEST_CASE("indexed candidates: the five invariants of the family") {
  NormContext nc = loop_context(indexed(), candidate(Mode::Indexed, 3)).norm();
  const std::vector<std::pair<int, std::string>> rows = {
      {1, "y = sum(i = 0 ..< k, a[i] * x^i) && 0 <= k && k <= n"},
      {2, "y = sum(i = k ..< n, a[i] * x^i) && 0 <= k && k <= n"},
      {3, "y = sum(i = 0 ..< k, a[i] * x^i) && 0 <= k && k <= n && z = x^k"},
      {4, "y = sum(i = k ..< n, a[i] * x^i) && 0 <= k && k <= n && z = x^k"},
      {5, "y = sum(i = k ..< n, a[i] * x^(i - k)) && 0 <= k && k <= n"},
  };
  int valid = 0;
  for (const InvariantCandidate& c : candidates(Mode::Indexed)) valid += c.valid;
  CHECK(valid >= 5);
  for (const auto& [id, text] : rows) {
    const InvariantCandidate& c = candidate(Mode::Indexed, id);
    CHECK(c.valid);
    CHECK_MESSAGE(normalize(c.predicate, nc) == normalize(pred(text), nc), id);
  }
  CHECK(candidate(Mode::Indexed, 1).direction == Direction::FirstToLast);
  CHECK(candidate(Mode::Indexed, 3).direction == Direction::FirstToLast);
  CHECK(candidate(Mode::Indexed, 2).direction == Direction::LastToFirst);
  CHECK(candidate(Mode::Indexed, 4).direction == Direction::LastToFirst);
  CHECK(candidate(Mode::Indexed, 5).direction == Direction::LastToFirst);
  CHECK(candidate(Mode::Indexed, 3).auxiliaries.size() == 1);
  CHECK(candidate(Mode::Indexed, 5).auxiliaries.empty());
}

TEST_CASE("indexed candidates: the overshooting range is repaired and noted") {
  for (int id : {1, 3}) {
    const InvariantCandidate& c = candidate(Mode::Indexed, id);
    REQUIRE(c.notes.size() == 1);
    CHECK(c.notes[0].rfind("range repaired", 0) == 0);
  }
  for (int id : {2, 4, 5}) CHECK(candidate(Mode::Indexed, id).notes.empty());
}

TEST_CASE("candidates: the empty selection is rejected for non-vacuity") {
  for (Mode m : {Mode::Indexed, Mode::Flame}) {
    int rejected = 0;
    for (const InvariantCandidate& c : candidates(m)) {
      if (c.valid) continue;
      ++rejected;
      CHECK(c.reason.rfind("non-vacuity", 0) == 0);
    }
    CHECK(rejected >= 1);
  }
}

TEST_CASE("FLAME candidates") {
  const std::vector<std::pair<int, std::string>> rows = {
      {1, "psi = pi(a_T, chi)"},
      {2, "psi = pi(a_B, chi) * chi^m(a_T)"},
      {5, "psi = pi(a_B, chi)"},
  };
  for (const auto& [id, text] : rows) {
    const InvariantCandidate& c = candidate(Mode::Flame, id);
    CHECK(c.valid);
    NormContext nc = loop_context(flame(), c).norm();
    CHECK_MESSAGE(normalize(c.predicate, nc) == normalize(pred(text), nc), id);
  }
  CHECK(candidate(Mode::Flame, 5).direction == Direction::LastToFirst);
  CHECK(candidate(Mode::Flame, 1).direction == Direction::FirstToLast);
}

TEST_CASE("candidates: every valid one admits a guard") {
  for (Mode m : {Mode::Indexed, Mode::Flame})
    for (const InvariantCandidate& c : candidates(m))
      if (c.valid) CHECK_NOTHROW(derive_guard(m == Mode::Indexed ? indexed() : flame(), c));
}

TEST_CASE("derive_guard") {
  CHECK(derive_guard(indexed(), candidate(Mode::Indexed, 5)) == lt(num(0), var("k")));
  CHECK(derive_guard(indexed(), candidate(Mode::Indexed, 2)) == lt(num(0), var("k")));
  CHECK(derive_guard(indexed(), candidate(Mode::Indexed, 1)) == lt(var("k"), var("n")));
  CHECK(print(derive_guard(flame(), candidate(Mode::Flame, 5))) == "m(a_B) < m(a)");
  CHECK(print(derive_guard(flame(), candidate(Mode::Flame, 1))) == "m(a_T) < m(a)");
}

TEST_CASE("derive_guard: the exit condition implies the postcondition") {
  for (Mode m : {Mode::Indexed, Mode::Flame}) {
    const ModeSpec& ms = m == Mode::Indexed ? indexed() : flame();
    for (const InvariantCandidate& c : candidates(m)) {
      if (!c.valid) continue;
      Atom g = derive_guard(ms, c);
      Context ctx = loop_context(ms, c);
      Verdict v = implies(c.predicate && Predicate(negate(g)), ms.spec.post, ctx);
      CHECK(v.ok());
    }
  }
}

TEST_CASE("enumeration is deterministic") {
  auto again = enumerate_invariants(indexed());
  REQUIRE(again.size() == candidates(Mode::Indexed).size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].predicate == candidates(Mode::Indexed)[i].predicate);
    CHECK(again[i].valid == candidates(Mode::Indexed)[i].valid);
  }
}
