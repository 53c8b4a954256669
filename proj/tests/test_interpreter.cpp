#include "support.hpp"

#include <doctest.h>

using namespace testing;

TEST_CASE("run: Horner trace") {
  for (Mode m : {Mode::Indexed, Mode::Flame}) {
    const Worksheet& w = derived(5, m);
    RunResult r = run(w, make_input(w, {1, 2, 3}, 2), true);
    const std::string& y = w.output().name;
    CHECK(r.final.scalars.at(y) == 17);
    CHECK(r.iterations == 3);
    REQUIRE(r.trace.size() == 4);
    std::vector<Rational> ys;
    for (const State& s : r.trace) ys.push_back(s.scalars.at(y));
    CHECK(ys == std::vector<Rational>{0, 3, 8, 17});
  }
}

TEST_CASE("run: empty polynomial") {
  const Worksheet& w = derived(5, Mode::Indexed);
  RunResult r = run(w, make_input(w, {}, 5), true);
  CHECK(r.final.scalars.at("y") == 0);
  CHECK(r.iterations == 0);
  CHECK(r.trace.size() == 1);
}

TEST_CASE("run: rationals are exact") {
  const Worksheet& w = derived(5, Mode::Indexed);
  std::vector<Rational> a = {make_rational(1, 2), make_rational(-2, 3), 4};
  Rational x = make_rational(3, 5);
  CHECK(output_of(w, a, x) == reference_poly(a, x));
}

TEST_CASE("run: a corrupted update is caught at iteration 1") {
  Worksheet w = derived(5, Mode::Indexed);
  w.update = st("y := a[k - 1] + y * x + 1");
  try {
    run(w, make_input(w, {1, 2, 3}, 2), true);
    FAIL("expected an invariant violation");
  } catch (const InvariantViolation& e) {
    CHECK(e.iteration() == 1);
    CHECK(e.which() == "loop bottom");
    CHECK(e.state().scalars.at("k") == 2);
  }
  // Unchecked runs finish with the wrong answer.
  CHECK(run(w, make_input(w, {1, 2, 3}, 2), false).final.scalars.at("y") != 17);
}

TEST_CASE("run: a precondition violation is reported") {
  const Worksheet& w = derived(4, Mode::Indexed);
  try {
    run(w, make_input(w, {1, 2}, 0), false);
    FAIL("expected a precondition violation");
  } catch (const InvariantViolation& e) {
    CHECK(e.which() == "precondition");
    CHECK(e.iteration() == 0);
  }
}

TEST_CASE("run: a loop that never ends hits the cap") {
  Worksheet w = derived(5, Mode::Indexed);
  w.advance = st("k := k");
  try {
    run(w, make_input(w, {1, 2}, 1), false);
    FAIL("expected non-termination");
  } catch (const NonTermination& e) {
    CHECK(e.cap() == 30);
  }
}

TEST_CASE("oracle") {
  CHECK(oracle({1, 2, 3}, 2) == 17);
  CHECK(oracle({}, 4) == 0);
  CHECK(oracle({7}, -3) == 7);
  CHECK(oracle({0, 0, 1}, make_rational(1, 2)) == make_rational(1, 4));
  Gen g(31);
  for (int t = 0; t < 1000; ++t) {
    auto a = g.coeffs(8);
    Rational x = g.integer(-3, 3);
    CHECK(oracle(a, x) == reference_poly(a, x));
  }
}

TEST_CASE("nested form identity") {
  CHECK(nested_form_identity_check({1, 2, 3}, 2));
  CHECK(nested_form_identity_check({}, 7));
  Gen g(32);
  for (int t = 0; t < 1000; ++t) CHECK(nested_form_identity_check(g.coeffs(8), g.integer(-3, 3)));
}

TEST_CASE("property: checked runs see no violations and take m(a) iterations") {
  Gen g(33);
  for (Mode m : {Mode::Indexed, Mode::Flame})
    for (int id : {1, 2, 3, 4, 5}) {
      const Worksheet& w = derived(id, m);
      for (int t = 0; t < 200; ++t) {
        auto a = g.coeffs(8);
        Rational x = g.integer(-3, 3);
        if (evaluate(w.pre, make_input(w, a, x)) != Truth::True) continue;
        RunResult r = run(w, make_input(w, a, x), true);
        CHECK(r.iterations == static_cast<long>(a.size()));
        CHECK(r.trace.size() == a.size() + 1);
      }
    }
}
