#pragma once

#include "flamesmith/worksheet.hpp"

#include <string>
#include <vector>

namespace flamesmith {

// An assertion of the worksheet failed while running it. `which` is one of
// precondition, loop head, loop bottom, exit, postcondition.
class InvariantViolation : public Error {
 public:
  InvariantViolation(long iteration, std::string which, State state, const std::string& detail)
      : Error(which + " assertion fails at iteration " + std::to_string(iteration) + ": " + detail + " in " +
              describe(state)),
        iteration_(iteration),
        which_(std::move(which)),
        state_(std::move(state)) {}

  long iteration() const { return iteration_; }
  const std::string& which() const { return which_; }
  const State& state() const { return state_; }

 private:
  long iteration_;
  std::string which_;
  State state_;
};

class NonTermination : public Error {
 public:
  explicit NonTermination(long cap)
      : Error("loop still running after " + std::to_string(cap) + " iterations"), cap_(cap) {}
  long cap() const { return cap_; }

 private:
  long cap_;
};

struct RunResult {
  State final;
  long iterations = 0;
  std::vector<State> trace;  // state at the loop head, before each test of the guard
};

// Binds the worksheet's vector, its size and its input scalar.
State make_input(const Worksheet& w, const std::vector<Rational>& coeffs, const Rational& point);

// Runs the initialization and the loop. The loop stops with NonTermination
// after 10 * n + 10 iterations. With `check` set, the invariant is checked at
// the loop head and after every body, and the exit assertion and postcondition
// at the end.
RunResult run(const Worksheet& w, const State& input, bool check);

// sum a_i x^i with each power built by repeated multiplication.
Rational oracle(const std::vector<Rational>& a, const Rational& x);

// a_0 + (a_1 + ( ... (a_{n-1} + 0 x) x ... ) x) x built as an expression and
// evaluated, compared with the oracle.
bool nested_form_identity_check(const std::vector<Rational>& a, const Rational& x);

}  // namespace flamesmith
