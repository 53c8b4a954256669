#pragma once

#include "flamesmith/worksheet.hpp"

#include <utility>
#include <vector>

namespace flamesmith {

class CostInvariantFalsified : public Error {
 public:
  explicit CostInvariantFalsified(Obligation o)
      : Error("cost invariant falsified by the " + o.name + " obligation" +
              (o.verdict.counterexample ? " at " + describe(*o.verdict.counterexample) : std::string())),
        obligation_(std::move(o)) {}
  const Obligation& obligation() const { return obligation_; }

 private:
  Obligation obligation_;
};

// Flops of a loop-free statement: one per Add, Sub, Mul and Div outside array
// indices; a power with constant exponent e costs |e| - 1 multiplies (plus a
// divide when e is negative). Symbolic powers and sums throw
// DerivationError(UnsupportedRecurrence).
long flop_count(const Expr& e);
long flop_count(const Stmt& s);

// C_0 = initial, C_{k+1} = C_k + increment.
struct Recurrence {
  Rational initial;
  Rational increment;
};

// initial + increment * k, checked against the recurrence at k = 0..16 and
// symbolically.
Expr solve_recurrence(const Recurrence& r, const std::string& k = "k");

// Elements processed so far: m(a_B) or m(a_T) in FLAME mode, n - k or k with
// an index.
Expr progress(const Worksheet& w);

// Adds the counter: C := 0 after the initialization, C := C + c after the
// update, and C = c * progress to the invariant.
Worksheet instrument(const Worksheet& w);

struct CostReport {
  std::string counter;
  Recurrence recurrence;
  Expr closed_form;  // in k
  Predicate cost_invariant;
  Expr total;
  std::vector<Obligation> verification;
  std::vector<std::pair<long, Rational>> runtime_counts;  // (n, C at exit)
  std::vector<long> mismatches;                           // n where C differs from the total
};

// Verifies the counter's invariant and measures it for n = 0..max_n. Throws
// CostInvariantFalsified when an obligation is falsified.
CostReport prove_cost(const Worksheet& w, long max_n = 64, const CheckOptions& opts = {});

}  // namespace flamesmith
