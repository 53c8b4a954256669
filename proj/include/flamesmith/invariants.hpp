#pragma once

#include "flamesmith/predicate.hpp"
#include "flamesmith/spec.hpp"

#include <string>
#include <utility>
#include <vector>

namespace flamesmith {

enum class Direction { FirstToLast, LastToFirst };
const char* to_string(Direction d);

// Names the derivation works with, resolved from a specification.
struct Operands {
  std::string output;  // y or psi
  std::string vec;     // a
  std::string size;    // n
  std::string index;   // k (indexed mode only)
  std::string point;   // x or chi; empty for a general sum
  std::string aux;     // name for an auxiliary power tracker
  std::string bound;   // summation variable of the postcondition
  Expr body;           // postcondition summand, in terms of `bound`
};

// The specification as seen in one mode: the FLAME view renames scalars and
// replaces the sum by pi(a, chi); the indexed view gains a loop index when
// none is declared.
struct ModeSpec {
  Mode mode = Mode::Indexed;
  OperationSpec spec;
  Operands ops;
};

ModeSpec mode_spec(const OperationSpec& spec, Mode mode);

struct SplitIdentity {
  Expr output;
  Expr split;       // the recursive split of the postcondition's right side
  Predicate range;  // 0 <= k <= n in indexed mode, true in FLAME mode
};

// The postcondition split at k (indexed) or at the a_T / a_B boundary (FLAME),
// checked on random vectors over every split point before it is returned.
// Throws DerivationError(UnsplittableForm).
SplitIdentity split_postcondition(const ModeSpec& ms, std::uint64_t seed = 42);

struct InvariantCandidate {
  int id = 0;
  Mode mode = Mode::Indexed;
  std::string label;
  Predicate predicate;
  std::vector<std::pair<std::string, Expr>> auxiliaries;  // z = x^k
  Direction direction = Direction::LastToFirst;
  bool valid = true;
  std::string reason;              // why a candidate was rejected
  std::vector<std::string> notes;  // repairs applied
};

// The context predicates about a candidate live in: spec names, auxiliaries,
// and the two-way partition in FLAME mode.
Context loop_context(const ModeSpec& ms, const InvariantCandidate& c);

// Candidates from a closed grammar of selections of the split: left or right
// partial sums, the right sum with its power deferred, and an optional
// tracker for the power. Each candidate is checked for well-formedness
// (repairing a range that reads past the end), non-vacuity, and
// completability (some guard closes the loop).
std::vector<InvariantCandidate> enumerate_invariants(const ModeSpec& ms, const CheckOptions& opts = {});

// The guard grammar, in preference order.
std::vector<Atom> guard_grammar(const ModeSpec& ms);

// The weakest guard G with inv && !G implying the postcondition (Proved
// preferred; Tested accepted when nothing is Proved). Guards whose exit
// condition is unsatisfiable under the invariant are skipped. Throws
// DerivationError(NoGuardFound).
Atom derive_guard(const ModeSpec& ms, const InvariantCandidate& c, const CheckOptions& opts = {});

}  // namespace flamesmith
