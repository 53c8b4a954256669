#pragma once

#include "flamesmith/expr.hpp"
#include "flamesmith/normalize.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace flamesmith {

enum class Rel { Eq, Ne, Le, Lt };

struct Atom {
  Rel rel = Rel::Eq;
  Expr lhs;
  Expr rhs;

  bool operator==(const Atom& o) const { return rel == o.rel && lhs == o.lhs && rhs == o.rhs; }
};

inline Atom eq(Expr l, Expr r) { return {Rel::Eq, std::move(l), std::move(r)}; }
inline Atom ne(Expr l, Expr r) { return {Rel::Ne, std::move(l), std::move(r)}; }
inline Atom le(Expr l, Expr r) { return {Rel::Le, std::move(l), std::move(r)}; }
inline Atom lt(Expr l, Expr r) { return {Rel::Lt, std::move(l), std::move(r)}; }

// Negation of a single comparison: not (a <= b) is b < a, and so on.
Atom negate(const Atom& a);

// A conjunction; no atoms means true.
struct Predicate {
  std::vector<Atom> atoms;

  Predicate() = default;
  Predicate(std::vector<Atom> as) : atoms(std::move(as)) {}
  Predicate(Atom a) : atoms{std::move(a)} {}

  static Predicate falsity() { return Predicate(lt(num(0), num(0))); }
  bool is_true() const { return atoms.empty(); }
  bool is_false() const;

  bool operator==(const Predicate& o) const { return atoms == o.atoms; }
  std::string str() const;
};

Predicate operator&&(const Predicate& a, const Predicate& b);

Predicate map_exprs(const Predicate& p, const std::function<Expr(const Expr&)>& f);
Predicate substitute(const Predicate& p, const Bindings& bindings);
std::set<std::string> free_vars(const Predicate& p);

enum class Truth { True, False, Undefined };

// Undefined when some atom cannot be evaluated and no other atom is false.
// Comparisons involving only scalars are checked first so that range facts
// can make a predicate false before an out-of-range element is touched.
Truth evaluate(const Atom& a, const State& s);
Truth evaluate(const Predicate& p, const State& s);

// Normalizes both sides; inequalities are rearranged to isolate an index or
// length, trivially true atoms dropped, duplicates removed. A trivially false
// atom collapses the predicate to `false`.
Predicate normalize(const Predicate& p, const NormContext& ctx = {});

enum class Role { Input, Output, Index, Aux, Counter, Size, Ghost };
const char* to_string(Role r);

struct Decl {
  std::string name;
  Role role = Role::Input;
  bool is_vector = false;
  std::string size;  // size variable of a vector
};

// The names a predicate may mention, and how vectors are partitioned at the
// program point the predicate describes.
struct Context {
  std::vector<Decl> decls;
  // Partitioned vectors; the value is the exposure inside a loop body.
  std::map<std::string, std::optional<Expose>> partitions;

  const Decl* find(const std::string& name) const;
  NormContext norm() const;
  Context with(Decl d) const;
  Context exposed(Expose e) const;
};

struct CheckOptions {
  long trials = 1000;
  std::uint64_t seed = 42;
};

enum class VerdictKind { Proved, Tested, Falsified, Unknown };
const char* to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  int tier = 0;  // 1 symbolic, 2 sampling
  long trials = 0;
  std::uint64_t seed = 0;
  std::optional<State> counterexample;
  std::string detail;

  bool ok() const { return kind == VerdictKind::Proved || kind == VerdictKind::Tested; }
};

// "Proved (tier 1)", "Tested (tier 2, 1000 trials, seed 42)", ...
std::string describe(const Verdict& v);

// A random state for the context: vector lengths 0..8, entries in [-5, 5],
// inputs in [-3, 3], indices within [0, n], partition splits in range.
State random_state(const Context& ctx, std::mt19937_64& rng);

// Draws random states, completing variables defined by equalities in `p`,
// until one satisfies `p`. Returns nullopt after `max_draws` failures.
std::optional<State> sample_satisfying(const Predicate& p, const Context& ctx, std::mt19937_64& rng,
                                       long max_draws);

// Tier 1 only: Proved or Unknown.
Verdict prove(const Predicate& p, const Predicate& q, const Context& ctx);
// Tier 2 only: Falsified or Tested (Unknown when no state satisfies p).
Verdict falsify(const Predicate& p, const Predicate& q, const Context& ctx, const CheckOptions& opts = {});
// Tier 1, then tier 2.
Verdict implies(const Predicate& p, const Predicate& q, const Context& ctx, const CheckOptions& opts = {});

}  // namespace flamesmith
