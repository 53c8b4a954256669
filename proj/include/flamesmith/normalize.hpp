#pragma once

#include "flamesmith/expr.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace flamesmith {

// What the normalizer may assume about the names in an expression.
struct NormContext {
  std::map<std::string, std::string> sizes;  // vector -> size variable
  std::set<std::string> indices;              // loop indices, preferred as inequality subjects
};

// Canonical sum-of-monomials view of an expression. A factor is an opaque atom
// (variable, element, sum, polynomial, length, grouped subexpression or a
// number raised to a symbolic power) together with a normalized exponent.
struct Factor {
  Expr atom;
  Expr exponent;
};

struct Term {
  Rational coef;
  std::map<std::string, Factor> factors;  // keyed by atom text
};

struct Canon {
  std::map<std::string, Term> terms;  // keyed by monomial text

  bool is_zero() const { return terms.empty(); }
  // The constant term, zero when absent.
  Rational constant() const;
  std::optional<Rational> as_constant() const;
};

Canon canonical(const Expr& e, const NormContext& ctx = {});
Expr to_expr(const Canon& c);
std::string monomial_key(const Term& t);
Canon canon_add(const Canon& a, const Canon& b);
Canon canon_scale(const Canon& a, const Rational& k);

// Canonical form: sums peeled and factored, powers merged, constants folded.
// Idempotent. Throws std::logic_error if the rewrite budget is exhausted.
Expr normalize(const Expr& e, const NormContext& ctx = {});

// Both sides normalize to the same expression.
bool equivalent(const Expr& a, const Expr& b, const NormContext& ctx = {});

}  // namespace flamesmith
