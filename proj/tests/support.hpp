#pragma once

#include "flamesmith/interpreter.hpp"
#include "flamesmith/syntax.hpp"
#include "flamesmith/worksheet.hpp"

#include <random>
#include <string>
#include <vector>

namespace testing {

using namespace flamesmith;

inline const char* kPolyevalSpec =
    "op polyeval\n"
    "var y : scalar, out\n"
    "var a : vector(n), in\n"
    "var x : scalar, in\n"
    "var k : scalar, index\n"
    "pre: 0 <= n\n"
    "post: y = sum(i, 0, n-1, a[i] * x^i)\n";

inline const OperationSpec& polyeval() {
  static const OperationSpec spec = parse_spec(kPolyevalSpec);
  return spec;
}

// Seeded source of small test values.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  std::vector<Rational> coeffs(long max_n = 8, long bound = 5) {
    std::vector<Rational> a;
    long n = integer(0, max_n);
    for (long i = 0; i < n; ++i) a.emplace_back(integer(-bound, bound));
    return a;
  }

  // Expressions over scalars x, y, k, n and the vector a of length n.
  Expr expr(int depth) {
    if (depth <= 0 || integer(0, 3) == 0) return leaf();
    switch (integer(0, 6)) {
      case 0: return expr(depth - 1) + expr(depth - 1);
      case 1: return expr(depth - 1) - expr(depth - 1);
      case 2: return expr(depth - 1) * expr(depth - 1);
      case 3: return pow(expr(depth - 1), num(integer(0, 3)));
      case 4: return elem("a", var(pick({"k", "n"})) - integer(0, 2));
      case 5: {
        Expr lo = integer(0, 1) ? var("k") : num(integer(0, 2));
        Expr hi = integer(0, 1) ? var("n") : var("k") + integer(0, 2);
        Expr body = elem("a", var("i")) * pow(var("x"), var("i") - lo);
        if (coin()) body = body + expr(depth - 1);
        return Expr::sum("i", lo, hi, body);
      }
      default: return Expr::div(expr(depth - 1), num(integer(1, 3)));
    }
  }

  Expr leaf() {
    if (integer(0, 2) == 0) return num(integer(-3, 3));
    return var(pick({"x", "y", "k", "n"}));
  }

  State state() {
    State s;
    s.vectors["a"] = coeffs(6);
    long n = static_cast<long>(s.vectors["a"].size());
    s.scalars["n"] = n;
    s.scalars["k"] = integer(0, n);
    s.scalars["x"] = integer(-3, 3);
    s.scalars["y"] = integer(-5, 5);
    return s;
  }

  std::string pick(std::initializer_list<const char*> names) {
    auto it = names.begin();
    std::advance(it, integer(0, static_cast<long>(names.size()) - 1));
    return *it;
  }

 private:
  std::mt19937_64 rng_;
};

inline std::optional<Rational> try_eval(const Expr& e, const State& s) {
  try {
    return evaluate(e, s);
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

// sum a_i x^i with each power taken by GMP's integer exponentiation.
inline Rational reference_poly(const std::vector<Rational>& a, const Rational& x) {
  Rational total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), x.get_num().get_mpz_t(), i);
    mpz_pow_ui(den.get_mpz_t(), x.get_den().get_mpz_t(), i);
    total += a[i] * Rational(num, den);
  }
  return total;
}

inline Predicate pred(const std::string& text, std::set<std::string> vectors = {"a"}) {
  ParseScope scope;
  scope.vectors = std::move(vectors);
  return parse_predicate(text, scope);
}

inline Expr ex(const std::string& text, std::set<std::string> vectors = {"a"}) {
  ParseScope scope;
  scope.vectors = std::move(vectors);
  return parse_expr(text, scope);
}

inline Stmt st(const std::string& text, std::set<std::string> vectors = {"a"}) {
  ParseScope scope;
  scope.vectors = std::move(vectors);
  return parse_stmt(text, scope);
}

inline const Worksheet& derived(int id, Mode mode) {
  static std::map<std::pair<int, Mode>, Worksheet> cache;
  auto key = std::make_pair(id, mode);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, derive(polyeval(), id, mode)).first;
  return it->second;
}

inline Rational output_of(const Worksheet& w, const std::vector<Rational>& a, const Rational& x) {
  return run(w, make_input(w, a, x), true).final.scalars.at(w.output().name);
}

}  // namespace testing
