#pragma once

#include "flamesmith/error.hpp"
#include "flamesmith/rational.hpp"

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace flamesmith {

// Regions of a partitioned vector. T/B are the two-way split; R0/R1/R2 are the
// three-way split exposed inside a loop body (R1 is the single exposed element).
enum class Region { Whole, T, B, R0, R1, R2 };

// Which element a repartition exposes: the top of the bottom part, or the
// bottom of the top part.
enum class Expose { FromTop, FromBottom };

struct VecPath {
  std::string root;
  Region region = Region::Whole;

  auto operator<=>(const VecPath&) const = default;
  bool operator==(const VecPath&) const = default;
};

// Suffix used when a region is written as an identifier ("a_T", "a_2", ...).
std::string region_suffix(Region r);
std::string path_name(const VecPath& p);

enum class ExprKind { Const, Var, Elem, Sum, Add, Sub, Mul, Div, Pow, Len, Poly };

// Immutable expression tree with shared structure. Sum bounds are
// inclusive-lower / exclusive-upper.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr constant(Rational value);
  static Expr integer(long value);
  static Expr var(std::string name);
  static Expr elem(VecPath vec, Expr index);
  static Expr sum(std::string bound, Expr lo, Expr hi, Expr body);
  static Expr add(Expr lhs, Expr rhs);
  static Expr sub(Expr lhs, Expr rhs);
  static Expr mul(Expr lhs, Expr rhs);
  static Expr div(Expr lhs, Expr rhs);
  static Expr pow(Expr base, Expr exponent);
  static Expr len(VecPath vec);
  static Expr poly(VecPath vec, Expr point);
  // The exposed element of a repartitioned vector (alpha_1).
  static Expr exposed(const std::string& root);

  ExprKind kind() const;
  const Rational& value() const;      // Const
  const std::string& name() const;    // Var name, Sum bound variable
  const VecPath& path() const;        // Elem, Len, Poly
  const std::vector<Expr>& kids() const;

  // Accessors by role; they assert the node kind.
  const Expr& index() const;  // Elem
  const Expr& lo() const;     // Sum
  const Expr& hi() const;     // Sum
  const Expr& body() const;   // Sum
  const Expr& lhs() const;    // binary ops, Pow base
  const Expr& rhs() const;    // binary ops, Pow exponent
  const Expr& point() const;  // Poly

  bool is_const() const { return kind() == ExprKind::Const; }
  bool is_const(long v) const;
  bool is_var(const std::string& n) const;

  // Structural equality (bound variable names included).
  bool operator==(const Expr& other) const;
  bool operator!=(const Expr& other) const { return !(*this == other); }

  // Stable textual form in the worksheet file syntax; also a total order key.
  std::string str() const;

  const void* identity() const { return node_.get(); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs);
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator+(const Expr& a, long b);
Expr operator-(const Expr& a, long b);
Expr operator*(long a, const Expr& b);

// Short builders used throughout the engine and the tests.
inline Expr num(long v) { return Expr::integer(v); }
inline Expr var(std::string n) { return Expr::var(std::move(n)); }
inline Expr elem(const std::string& vec, Expr idx) { return Expr::elem({vec, Region::Whole}, std::move(idx)); }
inline Expr pow(Expr b, Expr e) { return Expr::pow(std::move(b), std::move(e)); }

// Free variables (Var nodes not bound by an enclosing Sum).
std::set<std::string> free_vars(const Expr& e);
bool occurs_free(const Expr& e, const std::string& name);
// Every vector path referenced by Elem/Len/Poly nodes.
std::set<VecPath> vec_paths(const Expr& e);

// Bottom-up rebuild: `f` sees each node after its children were rebuilt and
// returns a replacement, or nullopt to keep the node.
Expr transform(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& f);

// Simultaneous, capture-avoiding substitution of free variables.
using Bindings = std::vector<std::pair<std::string, Expr>>;
Expr substitute(const Expr& e, const Bindings& bindings);

// Cursor of a partitioned vector: a_T = [0, split), a_B = [split, length).
// While exposed, a_0 / alpha_1 / a_2 are the three-way split around the
// boundary.
struct Cursor {
  std::size_t split = 0;
  std::optional<Expose> exposed;

  bool operator==(const Cursor&) const = default;
};

struct State {
  std::map<std::string, Rational> scalars;
  std::map<std::string, std::vector<Rational>> vectors;
  std::map<std::string, Cursor> cursors;

  bool operator==(const State&) const = default;
};

// Half-open element range [first, second) of a path under the state's cursors.
std::pair<std::size_t, std::size_t> segment(const VecPath& p, const State& s);

Rational evaluate(const Expr& e, const State& s);

std::string describe(const State& s);

}  // namespace flamesmith
