#include "flamesmith/predicate.hpp"

#include "flamesmith/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace flamesmith {

Atom negate(const Atom& a) {
  switch (a.rel) {
    case Rel::Eq: return ne(a.lhs, a.rhs);
    case Rel::Ne: return eq(a.lhs, a.rhs);
    case Rel::Le: return lt(a.rhs, a.lhs);
    case Rel::Lt: return le(a.rhs, a.lhs);
  }
  return a;
}

bool Predicate::is_false() const {
  return atoms.size() == 1 && atoms[0] == falsity().atoms[0];
}

std::string Predicate::str() const { return print(*this, Style::File); }

Predicate operator&&(const Predicate& a, const Predicate& b) {
  Predicate out = a;
  for (const Atom& x : b.atoms)
    if (std::find(out.atoms.begin(), out.atoms.end(), x) == out.atoms.end()) out.atoms.push_back(x);
  return out;
}

Predicate map_exprs(const Predicate& p, const std::function<Expr(const Expr&)>& f) {
  Predicate out;
  for (const Atom& a : p.atoms) out.atoms.push_back({a.rel, f(a.lhs), f(a.rhs)});
  return out;
}

Predicate substitute(const Predicate& p, const Bindings& bindings) {
  return map_exprs(p, [&](const Expr& e) { return substitute(e, bindings); });
}

std::set<std::string> free_vars(const Predicate& p) {
  std::set<std::string> out;
  for (const Atom& a : p.atoms) {
    for (const auto& v : free_vars(a.lhs)) out.insert(v);
    for (const auto& v : free_vars(a.rhs)) out.insert(v);
  }
  return out;
}

Truth evaluate(const Atom& a, const State& s) {
  try {
    Rational l = evaluate(a.lhs, s);
    Rational r = evaluate(a.rhs, s);
    bool v = false;
    switch (a.rel) {
      case Rel::Eq: v = l == r; break;
      case Rel::Ne: v = l != r; break;
      case Rel::Le: v = l <= r; break;
      case Rel::Lt: v = l < r; break;
    }
    return v ? Truth::True : Truth::False;
  } catch (const EvalError&) {
    return Truth::Undefined;
  }
}

namespace {

bool touches_vectors(const Atom& a) { return !vec_paths(a.lhs).empty() || !vec_paths(a.rhs).empty(); }

}  // namespace

Truth evaluate(const Predicate& p, const State& s) {
  bool undefined = false;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Atom& a : p.atoms) {
      if (touches_vectors(a) != (pass == 1)) continue;
      Truth t = evaluate(a, s);
      if (t == Truth::False) return Truth::False;
      if (t == Truth::Undefined) undefined = true;
    }
  }
  return undefined ? Truth::Undefined : Truth::True;
}

namespace {

// Preference for the term an inequality is solved for.
int subject_rank(const Factor& f, const NormContext& ctx) {
  if (!f.exponent.is_const(1)) return -1;
  const Expr& a = f.atom;
  if (a.kind() == ExprKind::Var) {
    if (ctx.indices.count(a.name())) return 4;
    for (const auto& [v, size] : ctx.sizes)
      if (size == a.name()) return 2;
    return 0;
  }
  if (a.kind() == ExprKind::Len) return a.path().region == Region::Whole ? 1 : 3;
  return -1;
}

std::optional<Atom> normalize_atom(const Atom& a, const NormContext& ctx, bool& is_false) {
  if (a.rel == Rel::Eq || a.rel == Rel::Ne) {
    Canon d = canonical(Expr::sub(a.lhs, a.rhs), ctx);
    if (auto c = d.as_constant()) {
      bool holds = (*c == 0) == (a.rel == Rel::Eq);
      if (!holds) is_false = true;
      return std::nullopt;
    }
    return Atom{a.rel, normalize(a.lhs, ctx), normalize(a.rhs, ctx)};
  }
  Canon d = canonical(Expr::sub(a.rhs, a.lhs), ctx);
  if (auto c = d.as_constant()) {
    bool holds = a.rel == Rel::Le ? *c >= 0 : *c > 0;
    if (!holds) is_false = true;
    return std::nullopt;
  }
  // Solve for the highest-ranked unit-coefficient term.
  const Term* subject = nullptr;
  std::string subject_key;
  int best = -1;
  for (const auto& [key, t] : d.terms) {
    if (t.factors.size() != 1 || (t.coef != 1 && t.coef != -1)) continue;
    int r = subject_rank(t.factors.begin()->second, ctx);
    if (r > best) {
      best = r;
      subject = &t;
      subject_key = key;
    }
  }
  if (!subject) return Atom{a.rel, normalize(a.lhs, ctx), normalize(a.rhs, ctx)};
  Canon rest = d;
  rest.terms.erase(subject_key);
  Expr s = subject->factors.begin()->second.atom;
  if (subject->coef == 1) return Atom{a.rel, to_expr(canon_scale(rest, Rational(-1))), s};
  return Atom{a.rel, s, to_expr(rest)};
}

}  // namespace

Predicate normalize(const Predicate& p, const NormContext& ctx) {
  Predicate out;
  for (const Atom& a : p.atoms) {
    bool is_false = false;
    auto n = normalize_atom(a, ctx, is_false);
    if (is_false) return Predicate::falsity();
    if (n && std::find(out.atoms.begin(), out.atoms.end(), *n) == out.atoms.end()) out.atoms.push_back(*n);
  }
  return out;
}

const char* to_string(Role r) {
  switch (r) {
    case Role::Input: return "in";
    case Role::Output: return "out";
    case Role::Index: return "index";
    case Role::Aux: return "aux";
    case Role::Counter: return "counter";
    case Role::Size: return "size";
    case Role::Ghost: return "ghost";
  }
  return "?";
}

const Decl* Context::find(const std::string& name) const {
  for (const Decl& d : decls)
    if (d.name == name) return &d;
  return nullptr;
}

NormContext Context::norm() const {
  NormContext n;
  for (const Decl& d : decls) {
    if (d.is_vector && !d.size.empty()) n.sizes[d.name] = d.size;
    if (d.role == Role::Index) n.indices.insert(d.name);
  }
  return n;
}

Context Context::with(Decl d) const {
  Context c = *this;
  if (!c.find(d.name)) c.decls.push_back(std::move(d));
  return c;
}

Context Context::exposed(Expose e) const {
  Context c = *this;
  for (auto& [v, ex] : c.partitions) ex = e;
  return c;
}

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Proved: return "Proved";
    case VerdictKind::Tested: return "Tested";
    case VerdictKind::Falsified: return "Falsified";
    case VerdictKind::Unknown: return "Unknown";
  }
  return "?";
}

std::string describe(const Verdict& v) {
  std::ostringstream out;
  out << to_string(v.kind);
  switch (v.kind) {
    case VerdictKind::Proved: out << " (tier 1)"; break;
    case VerdictKind::Tested: out << " (tier 2, " << v.trials << " trials, seed " << v.seed << ")"; break;
    case VerdictKind::Falsified: out << " (tier 2, seed " << v.seed << ")"; break;
    case VerdictKind::Unknown: break;
  }
  return out.str();
}

namespace {

long uniform(std::mt19937_64& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

}  // namespace

State random_state(const Context& ctx, std::mt19937_64& rng) {
  State s;
  long default_n = -1;
  for (const Decl& d : ctx.decls) {
    if (!d.is_vector) continue;
    auto part = ctx.partitions.find(d.name);
    bool exposed = part != ctx.partitions.end() && part->second.has_value();
    long len = -1;
    if (!d.size.empty()) {
      auto it = s.scalars.find(d.size);
      if (it != s.scalars.end()) len = *as_long(it->second);
    }
    if (len < 0) len = uniform(rng, exposed ? 1 : 0, 8);
    std::vector<Rational> v;
    for (long i = 0; i < len; ++i) v.emplace_back(uniform(rng, -5, 5));
    s.vectors[d.name] = std::move(v);
    if (!d.size.empty()) s.scalars[d.size] = Rational(len);
    if (default_n < 0) default_n = len;
    if (part != ctx.partitions.end()) {
      Cursor c;
      c.exposed = part->second;
      long lo = 0, hi = len;
      if (exposed && *part->second == Expose::FromBottom) lo = std::min<long>(1, len);
      if (exposed && *part->second == Expose::FromTop) hi = std::max<long>(0, len - 1);
      c.split = static_cast<std::size_t>(uniform(rng, lo, hi));
      s.cursors[d.name] = c;
    }
  }
  if (default_n < 0) default_n = uniform(rng, 0, 8);
  for (const Decl& d : ctx.decls) {
    if (d.is_vector || s.scalars.count(d.name)) continue;
    long v = 0;
    switch (d.role) {
      case Role::Input: v = uniform(rng, -3, 3); break;
      case Role::Index: v = uniform(rng, 0, default_n); break;
      case Role::Size: v = uniform(rng, 0, 8); break;
      default: v = uniform(rng, -5, 5); break;
    }
    s.scalars[d.name] = Rational(v);
  }
  return s;
}

namespace {

bool completable(const Decl* d) { return !d || (d->role != Role::Input && d->role != Role::Size && !d->is_vector); }

// Gives defined variables the values their defining equalities demand.
void complete(State& s, const Predicate& p, const Context& ctx) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Atom& a : p.atoms) {
      if (a.rel != Rel::Eq || a.lhs.kind() != ExprKind::Var) continue;
      const std::string& v = a.lhs.name();
      if (!completable(ctx.find(v)) || occurs_free(a.rhs, v)) continue;
      try {
        s.scalars[v] = evaluate(a.rhs, s);
      } catch (const EvalError&) {
      }
    }
  }
}

}  // namespace

std::optional<State> sample_satisfying(const Predicate& p, const Context& ctx, std::mt19937_64& rng,
                                       long max_draws) {
  for (long i = 0; i < max_draws; ++i) {
    State s = random_state(ctx, rng);
    complete(s, p, ctx);
    if (evaluate(p, s) == Truth::True) return s;
  }
  return std::nullopt;
}

Verdict falsify(const Predicate& p, const Predicate& q, const Context& ctx, const CheckOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  Verdict v;
  v.tier = 2;
  v.seed = opts.seed;
  long satisfied = 0;
  const long max_draws = 20 * std::max<long>(opts.trials, 1);
  for (long draw = 0; draw < max_draws && satisfied < opts.trials; ++draw) {
    State s = random_state(ctx, rng);
    complete(s, p, ctx);
    if (evaluate(p, s) != Truth::True) continue;
    ++satisfied;
    Truth t = evaluate(q, s);
    if (t != Truth::True) {
      v.kind = VerdictKind::Falsified;
      v.trials = satisfied;
      v.counterexample = s;
      for (const Atom& a : q.atoms)
        if (evaluate(a, s) != Truth::True) {
          v.detail = "fails: " + print(a, Style::File) + (t == Truth::Undefined ? " (undefined)" : "");
          break;
        }
      return v;
    }
  }
  v.trials = satisfied;
  if (satisfied == 0) {
    v.kind = VerdictKind::Unknown;
    v.detail = "no sampled state satisfies the antecedent";
    return v;
  }
  v.kind = VerdictKind::Tested;
  return v;
}

namespace {

// Linear form over opaque monomials: sum of coef * monomial + constant >= 0.
struct Lin {
  std::map<std::string, Rational> coefs;
  Rational constant;
};

Lin to_lin(const Canon& c) {
  Lin l;
  for (const auto& [key, t] : c.terms) {
    if (key.empty())
      l.constant = t.coef;
    else
      l.coefs[key] = t.coef;
  }
  return l;
}

void add_into(Lin& acc, const Lin& f, int sign) {
  for (const auto& [k, c] : f.coefs) {
    Rational& slot = acc.coefs[k];
    slot += sign * c;
    if (slot == 0) acc.coefs.erase(k);
  }
  acc.constant += sign * f.constant;
}

class Prover {
 public:
  Prover(const Context& ctx) : ctx_(ctx), norm_(ctx.norm()) {}

  Verdict run(const Predicate& p0, const Predicate& q0) {
    Predicate p = normalize(p0, norm_);
    Predicate q = normalize(q0, norm_);
    if (q.is_true() || p.is_false()) return proved();
    facts_.clear();
    add_implicit(p, q);
    for (const Atom& a : p.atoms) add_fact(a);
    if (infeasible()) return proved();

    // Pin down indices and lengths forced to a boundary value.
    Predicate ps = p, qs = q;
    for (int round = 0; round < 2; ++round) {
      bool changed = false;
      for (const Expr& subject : subjects(ps, qs)) {
        for (const Expr& value : boundary_values(subject)) {
          if (subject == value) continue;
          if (!nonneg(lin(Expr::sub(subject, value))) || !nonneg(lin(Expr::sub(value, subject)))) continue;
          ps = normalize(pin(ps, subject, value), norm_);
          qs = normalize(pin(qs, subject, value), norm_);
          changed = true;
          break;
        }
      }
      if (!changed) break;
    }
    if (qs.is_true() || ps.is_false()) return proved();

    Bindings defs;
    for (const Atom& a : ps.atoms) {
      if (a.rel != Rel::Eq || a.lhs.kind() != ExprKind::Var) continue;
      const std::string& v = a.lhs.name();
      if (!completable(ctx_.find(v)) || occurs_free(a.rhs, v)) continue;
      bool dup = std::any_of(defs.begin(), defs.end(), [&](const auto& b) { return b.first == v; });
      if (!dup) defs.emplace_back(v, a.rhs);
    }

    for (const Atom& a : qs.atoms) {
      if (std::find(ps.atoms.begin(), ps.atoms.end(), a) != ps.atoms.end()) continue;
      Atom s{a.rel, substitute(a.lhs, defs), substitute(a.rhs, defs)};
      if (!holds(s, ps)) return unknown();
    }
    return proved();
  }

 private:
  Verdict proved() const {
    Verdict v;
    v.kind = VerdictKind::Proved;
    v.tier = 1;
    return v;
  }
  Verdict unknown() const {
    Verdict v;
    v.tier = 1;
    return v;
  }

  Lin lin(const Expr& e) { return to_lin(canonical(e, norm_)); }

  bool integral_monomial(const Term& t) const {
    if (t.factors.size() != 1) return false;
    const Factor& f = t.factors.begin()->second;
    if (!f.exponent.is_const(1)) return false;
    if (f.atom.kind() == ExprKind::Len) return true;
    if (f.atom.kind() != ExprKind::Var) return false;
    const Decl* d = ctx_.find(f.atom.name());
    if (!d) return f.atom.name().rfind('$', 0) == 0;
    return d->role == Role::Index || d->role == Role::Size || d->role == Role::Counter || d->role == Role::Ghost;
  }

  bool linear_monomial(const Term& t) const {
    if (t.factors.size() != 1) return false;
    const Factor& f = t.factors.begin()->second;
    return f.exponent.is_const(1) && (f.atom.kind() == ExprKind::Var || f.atom.kind() == ExprKind::Len);
  }

  // Appends `d >= 0` (strict when `strict`) when it is linear over scalars
  // and lengths.
  void push(const Canon& d, bool strict) {
    bool integral = true;
    for (const auto& [k, t] : d.terms) {
      if (k.empty()) continue;
      if (!linear_monomial(t)) return;
      integral = integral && integral_monomial(t) && is_integer(t.coef);
    }
    Lin l = to_lin(d);
    if (strict) {
      if (!integral) return;  // only strict facts over integers sharpen
      l.constant -= 1;
    }
    facts_.push_back(std::move(l));
  }

  void add_fact(const Atom& a) {
    switch (a.rel) {
      case Rel::Eq: {
        Canon d = canonical(Expr::sub(a.rhs, a.lhs), norm_);
        push(d, false);
        push(canon_scale(d, Rational(-1)), false);
        break;
      }
      case Rel::Le: push(canonical(Expr::sub(a.rhs, a.lhs), norm_), false); break;
      case Rel::Lt: {
        Canon d = canonical(Expr::sub(a.rhs, a.lhs), norm_);
        std::size_t before = facts_.size();
        push(d, true);
        if (facts_.size() == before) push(d, false);
        break;
      }
      case Rel::Ne: break;
    }
  }

  void add_implicit(const Predicate& p, const Predicate& q) {
    std::set<VecPath> paths;
    for (const Predicate* pr : {&p, &q})
      for (const Atom& a : pr->atoms)
        for (const Expr* e : {&a.lhs, &a.rhs})
          for (const VecPath& vp : vec_paths(*e)) paths.insert(vp);
    for (const Decl& d : ctx_.decls) {
      if (!d.is_vector) continue;
      Expr whole = Expr::len({d.name, Region::Whole});
      paths.insert({d.name, Region::Whole});
      if (!d.size.empty()) add_fact(eq(whole, var(d.size)));
      auto part = ctx_.partitions.find(d.name);
      if (part == ctx_.partitions.end()) continue;
      Expr t = Expr::len({d.name, Region::T}), b = Expr::len({d.name, Region::B});
      paths.insert({d.name, Region::T});
      paths.insert({d.name, Region::B});
      add_fact(eq(t + b, whole));
      if (part->second) {
        Expr r0 = Expr::len({d.name, Region::R0}), r2 = Expr::len({d.name, Region::R2});
        paths.insert({d.name, Region::R0});
        paths.insert({d.name, Region::R2});
        if (*part->second == Expose::FromBottom) {
          add_fact(eq(r0 + 1, t));
          add_fact(eq(r2, b));
        } else {
          add_fact(eq(r0, t));
          add_fact(eq(r2 + 1, b));
        }
      }
    }
    for (const VecPath& vp : paths)
      if (vp.region != Region::R1) add_fact(le(num(0), Expr::len(vp)));
    for (const Decl& d : ctx_.decls)
      if (d.role == Role::Size) add_fact(le(num(0), var(d.name)));
  }

  // Some sum of at most three facts is a negative constant.
  bool infeasible() {
    Lin zero;
    zero.constant = -1;
    // -1 >= 0 follows iff the facts are contradictory over this fragment.
    return nonneg_with(zero, true);
  }

  bool nonneg(const Lin& d) { return nonneg_with(d, false); }

  // Is d >= 0 implied by d - f1 - ... - fj being a nonnegative constant for
  // some j <= 3 facts? With `contradiction`, look for facts summing to a
  // negative constant instead.
  bool nonneg_with(const Lin& d, bool contradiction) {
    auto done = [&](const Lin& r) {
      if (!r.coefs.empty()) return false;
      return contradiction ? r.constant < 0 : r.constant >= 0;
    };
    Lin base;
    if (contradiction) {
      base.constant = 0;
    } else {
      base = d;
    }
    int sign = contradiction ? 1 : -1;
    if (!contradiction && done(base)) return true;
    const std::size_t n = facts_.size();
    for (std::size_t i = 0; i < n; ++i) {
      Lin r1 = base;
      add_into(r1, facts_[i], sign);
      if (done(r1)) return true;
      for (std::size_t j = i; j < n; ++j) {
        Lin r2 = r1;
        add_into(r2, facts_[j], sign);
        if (done(r2)) return true;
        for (std::size_t k = j; k < n; ++k) {
          Lin r3 = r2;
          add_into(r3, facts_[k], sign);
          if (done(r3)) return true;
        }
      }
    }
    return false;
  }

  std::vector<Expr> subjects(const Predicate& p, const Predicate& q) const {
    std::vector<Expr> out;
    auto fv = free_vars(p);
    for (const auto& v : free_vars(q)) fv.insert(v);
    for (const Decl& d : ctx_.decls)
      if (d.role == Role::Index && fv.count(d.name)) out.push_back(var(d.name));
    for (const auto& [v, ex] : ctx_.partitions) {
      out.push_back(Expr::len({v, Region::T}));
      out.push_back(Expr::len({v, Region::B}));
    }
    return out;
  }

  std::vector<Expr> boundary_values(const Expr& subject) const {
    std::vector<Expr> out{num(0)};
    if (subject.kind() == ExprKind::Len) {
      out.push_back(Expr::len({subject.path().root, Region::Whole}));
      return out;
    }
    for (const Decl& d : ctx_.decls)
      if (d.role == Role::Size) out.push_back(var(d.name));
    return out;
  }

  // Replaces subject by value; an empty region collapses the other region
  // onto the whole vector.
  Predicate pin(const Predicate& p, const Expr& subject, const Expr& value) const {
    if (subject.kind() == ExprKind::Var) return substitute(p, {{subject.name(), value}});
    const std::string root = subject.path().root;
    const Region side = subject.path().region;
    const bool empty = value.is_const(0);
    const Region other = side == Region::T ? Region::B : Region::T;
    const Region gone = empty ? side : other;
    const Region full = empty ? other : side;
    return map_exprs(p, [&](const Expr& e) {
      return transform(e, [&](const Expr& x) -> std::optional<Expr> {
        if (x.kind() != ExprKind::Elem && x.kind() != ExprKind::Len && x.kind() != ExprKind::Poly) return std::nullopt;
        if (x.path().root != root) return std::nullopt;
        if (x.path().region == gone) {
          if (x.kind() == ExprKind::Len) return num(0);
          if (x.kind() == ExprKind::Poly) return num(0);
          return std::nullopt;
        }
        if (x.path().region == full) {
          VecPath whole{root, Region::Whole};
          if (x.kind() == ExprKind::Len) return Expr::len(whole);
          if (x.kind() == ExprKind::Poly) return Expr::poly(whole, x.point());
          return Expr::elem(whole, x.index());
        }
        return std::nullopt;
      });
    });
  }

  bool holds(const Atom& a, const Predicate& p) {
    Canon d = canonical(Expr::sub(a.rhs, a.lhs), norm_);
    switch (a.rel) {
      case Rel::Eq: return d.is_zero();
      case Rel::Ne: {
        if (auto c = d.as_constant()) return *c != 0;
        Atom n = normalize(Predicate(a), norm_).atoms.empty() ? a : normalize(Predicate(a), norm_).atoms[0];
        for (const Atom& x : p.atoms)
          if (x.rel == Rel::Ne && ((x.lhs == n.lhs && x.rhs == n.rhs) || (x.lhs == n.rhs && x.rhs == n.lhs)))
            return true;
        return false;
      }
      case Rel::Le: return nonneg(to_lin(d));
      case Rel::Lt: {
        bool integral = true;
        for (const auto& [k, t] : d.terms)
          if (!k.empty()) integral = integral && integral_monomial(t) && is_integer(t.coef);
        Lin l = to_lin(d);
        if (integral) {
          l.constant -= 1;
          return nonneg(l);
        }
        if (auto c = d.as_constant()) return *c > 0;
        return false;
      }
    }
    return false;
  }

  const Context& ctx_;
  NormContext norm_;
  std::vector<Lin> facts_;
};

}  // namespace

Verdict prove(const Predicate& p, const Predicate& q, const Context& ctx) {
  Prover pr(ctx);
  return pr.run(p, q);
}

Verdict implies(const Predicate& p, const Predicate& q, const Context& ctx, const CheckOptions& opts) {
  Verdict v = prove(p, q, ctx);
  if (v.kind == VerdictKind::Proved) return v;
  return falsify(p, q, ctx, opts);
}

}  // namespace flamesmith
