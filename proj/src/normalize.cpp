#include "flamesmith/normalize.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace flamesmith {

namespace {

constexpr long kStepBudget = 10000;
constexpr long kMaxExpand = 8;

Canon constant_canon(const Rational& v) {
  Canon c;
  if (v != 0) c.terms[""] = Term{v, {}};
  return c;
}

Canon atom_canon(const Expr& atom, const Expr& exponent = num(1)) {
  Term t{Rational(1), {}};
  t.factors[atom.str()] = Factor{atom, exponent};
  Canon c;
  c.terms[monomial_key(t)] = std::move(t);
  return c;
}

void accumulate(Canon& into, Term t) {
  if (t.coef == 0) return;
  std::string key = monomial_key(t);
  auto it = into.terms.find(key);
  if (it == into.terms.end()) {
    into.terms.emplace(std::move(key), std::move(t));
    return;
  }
  it->second.coef += t.coef;
  if (it->second.coef == 0) into.terms.erase(it);
}

class Normalizer {
 public:
  explicit Normalizer(const NormContext& ctx) : ctx_(ctx) {}

  Canon canon(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Const: return constant_canon(e.value());
      case ExprKind::Var: return atom_canon(e);
      case ExprKind::Elem: return atom_canon(Expr::elem(e.path(), expr(e.index())));
      case ExprKind::Len:
        if (e.path().region == Region::R1) return constant_canon(Rational(1));
        return atom_canon(e);
      case ExprKind::Poly:
        if (e.path().region == Region::R1) return atom_canon(Expr::exposed(e.path().root));
        return atom_canon(Expr::poly(e.path(), expr(e.point())));
      case ExprKind::Add: return canon_add(canon(e.lhs()), canon(e.rhs()));
      case ExprKind::Sub: return canon_add(canon(e.lhs()), canon_scale(canon(e.rhs()), Rational(-1)));
      case ExprKind::Mul: return multiply(canon(e.lhs()), canon(e.rhs()));
      case ExprKind::Div: return multiply(canon(e.lhs()), power(canon(e.rhs()), canon(num(-1))));
      case ExprKind::Pow: return power(canon(e.lhs()), canon(e.rhs()));
      case ExprKind::Sum: return sum(e);
    }
    return {};
  }

  Expr expr(const Expr& e) { return to_expr(canon(e)); }

 private:
  void step() {
    if (++steps_ > kStepBudget) throw std::logic_error("normalization exceeded its rewrite budget");
  }

  // Exponent arithmetic happens on normalized expressions.
  Expr exp_add(const Expr& a, const Expr& b) { return to_expr(canon_add(canon(a), canon(b))); }
  Expr exp_mul(const Expr& a, const Expr& b) { return to_expr(multiply(canon(a), canon(b))); }

  Term term_product(const Term& a, const Term& b) {
    Term out{a.coef * b.coef, a.factors};
    for (const auto& [key, f] : b.factors) {
      auto it = out.factors.find(key);
      if (it == out.factors.end()) {
        out.factors.emplace(key, f);
        continue;
      }
      Expr sum_exp = exp_add(it->second.exponent, f.exponent);
      if (sum_exp.is_const(0))
        out.factors.erase(it);
      else
        it->second.exponent = sum_exp;
    }
    return out;
  }

  Canon multiply(const Canon& a, const Canon& b) {
    Canon out;
    for (const auto& [ka, ta] : a.terms)
      for (const auto& [kb, tb] : b.terms) accumulate(out, term_product(ta, tb));
    return out;
  }

  Canon power(const Canon& base, const Canon& exponent) {
    if (auto c = exponent.as_constant()) {
      if (!is_integer(*c)) return atom_canon(Expr::pow(to_expr(base), to_expr(exponent)));
      long n = *as_long(*c);
      if (n == 0) return constant_canon(Rational(1));
      if (n == 1) return base;
      if (base.is_zero()) return n > 0 ? Canon{} : atom_canon(num(0), num(n));
      if (base.terms.size() == 1) {
        const Term& t = base.terms.begin()->second;
        Term out{Rational(1), {}};
        Rational cf(1);
        for (long i = 0; i < std::labs(n); ++i) cf *= t.coef;
        out.coef = n > 0 ? cf : Rational(1) / cf;
        for (const auto& [key, f] : t.factors) {
          Expr e = exp_mul(f.exponent, num(n));
          if (!e.is_const(0)) out.factors.emplace(key, Factor{f.atom, e});
        }
        Canon r;
        accumulate(r, std::move(out));
        return r;
      }
      if (n > 0 && n <= kMaxExpand) {
        Canon r = base;
        for (long i = 1; i < n; ++i) r = multiply(r, base);
        return r;
      }
      return atom_canon(to_expr(base), num(n));
    }
    Expr e = to_expr(exponent);
    if (base.is_zero()) return atom_canon(num(0), e);
    if (base.terms.size() != 1) return atom_canon(to_expr(base), e);
    const Term& t = base.terms.begin()->second;
    Canon r = constant_canon(Rational(1));
    if (t.coef != 1) r = atom_canon(Expr::constant(t.coef), e);
    Term rest{Rational(1), {}};
    for (const auto& [key, f] : t.factors) {
      Expr fe = exp_mul(f.exponent, e);
      if (!fe.is_const(0)) rest.factors.emplace(key, Factor{f.atom, fe});
    }
    Canon rc;
    accumulate(rc, std::move(rest));
    return multiply(r, rc);
  }

  // Size of vector path `p` as it may appear as an upper bound.
  bool is_size_of(const Expr& hi, const VecPath& p) {
    if (hi.kind() == ExprKind::Len && hi.path() == p) return true;
    if (p.region != Region::Whole) return false;
    auto it = ctx_.sizes.find(p.root);
    return it != ctx_.sizes.end() && hi.is_var(it->second);
  }

  // The single-term body indexes some vector exactly at the bound variable;
  // returns the vector's path.
  std::optional<VecPath> indexed_at_bound(const Canon& body, const std::string& bound) {
    if (body.terms.size() != 1) return std::nullopt;
    for (const auto& [key, f] : body.terms.begin()->second.factors)
      if (f.atom.kind() == ExprKind::Elem && f.atom.index().is_var(bound) && f.exponent.is_const(1))
        return f.atom.path();
    return std::nullopt;
  }

  Canon instantiate(const Expr& body, const std::string& bound, const Expr& at) {
    return canon(substitute(body, {{bound, at}}));
  }

  Canon sum(const Expr& e) {
    const std::string& i = e.name();
    Expr lo = expr(e.lo());
    Expr hi = expr(e.hi());
    Canon body = canon(e.body());
    if (body.is_zero()) return {};
    Expr nbody = to_expr(body);

    Canon width = canon_add(canon(hi), canon_scale(canon(lo), Rational(-1)));
    if (auto w = width.as_constant()) {
      if (*w <= 0) return {};
      if (*w <= kMaxExpand && is_integer(*w)) {
        step();
        Canon out;
        for (long j = 0; j < *as_long(*w); ++j) out = canon_add(out, instantiate(nbody, i, expr(lo + j)));
        return out;
      }
    }

    Canon clo = canon(lo);
    Canon chi = canon(hi);
    auto at_bound = indexed_at_bound(body, i);
    // Peel from below while the lower bound sits under its symbolic part. When
    // the range might be empty the peeled element is out of bounds, so the
    // rewrite only changes defined values.
    if (clo.constant() < 0) {
      bool provably_nonempty = width.as_constant() && *width.as_constant() > 0;
      if (provably_nonempty || (at_bound && is_size_of(hi, *at_bound))) {
        step();
        return canon_add(instantiate(nbody, i, lo), canon(Expr::sum(i, lo + 1, hi, nbody)));
      }
    }
    if (chi.constant() > 0 && lo.is_const(0) && at_bound) {
      step();
      Expr top = expr(hi - 1);
      return canon_add(canon(Expr::sum(i, lo, top, nbody)), instantiate(nbody, i, top));
    }

    Canon out;
    for (const auto& [key, t] : body.terms) {
      Term outside{t.coef, {}};
      Term inside{Rational(1), {}};
      for (const auto& [fk, f] : t.factors) {
        bool atom_dep = occurs_free(f.atom, i);
        bool exp_dep = occurs_free(f.exponent, i);
        if (!atom_dep && !exp_dep) {
          outside.factors.emplace(fk, f);
          continue;
        }
        if (!atom_dep && exp_dep) {
          Canon ec = canon(f.exponent);
          Rational c = ec.constant();
          if (c != 0) {
            outside.factors.emplace(fk, Factor{f.atom, Expr::constant(c)});
            Expr rest = to_expr(canon_add(ec, constant_canon(-c)));
            inside.factors.emplace(fk, Factor{f.atom, rest});
            continue;
          }
        }
        inside.factors.emplace(fk, f);
      }
      Canon piece;
      if (inside.factors.empty()) {
        // h - l undercounts an empty range with h < l, so a symbolic count
        // stays a sum.
        piece = width.as_constant() ? width : atom_canon(Expr::sum(i, lo, hi, num(1)));
      } else {
        Canon inner;
        accumulate(inner, inside);
        piece = atom_canon(Expr::sum(i, lo, hi, to_expr(inner)));
      }
      Canon scale;
      accumulate(scale, outside);
      out = canon_add(out, multiply(scale, piece));
    }
    return out;
  }

  const NormContext& ctx_;
  long steps_ = 0;
};

// Rendering order of atoms inside a product and of terms inside a sum.
int atom_class(const Expr& a) {
  switch (a.kind()) {
    case ExprKind::Elem: return 0;
    case ExprKind::Sum:
    case ExprKind::Poly: return 1;
    case ExprKind::Var:
    case ExprKind::Len: return 3;
    case ExprKind::Const: return 4;
    default: return 2;
  }
}

int term_rank(const Term& t) {
  if (t.factors.empty()) return 3;
  int rank = 1;
  for (const auto& [k, f] : t.factors) {
    int c = atom_class(f.atom);
    if (c == 0) return 0;
    if (c == 1 || c == 2) rank = 2;
  }
  return rank;
}

Expr render_term(const Term& t, bool absolute) {
  std::vector<const Factor*> fs;
  for (const auto& [k, f] : t.factors) fs.push_back(&f);
  std::stable_sort(fs.begin(), fs.end(), [](const Factor* a, const Factor* b) {
    int ca = atom_class(a->atom), cb = atom_class(b->atom);
    if (ca != cb) return ca < cb;
    if (ca == 3) return a->atom.str() > b->atom.str();
    return a->atom.str() < b->atom.str();
  });
  Rational coef = absolute ? Rational(abs(t.coef)) : t.coef;
  std::optional<Expr> numer;
  std::optional<Expr> denom;
  auto times = [](std::optional<Expr>& acc, const Expr& x) { acc = acc ? Expr::mul(*acc, x) : x; };
  if (coef.get_num() != 1 || fs.empty()) times(numer, Expr::constant(Rational(coef.get_num())));
  if (coef.get_den() != 1) times(denom, Expr::constant(Rational(coef.get_den())));
  for (const Factor* f : fs) {
    bool group = atom_class(f->atom) == 2;
    if (f->exponent.is_const() && f->exponent.value() < 0 && !(group && !f->exponent.is_const(-1))) {
      Rational p = -f->exponent.value();
      times(denom, p == 1 ? f->atom : Expr::pow(f->atom, Expr::constant(p)));
    } else {
      times(numer, f->exponent.is_const(1) ? f->atom : Expr::pow(f->atom, f->exponent));
    }
  }
  Expr out = numer ? *numer : num(1);
  if (denom) out = Expr::div(out, *denom);
  return out;
}

}  // namespace

Rational Canon::constant() const {
  auto it = terms.find("");
  return it == terms.end() ? Rational(0) : it->second.coef;
}

std::optional<Rational> Canon::as_constant() const {
  if (terms.empty()) return Rational(0);
  if (terms.size() == 1 && terms.begin()->first.empty()) return terms.begin()->second.coef;
  return std::nullopt;
}

std::string monomial_key(const Term& t) {
  std::string key;
  for (const auto& [k, f] : t.factors) {
    if (!key.empty()) key += " * ";
    key += "(" + k + ")^(" + f.exponent.str() + ")";
  }
  return key;
}

Canon canon_add(const Canon& a, const Canon& b) {
  Canon out = a;
  for (const auto& [k, t] : b.terms) accumulate(out, t);
  return out;
}

Canon canon_scale(const Canon& a, const Rational& k) {
  Canon out;
  if (k == 0) return out;
  for (const auto& [key, t] : a.terms) {
    Term s = t;
    s.coef *= k;
    out.terms.emplace(key, std::move(s));
  }
  return out;
}

Canon canonical(const Expr& e, const NormContext& ctx) {
  Normalizer n(ctx);
  return n.canon(e);
}

Expr to_expr(const Canon& c) {
  if (c.terms.empty()) return num(0);
  std::vector<const Term*> ts;
  for (const auto& [k, t] : c.terms) ts.push_back(&t);
  std::stable_sort(ts.begin(), ts.end(), [](const Term* a, const Term* b) {
    auto key = [](const Term* t) { return std::make_tuple(t->coef < 0, term_rank(*t), monomial_key(*t)); };
    return key(a) < key(b);
  });
  std::optional<Expr> acc;
  for (const Term* t : ts) {
    if (!acc) {
      acc = render_term(*t, false);
    } else if (t->coef < 0) {
      acc = Expr::sub(*acc, render_term(*t, true));
    } else {
      acc = Expr::add(*acc, render_term(*t, true));
    }
  }
  return *acc;
}

Expr normalize(const Expr& e, const NormContext& ctx) {
  Expr cur = e;
  for (int pass = 0; pass < 16; ++pass) {
    Expr next = to_expr(canonical(cur, ctx));
    if (next == cur) return cur;
    cur = next;
  }
  throw std::logic_error("normalization did not reach a fixpoint for " + e.str());
}

bool equivalent(const Expr& a, const Expr& b, const NormContext& ctx) {
  return canonical(Expr::sub(a, b), ctx).is_zero();
}

}  // namespace flamesmith
