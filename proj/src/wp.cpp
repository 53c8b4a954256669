#include "flamesmith/wp.hpp"

#include "flamesmith/syntax.hpp"

namespace flamesmith {

namespace {

using Rewrite = std::function<std::optional<Expr>(const Expr&)>;

Predicate rewrite(const Predicate& p, const Rewrite& f) {
  return map_exprs(p, [&](const Expr& e) { return transform(e, f); });
}

std::string fresh_bound(const Predicate& p) {
  auto used = free_vars(p);
  std::string name = "j";
  for (int i = 1; used.count(name); ++i) name = "j_" + std::to_string(i);
  return name;
}

[[noreturn]] void unsupported(const std::string& what) {
  throw DerivationError(DerivationErrorKind::UnsupportedStatement, "", what);
}

// Describes the two-way split of `vec` as a stack of the three-way regions:
// the exposed element joins the top part when `exposed_on_top`, otherwise the
// bottom part.
Predicate restack(const Predicate& p, const std::string& vec, bool exposed_on_top) {
  const VecPath r0{vec, Region::R0}, r2{vec, Region::R2};
  const Expr alpha = Expr::exposed(vec);
  return rewrite(p, [&](const Expr& x) -> std::optional<Expr> {
    if (x.kind() != ExprKind::Elem && x.kind() != ExprKind::Len && x.kind() != ExprKind::Poly) return std::nullopt;
    if (x.path().root != vec) return std::nullopt;
    const Region r = x.path().region;
    if (r != Region::T && r != Region::B) return std::nullopt;
    const bool simple = (r == Region::T) != exposed_on_top;  // a single region
    const VecPath target = r == Region::T ? r0 : r2;
    switch (x.kind()) {
      case ExprKind::Len:
        return simple ? Expr::len(target) : Expr::len(target) + 1;
      case ExprKind::Poly: {
        if (simple) return Expr::poly(target, x.point());
        if (r == Region::T)  // (a_0 / alpha_1)
          return Expr::poly(r0, x.point()) + alpha * Expr::pow(x.point(), Expr::len(r0));
        return alpha + Expr::poly(r2, x.point()) * x.point();  // (alpha_1 / a_2)
      }
      default:
        if (simple) return Expr::elem(target, x.index());
        if (r == Region::B && x.index().is_const(0)) return alpha;
        unsupported("element " + x.str() + " of a region that spans the exposed element");
    }
  });
}

Predicate partition_wp(const Predicate& p, const std::string& vec, SplitAt at) {
  const Region full = at == SplitAt::Bottom ? Region::T : Region::B;
  return rewrite(p, [&](const Expr& x) -> std::optional<Expr> {
    if (x.kind() != ExprKind::Elem && x.kind() != ExprKind::Len && x.kind() != ExprKind::Poly) return std::nullopt;
    if (x.path().root != vec) return std::nullopt;
    const VecPath whole{vec, Region::Whole};
    if (x.path().region == full) {
      if (x.kind() == ExprKind::Len) return Expr::len(whole);
      if (x.kind() == ExprKind::Poly) return Expr::poly(whole, x.point());
      return Expr::elem(whole, x.index());
    }
    if (x.path().region == Region::T || x.path().region == Region::B) {
      if (x.kind() == ExprKind::Len || x.kind() == ExprKind::Poly) return num(0);
      unsupported("element of an empty region");
    }
    return std::nullopt;
  });
}

// The three-way regions in terms of the two-way split they were exposed from.
Predicate repartition_wp(const Predicate& p, const std::string& vec, Expose e) {
  const VecPath t{vec, Region::T}, b{vec, Region::B};
  const std::string j = fresh_bound(p);
  bool mentions = false;
  Predicate out = rewrite(p, [&](const Expr& x) -> std::optional<Expr> {
    if (x.kind() != ExprKind::Elem && x.kind() != ExprKind::Len && x.kind() != ExprKind::Poly) return std::nullopt;
    if (x.path().root != vec) return std::nullopt;
    const Region r = x.path().region;
    if (r != Region::R0 && r != Region::R1 && r != Region::R2) return std::nullopt;
    mentions = true;
    if (e == Expose::FromBottom) {
      // a_0 = a_T without its last element, alpha_1 = that element, a_2 = a_B.
      if (r == Region::R2) {
        if (x.kind() == ExprKind::Len) return Expr::len(b);
        if (x.kind() == ExprKind::Poly) return Expr::poly(b, x.point());
        return Expr::elem(b, x.index());
      }
      if (r == Region::R1) {
        if (x.kind() == ExprKind::Len) return num(1);
        if (x.kind() == ExprKind::Poly) return Expr::elem(t, Expr::len(t) - 1);
        return Expr::elem(t, Expr::len(t) - 1 + x.index());
      }
      if (x.kind() == ExprKind::Len) return Expr::len(t) - 1;
      if (x.kind() == ExprKind::Poly)
        return Expr::sum(j, num(0), Expr::len(t) - 1, Expr::elem(t, var(j)) * Expr::pow(x.point(), var(j)));
      return Expr::elem(t, x.index());
    }
    // a_0 = a_T, alpha_1 = first element of a_B, a_2 = the rest of a_B.
    if (r == Region::R0) {
      if (x.kind() == ExprKind::Len) return Expr::len(t);
      if (x.kind() == ExprKind::Poly) return Expr::poly(t, x.point());
      return Expr::elem(t, x.index());
    }
    if (r == Region::R1) {
      if (x.kind() == ExprKind::Len) return num(1);
      if (x.kind() == ExprKind::Poly) return Expr::elem(b, num(0));
      return Expr::elem(b, x.index());
    }
    if (x.kind() == ExprKind::Len) return Expr::len(b) - 1;
    if (x.kind() == ExprKind::Poly)
      return Expr::sum(j, num(1), Expr::len(b), Expr::elem(b, var(j)) * Expr::pow(x.point(), var(j) - 1));
    return Expr::elem(b, x.index() + 1);
  });
  if (!mentions) return out;
  // Something must be left to expose.
  return Predicate(le(num(1), Expr::len(e == Expose::FromBottom ? t : b))) && out;
}

Predicate wp_raw(const Stmt& s, const Predicate& r, const NormContext& ctx) {
  switch (s.kind) {
    case StmtKind::Skip: return r;
    case StmtKind::Assign: {
      Bindings b;
      for (std::size_t i = 0; i < s.targets.size(); ++i) b.emplace_back(s.targets[i], s.exprs[i]);
      return normalize(substitute(r, b), ctx);
    }
    case StmtKind::CounterIncr:
      return normalize(substitute(r, {{s.vec, var(s.vec) + s.amount}}), ctx);
    case StmtKind::Seq: {
      Predicate cur = r;
      for (auto it = s.body.rbegin(); it != s.body.rend(); ++it) cur = wp_raw(*it, cur, ctx);
      return cur;
    }
    case StmtKind::While: unsupported("the weakest precondition of a loop is not computed");
    case StmtKind::PartitionInit: return normalize(partition_wp(r, s.vec, s.split), ctx);
    case StmtKind::Repartition: return normalize(repartition_wp(r, s.vec, s.expose), ctx);
    case StmtKind::MergeBack:
      // Merging from the bottom hands the exposed element to a_B.
      return normalize(restack(r, s.vec, s.expose == Expose::FromTop), ctx);
  }
  return r;
}

}  // namespace

Predicate wp(const Stmt& s, const Predicate& r, const NormContext& ctx) {
  if (s.kind == StmtKind::Skip) return normalize(r, ctx);
  return wp_raw(s, r, ctx);
}

Predicate after_repartition(const Predicate& p, const std::string& vec, Expose e, const NormContext& ctx) {
  // Exposing from the bottom takes the element off the end of a_T.
  return normalize(restack(p, vec, e == Expose::FromBottom), ctx);
}

Predicate wp_symbolic_assign(const std::string& target, const Predicate& r, const std::string& hole,
                             const NormContext& ctx) {
  if (!free_vars(r).count(target))
    throw DerivationError(DerivationErrorKind::TargetAbsent, "7", target + " does not occur in " + r.str());
  return normalize(substitute(r, {{target, var(hole)}}), ctx);
}

Verdict hoare_test(const Predicate& pre, const Stmt& s, const Predicate& post, const Context& ctx,
                   const CheckOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  Verdict v;
  v.tier = 2;
  v.seed = opts.seed;
  const long cap = 100 * std::max<long>(opts.trials, 1);
  long satisfied = 0;
  for (long draw = 0; draw < cap && satisfied < opts.trials; ++draw) {
    auto start = sample_satisfying(pre, ctx, rng, 1);
    if (!start) continue;
    ++satisfied;
    State st = *start;
    std::string failure;
    try {
      execute(s, st);
      for (const Atom& a : post.atoms)
        if (evaluate(a, st) != Truth::True) {
          failure = "fails: " + print(a, Style::File);
          break;
        }
    } catch (const EvalError& e) {
      failure = std::string("execution error: ") + e.what();
    }
    if (!failure.empty()) {
      v.kind = VerdictKind::Falsified;
      v.trials = satisfied;
      v.counterexample = *start;
      v.detail = failure;
      return v;
    }
  }
  if (satisfied == 0)
    throw DerivationError(DerivationErrorKind::VacuousPrecondition, "",
                          "no sampled state satisfies " + pre.str());
  v.kind = VerdictKind::Tested;
  v.trials = satisfied;
  return v;
}

}  // namespace flamesmith
