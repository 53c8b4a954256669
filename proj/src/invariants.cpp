#include "flamesmith/invariants.hpp"

#include "flamesmith/normalize.hpp"
#include "flamesmith/syntax.hpp"

#include <random>

namespace flamesmith {

const char* to_string(Direction d) { return d == Direction::FirstToLast ? "first-to-last" : "last-to-first"; }

namespace {

std::string fresh_name(const OperationSpec& spec, const std::string& base) {
  std::string name = base;
  for (int i = 1; spec.context().find(name); ++i) name = base + std::to_string(i);
  return name;
}

[[noreturn]] void unsplittable(const std::string& detail) {
  throw DerivationError(DerivationErrorKind::UnsplittableForm, "1b", detail);
}

Expr len(const std::string& vec, Region r) { return Expr::len({vec, r}); }
Expr poly(const std::string& vec, Region r, const Expr& point) { return Expr::poly({vec, r}, point); }

}  // namespace

ModeSpec mode_spec(const OperationSpec& spec, Mode mode) {
  ModeSpec ms;
  ms.mode = mode;
  if (mode == Mode::Flame) {
    ms.spec = to_flame(spec);
    const Atom& post = ms.spec.post.atoms.at(0);
    ms.ops.output = post.lhs.name();
    ms.ops.vec = post.rhs.path().root;
    ms.ops.size = ms.spec.vector().size;
    if (post.rhs.point().kind() != ExprKind::Var)
      unsplittable("the polynomial is evaluated at a compound point: " + print(post.rhs.point()));
    ms.ops.point = post.rhs.point().name();
    ms.ops.aux = fresh_name(ms.spec, "z");
    ms.ops.bound = "i";
    ms.ops.body = elem(ms.ops.vec, var("i")) * pow(var(ms.ops.point), var("i"));
    return ms;
  }

  ms.spec = spec;
  if (!spec.index()) ms.spec.decls.push_back(Decl{fresh_name(spec, "k"), Role::Index, false, ""});
  const Decl& vec = ms.spec.vector();
  const Atom& post = ms.spec.post.atoms.at(0);
  NormContext nc = ms.spec.context().norm();
  const Expr& rhs = post.rhs;
  if (rhs.kind() != ExprKind::Sum || !equivalent(rhs.lo(), num(0), nc) || !equivalent(rhs.hi(), var(vec.size), nc))
    unsplittable("postcondition is not a single sum over " + vec.name + "[0 .. " + vec.size + "-1]: " + print(rhs));
  ms.ops.output = post.lhs.name();
  ms.ops.vec = vec.name;
  ms.ops.size = vec.size;
  ms.ops.index = ms.spec.index()->name;
  ms.ops.aux = fresh_name(ms.spec, "z");
  ms.ops.bound = rhs.name();
  ms.ops.body = rhs.body();
  for (const Decl& d : ms.spec.decls) {
    if (d.role != Role::Input || d.is_vector) continue;
    Expr mono = elem(vec.name, var(rhs.name())) * pow(var(d.name), var(rhs.name()));
    if (equivalent(rhs.body(), mono, nc)) {
      ms.ops.point = d.name;
      break;
    }
  }
  return ms;
}

SplitIdentity split_postcondition(const ModeSpec& ms, std::uint64_t seed) {
  const Operands& o = ms.ops;
  const Atom& post = ms.spec.post.atoms.at(0);
  SplitIdentity id;
  id.output = post.lhs;
  Context ctx = ms.spec.context();
  if (ms.mode == Mode::Flame) {
    Expr chi = var(o.point);
    id.split = poly(o.vec, Region::T, chi) + poly(o.vec, Region::B, chi) * pow(chi, len(o.vec, Region::T));
    ctx.partitions[o.vec] = std::nullopt;
  } else {
    Expr k = var(o.index), n = var(o.size);
    Expr left = Expr::sum(o.bound, num(0), k, o.body);
    Expr right;
    if (!o.point.empty()) {
      Expr i = var(o.bound), x = var(o.point);
      right = Expr::sum(o.bound, k, n, elem(o.vec, i) * pow(x, i - k)) * pow(x, k);
    } else {
      right = Expr::sum(o.bound, k, n, o.body);
    }
    id.split = left + right;
    id.range = Predicate({le(num(0), k), le(k, n)});
  }

  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < 64; ++trial) {
    State s = random_state(ctx, rng);
    std::size_t length = s.vectors.at(o.vec).size();
    for (std::size_t split = 0; split <= length; ++split) {
      if (ms.mode == Mode::Flame)
        s.cursors[o.vec].split = split;
      else
        s.scalars[o.index] = Rational(static_cast<long>(split));
      bool same = false;
      try {
        same = evaluate(post.rhs, s) == evaluate(id.split, s);
      } catch (const EvalError& e) {
        unsplittable(std::string("split cannot be evaluated: ") + e.what());
      }
      if (!same) unsplittable("split of " + print(post.rhs) + " fails at " + describe(s));
    }
  }
  return id;
}

Context loop_context(const ModeSpec& ms, const InvariantCandidate& c) {
  Context ctx = ms.spec.context();
  for (const auto& [name, def] : c.auxiliaries)
    if (!ctx.find(name)) ctx.decls.push_back(Decl{name, Role::Aux, false, ""});
  if (ms.mode == Mode::Flame) ctx.partitions[ms.ops.vec] = std::nullopt;
  return ctx;
}

std::vector<Atom> guard_grammar(const ModeSpec& ms) {
  if (ms.mode == Mode::Flame) {
    Expr t = len(ms.ops.vec, Region::T), b = len(ms.ops.vec, Region::B), a = len(ms.ops.vec, Region::Whole);
    return {lt(b, a), lt(t, a), lt(num(0), t), lt(num(0), b), le(b, a), le(t, a), le(num(0), t), le(num(0), b)};
  }
  Expr k = var(ms.ops.index), n = var(ms.ops.size);
  return {lt(num(0), k), lt(k, n), le(num(0), k), le(k, n), lt(k, num(0)), le(k, num(0)), lt(n, k), le(n, k)};
}

Atom derive_guard(const ModeSpec& ms, const InvariantCandidate& c, const CheckOptions& opts) {
  Context ctx = loop_context(ms, c);
  struct Accepted {
    Atom guard;
    Verdict verdict;
  };
  std::vector<Accepted> accepted;
  for (const Atom& g : guard_grammar(ms)) {
    Predicate exit = c.predicate && Predicate(negate(g));
    if (prove(exit, Predicate::falsity(), ctx).kind == VerdictKind::Proved) continue;
    std::mt19937_64 rng(opts.seed);
    if (!sample_satisfying(exit, ctx, rng, 2 * std::max<long>(opts.trials, 1))) continue;
    Verdict v = implies(exit, ms.spec.post, ctx, opts);
    if (v.ok()) accepted.push_back({g, v});
  }
  bool any_proved = false;
  for (const Accepted& a : accepted) any_proved = any_proved || a.verdict.kind == VerdictKind::Proved;
  std::vector<Atom> pool;
  for (const Accepted& a : accepted)
    if (!any_proved || a.verdict.kind == VerdictKind::Proved) pool.push_back(a.guard);
  if (pool.empty())
    throw DerivationError(DerivationErrorKind::NoGuardFound, "3",
                          "no guard in the grammar makes " + print(c.predicate) + " && !G imply the postcondition");

  CheckOptions quick = opts;
  quick.trials = std::min<long>(opts.trials, 200);
  // weaker(a, b): every loop state that satisfies b also satisfies a.
  auto weaker = [&](const Atom& a, const Atom& b) { return implies(c.predicate && Predicate(b), a, ctx, quick).ok(); };
  for (const Atom& g : pool) {
    bool dominated = false;
    for (const Atom& h : pool)
      if (!(h == g) && weaker(h, g) && !weaker(g, h)) dominated = true;
    if (!dominated) return g;
  }
  return pool.front();
}

namespace {

// Every Sum over the vector, in the order they appear.
void collect_sums(const Expr& e, const std::string& vec, std::vector<Expr>& out) {
  if (e.kind() == ExprKind::Sum) {
    for (const VecPath& p : vec_paths(e.body()))
      if (p.root == vec) {
        out.push_back(e);
        break;
      }
  }
  for (const Expr& k : e.kids()) collect_sums(k, vec, out);
}

// The constraints on the index alone.
Predicate range_part(const Predicate& p) {
  Predicate r;
  for (const Atom& a : p.atoms)
    if (vec_paths(a.lhs).empty() && vec_paths(a.rhs).empty() && !(a.rel == Rel::Eq && a.lhs.kind() == ExprKind::Var))
      r.atoms.push_back(a);
  return r;
}

// Indices of every summed element stay in [0, n) under the candidate's range.
// A sum whose upper bound overshoots by a constant is shifted down by that
// constant and the repair is noted.
void check_well_formed(const ModeSpec& ms, InvariantCandidate& c, const Context& ctx, const CheckOptions& opts) {
  const Operands& o = ms.ops;
  NormContext nc = ctx.norm();
  Predicate range = range_part(c.predicate);
  std::vector<Expr> sums;
  for (const Atom& a : c.predicate.atoms) {
    collect_sums(a.lhs, o.vec, sums);
    collect_sums(a.rhs, o.vec, sums);
  }
  for (const Expr& s : sums) {
    Predicate bounds({le(num(0), s.lo()), le(s.hi(), var(o.size))});
    Verdict v = implies(range, bounds, ctx, opts);
    if (v.ok()) continue;
    auto over = canonical(s.hi() - var(o.index), nc).as_constant();
    if (!over || *over <= 0) {
      c.valid = false;
      c.reason = "well-formedness: " + print(s) + " reads outside " + o.vec + " when " + print(range);
      return;
    }
    Expr fixed_hi = normalize(s.hi() - Expr::constant(*over), nc);
    Expr fixed = Expr::sum(s.name(), s.lo(), fixed_hi, s.body());
    c.predicate = map_exprs(c.predicate, [&](const Expr& e) {
      return transform(e, [&](const Expr& n) -> std::optional<Expr> {
        if (n == s) return fixed;
        return std::nullopt;
      });
    });
    c.notes.push_back("range repaired: " + print(s) + " reaches " + o.vec + "[" + o.size + "] when " + o.index +
                      " = " + o.size + "; the sum now ends before " + print(fixed_hi));
    if (!implies(range, Predicate({le(num(0), fixed.lo()), le(fixed.hi(), var(o.size))}), ctx, opts).ok()) {
      c.valid = false;
      c.reason = "well-formedness: repaired " + print(fixed) + " still reads outside " + o.vec;
      return;
    }
  }
}

void check_non_vacuous(const ModeSpec& ms, InvariantCandidate& c) {
  for (const Atom& a : c.predicate.atoms) {
    if (a.rel != Rel::Eq || !a.lhs.is_var(ms.ops.output)) continue;
    for (const VecPath& p : vec_paths(a.rhs))
      if (p.root == ms.ops.vec) return;
  }
  c.valid = false;
  c.reason = "non-vacuity: " + display_name(ms.ops.output, Style::Text) + " is defined without reference to " +
             ms.ops.vec + ", so the loop computes nothing";
}

InvariantCandidate make(const ModeSpec& ms, int id, std::string label, Predicate p, Direction d) {
  InvariantCandidate c;
  c.id = id;
  c.mode = ms.mode;
  c.label = std::move(label);
  c.predicate = std::move(p);
  c.direction = d;
  return c;
}

std::vector<InvariantCandidate> indexed_candidates(const ModeSpec& ms) {
  const Operands& o = ms.ops;
  Expr y = var(o.output), k = var(o.index), n = var(o.size), i = var(o.bound);
  Predicate range({le(num(0), k), le(k, n)});
  std::vector<InvariantCandidate> out;
  // The left selection as first written counts element k as processed.
  Expr left = Expr::sum(o.bound, num(0), k + 1, o.body);
  Expr right = Expr::sum(o.bound, k, n, o.body);
  out.push_back(make(ms, 1, "left partial sum", Predicate(eq(y, left)) && range, Direction::FirstToLast));
  out.push_back(make(ms, 2, "right partial sum", Predicate(eq(y, right)) && range, Direction::LastToFirst));
  if (!o.point.empty()) {
    Expr x = var(o.point), z = var(o.aux);
    Predicate track(eq(z, pow(x, k)));
    InvariantCandidate c3 = make(ms, 3, "left partial sum, power tracked",
                                 Predicate(eq(y, left)) && range && track, Direction::FirstToLast);
    c3.auxiliaries.emplace_back(o.aux, pow(x, k));
    out.push_back(c3);
    InvariantCandidate c4 = make(ms, 4, "right partial sum, power tracked",
                                 Predicate(eq(y, right)) && range && track, Direction::LastToFirst);
    c4.auxiliaries.emplace_back(o.aux, pow(x, k));
    out.push_back(c4);
    Expr deferred = Expr::sum(o.bound, k, n, elem(o.vec, i) * pow(x, i - k));
    out.push_back(make(ms, 5, "right partial sum, power deferred", Predicate(eq(y, deferred)) && range,
                       Direction::LastToFirst));
  }
  out.push_back(make(ms, 6, "empty selection", Predicate({eq(y, num(0)), le(num(0), k), le(k, n - 1)}),
                     Direction::LastToFirst));
  return out;
}

std::vector<InvariantCandidate> flame_candidates(const ModeSpec& ms) {
  const Operands& o = ms.ops;
  Expr psi = var(o.output), chi = var(o.point), z = var(o.aux);
  Expr top = poly(o.vec, Region::T, chi), bottom = poly(o.vec, Region::B, chi);
  Expr shift = pow(chi, len(o.vec, Region::T));
  std::vector<InvariantCandidate> out;
  out.push_back(make(ms, 1, "top part", Predicate(eq(psi, top)), Direction::FirstToLast));
  out.push_back(make(ms, 2, "bottom part", Predicate(eq(psi, bottom * shift)), Direction::LastToFirst));
  InvariantCandidate c3 =
      make(ms, 3, "top part, power tracked", Predicate({eq(psi, top), eq(z, shift)}), Direction::FirstToLast);
  c3.auxiliaries.emplace_back(o.aux, shift);
  out.push_back(c3);
  InvariantCandidate c4 = make(ms, 4, "bottom part, power tracked", Predicate({eq(psi, bottom * shift), eq(z, shift)}),
                               Direction::LastToFirst);
  c4.auxiliaries.emplace_back(o.aux, shift);
  out.push_back(c4);
  out.push_back(make(ms, 5, "bottom part, power deferred", Predicate(eq(psi, bottom)), Direction::LastToFirst));
  out.push_back(make(ms, 6, "empty selection", Predicate(eq(psi, num(0))), Direction::LastToFirst));
  return out;
}

}  // namespace

std::vector<InvariantCandidate> enumerate_invariants(const ModeSpec& ms, const CheckOptions& opts) {
  split_postcondition(ms, opts.seed);
  std::vector<InvariantCandidate> out = ms.mode == Mode::Flame ? flame_candidates(ms) : indexed_candidates(ms);
  for (InvariantCandidate& c : out) {
    Context ctx = loop_context(ms, c);
    if (ms.mode == Mode::Indexed) check_well_formed(ms, c, ctx, opts);
    if (c.valid) check_non_vacuous(ms, c);
    if (!c.valid) continue;
    try {
      derive_guard(ms, c, opts);
    } catch (const DerivationError& e) {
      c.valid = false;
      c.reason = std::string("completability: ") + e.what();
    }
  }
  return out;
}

}  // namespace flamesmith
