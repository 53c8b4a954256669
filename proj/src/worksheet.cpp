#include "flamesmith/worksheet.hpp"

#include "flamesmith/normalize.hpp"
#include "flamesmith/syntax.hpp"
#include "flamesmith/wp.hpp"

#include <algorithm>

namespace flamesmith {

std::vector<std::string> Worksheet::required_slots() const {
  if (mode == Mode::Flame) return {"1a", "1b", "2", "3", "4a", "4b", "4c", "5a", "5b", "6", "7", "8"};
  return {"1a", "1b", "2", "3", "4a", "4b", "5", "6", "7", "8"};
}

std::vector<std::string> Worksheet::missing_slots() const {
  std::vector<std::string> out;
  for (const std::string& s : required_slots()) {
    bool have = true;
    if (s == "2") have = invariant.has_value();
    if (s == "3") have = guard.has_value();
    if (s == "4a") have = init_wp.has_value();
    if (s == "4b") have = init.has_value();
    if (s == "4c") have = init_fact.has_value();
    if (s == "5" || s == "5a") have = advance.has_value();
    if (s == "5b") have = merge.has_value();
    if (s == "6") have = step6.has_value();
    if (s == "7") have = step7.has_value();
    if (s == "8") have = update.has_value();
    if (!have) out.push_back(s);
  }
  return out;
}

bool Worksheet::complete() const {
  if (!filled() || obligations.empty()) return false;
  for (const Obligation& o : obligations)
    if (o.verdict.kind == VerdictKind::Falsified) return false;
  return true;
}

const Decl& Worksheet::vector() const {
  for (const Decl& d : decls)
    if (d.is_vector) return d;
  throw SemanticError("worksheet declares no vector");
}

const Decl& Worksheet::output() const {
  for (const Decl& d : decls)
    if (d.role == Role::Output) return d;
  throw SemanticError("worksheet declares no output");
}

Context Worksheet::context() const {
  Context ctx{decls, {}};
  if (mode == Mode::Flame)
    for (const Decl& d : decls)
      if (d.is_vector) ctx.partitions[d.name] = std::nullopt;
  return ctx;
}

Predicate Worksheet::full_invariant() const {
  Predicate p = invariant.value_or(Predicate());
  if (cost) p = p && cost->invariant;
  return p;
}

Stmt Worksheet::full_init() const {
  std::vector<Stmt> parts;
  if (init) parts.push_back(*init);
  if (cost) parts.push_back(assign(cost->counter, num(0)));
  return seq(parts);
}

Stmt Worksheet::body() const {
  std::vector<Stmt> parts;
  if (mode == Mode::Flame) {
    if (advance) parts.push_back(*advance);
    if (update) parts.push_back(*update);
    if (cost) parts.push_back(counter_incr(cost->counter, cost->increment));
    if (merge) parts.push_back(*merge);
  } else {
    if (update) parts.push_back(*update);
    if (cost) parts.push_back(counter_incr(cost->counter, cost->increment));
    if (advance) parts.push_back(*advance);
  }
  return seq(parts);
}

Stmt Worksheet::program() const {
  Predicate g = guard ? Predicate(*guard) : Predicate::falsity();
  return seq({full_init(), loop(g, body())});
}

namespace {

bool has_loop(const Expr& e) {
  if (e.kind() == ExprKind::Sum || e.kind() == ExprKind::Poly) return true;
  for (const Expr& k : e.kids())
    if (has_loop(k)) return true;
  return false;
}

// Only the exposed element may be read by an update in FLAME mode.
bool reads_hidden_region(const Expr& e) {
  if (e.kind() == ExprKind::Elem && e.path().region != Region::Whole && e.path().region != Region::R1) return true;
  for (const Expr& k : e.kids())
    if (reads_hidden_region(k)) return true;
  return false;
}

std::string hole_name(std::size_t i, std::size_t count) { return count == 1 ? "$E" : "$E" + std::to_string(i); }

// The right side of `name = rhs` (either orientation) when rhs does not
// mention name.
std::optional<Expr> solve_for(const Predicate& p, const std::string& name) {
  for (const Atom& a : p.atoms) {
    if (a.rel != Rel::Eq) continue;
    if (a.lhs.is_var(name) && !occurs_free(a.rhs, name)) return a.rhs;
    if (a.rhs.is_var(name) && !occurs_free(a.lhs, name)) return a.lhs;
  }
  return std::nullopt;
}

std::vector<std::string> update_targets(const ModeSpec& ms, const InvariantCandidate& c) {
  std::vector<std::string> t{ms.ops.output};
  for (const auto& [name, def] : c.auxiliaries) t.push_back(name);
  return t;
}

}  // namespace

InitResult derive_init(const ModeSpec& ms, const InvariantCandidate& c, const Predicate& pre,
                       const CheckOptions& opts) {
  Context ctx = loop_context(ms, c);
  NormContext nc = ctx.norm();
  std::vector<std::string> targets = update_targets(ms, c);
  if (ms.mode == Mode::Indexed) targets.push_back(ms.ops.index);
  std::vector<Expr> holes;
  for (std::size_t i = 0; i < targets.size(); ++i) holes.push_back(var(hole_name(i, targets.size())));
  for (std::size_t i = 0; i < targets.size(); ++i) ctx = ctx.with(Decl{holes[i].name(), Role::Ghost, false, ""});

  std::string last_failure = "no choice of initial values satisfies the invariant";
  auto attempt = [&](const Predicate& with_holes, const Bindings& fixed,
                     const std::vector<Stmt>& tail) -> std::optional<std::pair<Stmt, Verdict>> {
    Predicate p = normalize(substitute(with_holes, fixed), nc);
    std::vector<Stmt> parts;
    std::size_t free_holes = targets.size() - fixed.size();
    for (std::size_t i = 0; i < free_holes; ++i) {
      auto rhs = solve_for(p, holes[i].name());
      if (!rhs || has_loop(*rhs)) return std::nullopt;
      for (const Expr& h : holes)
        if (occurs_free(*rhs, h.name())) return std::nullopt;
      parts.push_back(assign(targets[i], normalize(*rhs, nc)));
    }
    for (const auto& [hole, value] : fixed) {
      std::size_t i = std::find(holes.begin(), holes.end(), var(hole)) - holes.begin();
      parts.push_back(assign(targets[i], value));
    }
    parts.insert(parts.end(), tail.begin(), tail.end());
    Stmt init = seq(parts);
    Verdict v = implies(pre, wp(init, c.predicate, nc), ctx, opts);
    if (v.kind == VerdictKind::Falsified || v.kind == VerdictKind::Unknown) {
      last_failure = print(init) + " does not establish the invariant: " + describe(v);
      return std::nullopt;
    }
    return std::make_pair(init, v);
  };

  if (ms.mode == Mode::Indexed) {
    Predicate init_wp = wp(assign(targets, holes), c.predicate, nc);
    std::vector<Expr> choices{num(0), var(ms.ops.size)};
    std::vector<std::pair<Stmt, Verdict>> found;
    for (const Expr& value : choices) {
      auto r = attempt(init_wp, {{holes.back().name(), value}}, {});
      if (r) found.push_back(*r);
    }
    if (found.empty()) throw DerivationError(DerivationErrorKind::NoInitFound, "4b", last_failure);
    // Proved beats Tested; ties go to the first choice.
    auto best = std::find_if(found.begin(), found.end(),
                             [](const auto& f) { return f.second.kind == VerdictKind::Proved; });
    if (best == found.end()) best = found.begin();
    return {init_wp, best->first, std::nullopt};
  }

  std::vector<SplitAt> order = c.direction == Direction::LastToFirst ? std::vector<SplitAt>{SplitAt::Bottom, SplitAt::Top}
                                                                     : std::vector<SplitAt>{SplitAt::Top, SplitAt::Bottom};
  for (SplitAt at : order) {
    Stmt part = partition(ms.ops.vec, at);
    Predicate init_wp = wp(seq({assign(targets, holes), part}), c.predicate, nc);
    auto r = attempt(init_wp, {}, {part});
    if (!r) continue;
    Region empty = at == SplitAt::Bottom ? Region::B : Region::T;
    return {init_wp, r->first, Predicate(eq(Expr::len({ms.ops.vec, empty}), num(0)))};
  }
  throw DerivationError(DerivationErrorKind::NoInitFound, "4b", last_failure);
}

Traversal derive_traversal(const ModeSpec& ms, const InvariantCandidate& c) {
  bool backward = c.direction == Direction::LastToFirst;
  if (ms.mode == Mode::Indexed) {
    Expr k = var(ms.ops.index);
    return {assign(ms.ops.index, backward ? k - 1 : k + 1), std::nullopt};
  }
  Expose e = backward ? Expose::FromBottom : Expose::FromTop;
  return {repartition(ms.ops.vec, e), merge_back(ms.ops.vec, e)};
}

namespace {

struct Source {
  std::string var;
  Term term;
};

// Divides `t` by the source monomial when every source factor appears in `t`
// with an exponent differing by a constant. Negative differences become
// divisions, allowed only on plain variables.
std::optional<Term> divide(const Term& t, const Source& s, const NormContext& nc) {
  Term out = t;
  out.coef = t.coef / s.term.coef;
  for (const auto& [key, f] : s.term.factors) {
    auto it = out.factors.find(key);
    if (it == out.factors.end()) return std::nullopt;
    auto diff = canonical(it->second.exponent - f.exponent, nc).as_constant();
    if (!diff) return std::nullopt;
    if (*diff < 0 && f.atom.kind() != ExprKind::Var) return std::nullopt;
    if (*diff == 0)
      out.factors.erase(it);
    else
      it->second.exponent = Expr::constant(*diff);
  }
  Expr v = var(s.var);
  auto it = out.factors.find(v.str());
  if (it == out.factors.end())
    out.factors.emplace(v.str(), Factor{v, num(1)});
  else
    it->second.exponent = normalize(it->second.exponent + 1, nc);
  return out;
}

Expr rewrite_with_sources(const Expr& rhs, std::vector<Source> sources, const NormContext& nc) {
  std::stable_sort(sources.begin(), sources.end(),
                   [](const Source& a, const Source& b) { return a.term.factors.size() > b.term.factors.size(); });
  Canon c = canonical(rhs, nc);
  for (const Source& s : sources) {
    Canon next;
    for (const auto& [key, t] : c.terms) {
      Term r = t;
      if (auto d = divide(t, s, nc)) r = *d;
      next = canon_add(next, Canon{{{monomial_key(r), r}}});
    }
    c = next;
  }
  return normalize(to_expr(c), nc);
}

std::vector<std::string> divisors_of(const Expr& e, const Context& ctx) {
  std::vector<std::string> out;
  for (const auto& [key, t] : canonical(e, ctx.norm()).terms)
    for (const auto& [fk, f] : t.factors) {
      auto k = canonical(f.exponent, ctx.norm()).as_constant();
      if (!k || *k >= 0 || f.atom.kind() != ExprKind::Var) continue;
      const Decl* d = ctx.find(f.atom.name());
      if (d && d->role == Role::Input && std::find(out.begin(), out.end(), d->name) == out.end())
        out.push_back(d->name);
    }
  return out;
}

// The template an update `v := rhs` instantiates, or nullopt.
std::optional<std::string> classify(const std::string& v, const Expr& rhs, const NormContext& nc) {
  Canon c = canonical(rhs, nc);
  std::vector<const Term*> with_v, without_v;
  for (const auto& [key, t] : c.terms) {
    bool has = false;
    for (const auto& [fk, f] : t.factors)
      if (f.atom.is_var(v)) {
        has = true;
        if (!f.exponent.is_const(1)) return std::nullopt;
      }
    (has ? with_v : without_v).push_back(&t);
  }
  if (with_v.size() != 1) return std::nullopt;
  const Term& t = *with_v.front();
  if (t.coef != 1 && !without_v.empty()) return std::nullopt;
  bool unit = t.factors.size() == 1 && t.coef == 1;
  if (!without_v.empty()) return std::string(unit ? "v + a*p" : "a + v*c");
  if (unit) return std::nullopt;
  bool divides = false;
  for (const auto& [fk, f] : t.factors) {
    auto k = canonical(f.exponent, nc).as_constant();
    divides = divides || (k && *k < 0);
  }
  return std::string(divides ? "v/c" : "v*c");
}

}  // namespace

UpdateResult derive_update(const ModeSpec& ms, const InvariantCandidate& c, const Atom& guard,
                           const Traversal& traversal, const CheckOptions& opts) {
  Context ctx = loop_context(ms, c);
  NormContext nc = ctx.norm();
  std::vector<std::string> targets = update_targets(ms, c);
  UpdateResult r;
  Predicate before;        // what holds just before the update
  Predicate with_holes;    // what the update must establish, targets as holes
  std::vector<std::string> holes;
  for (std::size_t i = 0; i < targets.size(); ++i) holes.push_back(hole_name(i, targets.size()));
  Bindings to_holes;
  for (std::size_t i = 0; i < targets.size(); ++i) to_holes.emplace_back(targets[i], var(holes[i]));
  Context solve_ctx = ctx;

  if (ms.mode == Mode::Indexed) {
    r.step6 = wp(traversal.advance, c.predicate, nc);
    before = c.predicate && Predicate(guard);
    with_holes = targets.size() == 1 ? wp_symbolic_assign(targets[0], r.step6, holes[0], nc)
                                     : normalize(substitute(r.step6, to_holes), nc);
    r.step7 = with_holes;
  } else {
    Expose e = traversal.advance.expose;
    r.step6 = after_repartition(c.predicate, ms.ops.vec, e, nc);
    r.step7 = wp(*traversal.merge, c.predicate, nc);
    before = r.step6;
    with_holes = normalize(substitute(r.step7, to_holes), nc);
    solve_ctx = ctx.exposed(e);
  }

  std::vector<Source> sources;
  for (const Atom& a : before.atoms) {
    if (a.rel != Rel::Eq || a.lhs.kind() != ExprKind::Var) continue;
    if (std::find(targets.begin(), targets.end(), a.lhs.name()) == targets.end()) continue;
    Canon d = canonical(a.rhs, nc);
    if (d.terms.size() != 1) continue;
    sources.push_back({a.lhs.name(), d.terms.begin()->second});
  }

  std::vector<Expr> exprs;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    auto fail = [&](const std::string& why) -> DerivationError {
      return DerivationError(DerivationErrorKind::NoTemplateMatch, "8",
                             why + "; step 6: " + print(r.step6) + "; step 7: " + print(r.step7));
    };
    auto rhs = solve_for(with_holes, holes[i]);
    if (!rhs) throw fail("step 7 does not define " + targets[i]);
    Expr solved = rewrite_with_sources(*rhs, sources, nc);
    if (has_loop(solved)) throw fail("a sum remains in the update for " + targets[i] + ": " + print(solved));
    if (reads_hidden_region(solved))
      throw fail("the update for " + targets[i] + " reads beyond the exposed element: " + print(solved));
    auto t = classify(targets[i], solved, nc);
    if (!t) throw fail(targets[i] + " := " + print(solved) + " matches no update template");
    r.templates.push_back(*t);
    for (const std::string& d : divisors_of(solved, ctx))
      if (std::find(r.divisors.begin(), r.divisors.end(), d) == r.divisors.end()) r.divisors.push_back(d);
    exprs.push_back(solved);
  }
  r.update = assign(targets, exprs);

  // The caller strengthens the precondition and derives again before the
  // update can be checked.
  for (const std::string& d : r.divisors)
    if (std::find(c.predicate.atoms.begin(), c.predicate.atoms.end(), ne(var(d), num(0))) == c.predicate.atoms.end())
      return r;
  Predicate after = ms.mode == Mode::Indexed ? r.step6 : r.step7;
  Verdict v = hoare_test(before, r.update, after, solve_ctx, opts);
  if (v.kind == VerdictKind::Falsified)
    throw DerivationError(DerivationErrorKind::NoTemplateMatch, "8",
                          print(r.update) + " fails its own check: " + v.detail);
  return r;
}

std::vector<Obligation> verify(const Worksheet& w, const CheckOptions& opts) {
  std::vector<std::string> missing;
  for (const std::string& s : w.missing_slots())
    if (s == "2" || s == "3" || s == "4b" || s == "5" || s == "5a" || s == "5b" || s == "8") missing.push_back(s);
  if (!missing.empty()) {
    std::string list;
    for (const std::string& s : missing) list += (list.empty() ? "" : ", ") + s;
    throw DerivationError(DerivationErrorKind::IncompleteWorksheet, missing.front(), "empty slots: " + list);
  }
  Context ctx = w.context();
  NormContext nc = ctx.norm();
  Predicate inv = w.full_invariant();
  const Atom& g = *w.guard;
  Stmt body = w.body();

  std::vector<Obligation> out;
  auto check = [&](std::string name, Predicate p, Predicate q, const Context& c) {
    Obligation o{std::move(name), p, q, implies(p, q, c, opts)};
    out.push_back(std::move(o));
  };
  check("base", w.pre, wp(w.full_init(), inv, nc), ctx);
  check("step", inv && Predicate(g), wp(body, inv, nc), ctx);
  check("exit", inv && Predicate(negate(g)), w.post, ctx);

  if (g.rel == Rel::Lt || g.rel == Rel::Le) {
    Expr t = g.rel == Rel::Lt ? g.rhs - g.lhs : g.rhs - g.lhs + 1;
    Expr ghost = var("$V");
    Context gctx = ctx.with(Decl{"$V", Role::Ghost, false, ""});
    check("descent", normalize(inv && Predicate({g, eq(ghost, t)}), nc), wp(body, Predicate(lt(t, ghost)), nc),
          gctx);
  } else {
    Verdict v;
    v.detail = "the guard " + print(g) + " has no bound to descend to";
    out.push_back({"descent", inv && Predicate(g), Predicate(), v});
  }
  return out;
}

namespace {

Worksheet fill(ModeSpec ms, InvariantCandidate c, const CheckOptions& opts, bool strengthened) {
  Worksheet w;
  w.mode = ms.mode;
  w.op = ms.spec.name;
  w.invariant_id = c.id;
  w.direction = c.direction;
  w.decls = loop_context(ms, c).decls;
  w.pre = ms.spec.pre;
  w.post = ms.spec.post;
  w.invariant = c.predicate;
  w.notes = c.notes;
  w.provenance["1a"] = Provenance::Given;
  w.provenance["1b"] = Provenance::Given;

  w.guard = derive_guard(ms, c, opts);
  InitResult init = derive_init(ms, c, w.pre, opts);
  w.init_wp = init.init_wp;
  w.init = init.init;
  w.init_fact = init.fact;
  Traversal trav = derive_traversal(ms, c);
  w.advance = trav.advance;
  w.merge = trav.merge;
  UpdateResult up = derive_update(ms, c, *w.guard, trav, opts);

  if (!up.divisors.empty() && !strengthened) {
    for (const std::string& x : up.divisors) {
      if (std::find(ms.spec.pre.atoms.begin(), ms.spec.pre.atoms.end(), ne(var(x), num(0))) != ms.spec.pre.atoms.end())
        continue;
      Atom nz = ne(var(x), num(0));
      ms.spec.pre = ms.spec.pre && Predicate(nz);
      c.predicate = c.predicate && Predicate(nz);
      c.notes.push_back(x + " != 0 added to the precondition and invariant: the update divides by " + x);
    }
    return fill(ms, c, opts, true);
  }
  w.step6 = up.step6;
  w.step7 = up.step7;
  w.update = up.update;
  for (std::size_t i = 0; i < up.templates.size(); ++i)
    w.notes.push_back("update of " + up.update.targets[i] + " instantiates " + up.templates[i]);
  for (const std::string& s : w.required_slots())
    if (!w.provenance.count(s)) w.provenance[s] = Provenance::Derived;
  w.obligations = verify(w, opts);
  return w;
}

}  // namespace

Worksheet derive(const OperationSpec& spec, int invariant_id, Mode mode, const CheckOptions& opts) {
  ModeSpec ms = mode_spec(spec, mode);
  for (const InvariantCandidate& c : enumerate_invariants(ms, opts)) {
    if (c.id != invariant_id) continue;
    if (!c.valid) throw SemanticError("invariant " + std::to_string(invariant_id) + " was rejected: " + c.reason);
    return fill(ms, c, opts, false);
  }
  throw SemanticError("no invariant candidate with id " + std::to_string(invariant_id));
}

}  // namespace flamesmith
