#include "flamesmith/stmt.hpp"

#include "flamesmith/syntax.hpp"

#include <algorithm>

namespace flamesmith {

bool Stmt::operator==(const Stmt& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case StmtKind::Skip: return true;
    case StmtKind::Assign: return targets == o.targets && exprs == o.exprs;
    case StmtKind::Seq: return body == o.body;
    case StmtKind::While: return guard == o.guard && body == o.body;
    case StmtKind::PartitionInit: return vec == o.vec && split == o.split;
    case StmtKind::Repartition:
    case StmtKind::MergeBack: return vec == o.vec && expose == o.expose;
    case StmtKind::CounterIncr: return vec == o.vec && amount == o.amount;
  }
  return false;
}

std::string Stmt::str() const { return print(*this, Style::File); }

Stmt skip() { return Stmt{}; }

Stmt assign(std::vector<std::string> targets, std::vector<Expr> exprs) {
  if (targets.size() != exprs.size()) throw SemanticError("assignment has mismatched target and expression lists");
  std::vector<std::string> sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw SemanticError("assignment assigns a variable twice");
  Stmt s;
  s.kind = StmtKind::Assign;
  s.targets = std::move(targets);
  s.exprs = std::move(exprs);
  return s;
}

Stmt assign(const std::string& target, Expr e) { return assign(std::vector<std::string>{target}, {std::move(e)}); }

Stmt seq(std::vector<Stmt> parts) {
  Stmt s;
  s.kind = StmtKind::Seq;
  for (Stmt& p : parts) {
    if (p.kind == StmtKind::Skip) continue;
    if (p.kind == StmtKind::Seq) {
      for (Stmt& q : p.body) s.body.push_back(std::move(q));
    } else {
      s.body.push_back(std::move(p));
    }
  }
  if (s.body.empty()) return skip();
  if (s.body.size() == 1) return s.body[0];
  return s;
}

Stmt loop(Predicate guard, Stmt body) {
  Stmt s;
  s.kind = StmtKind::While;
  s.guard = std::move(guard);
  s.body.push_back(std::move(body));
  return s;
}

Stmt partition(const std::string& vec, SplitAt at) {
  Stmt s;
  s.kind = StmtKind::PartitionInit;
  s.vec = vec;
  s.split = at;
  return s;
}

Stmt repartition(const std::string& vec, Expose e) {
  Stmt s;
  s.kind = StmtKind::Repartition;
  s.vec = vec;
  s.expose = e;
  return s;
}

Stmt merge_back(const std::string& vec, Expose e) {
  Stmt s;
  s.kind = StmtKind::MergeBack;
  s.vec = vec;
  s.expose = e;
  return s;
}

Stmt counter_incr(const std::string& counter, long amount) {
  Stmt s;
  s.kind = StmtKind::CounterIncr;
  s.vec = counter;
  s.amount = amount;
  return s;
}

std::set<std::string> assigned_vars(const Stmt& s) {
  std::set<std::string> out;
  switch (s.kind) {
    case StmtKind::Assign: out.insert(s.targets.begin(), s.targets.end()); break;
    case StmtKind::CounterIncr: out.insert(s.vec); break;
    case StmtKind::Seq:
    case StmtKind::While:
      for (const Stmt& b : s.body) {
        auto inner = assigned_vars(b);
        out.insert(inner.begin(), inner.end());
      }
      break;
    default: break;
  }
  return out;
}

namespace {

Cursor& cursor_of(State& state, const std::string& vec) {
  auto it = state.cursors.find(vec);
  if (it == state.cursors.end()) throw EvalError(EvalErrorKind::BadCursor, "vector " + vec + " is not partitioned");
  return it->second;
}

std::size_t length_of(const State& state, const std::string& vec) {
  auto it = state.vectors.find(vec);
  if (it == state.vectors.end()) throw EvalError(EvalErrorKind::UnboundVariable, "unbound vector " + vec);
  return it->second.size();
}

}  // namespace

void execute(const Stmt& s, State& state, long loop_cap) {
  switch (s.kind) {
    case StmtKind::Skip: return;
    case StmtKind::Assign: {
      std::vector<Rational> values;
      for (const Expr& e : s.exprs) values.push_back(evaluate(e, state));
      for (std::size_t i = 0; i < s.targets.size(); ++i) state.scalars[s.targets[i]] = values[i];
      return;
    }
    case StmtKind::Seq:
      for (const Stmt& b : s.body) execute(b, state, loop_cap);
      return;
    case StmtKind::While: {
      for (long it = 0;; ++it) {
        Truth g = evaluate(s.guard, state);
        if (g == Truth::Undefined) throw EvalError(EvalErrorKind::UnboundVariable, "loop guard is undefined");
        if (g == Truth::False) return;
        if (it >= loop_cap) throw Error("loop exceeded " + std::to_string(loop_cap) + " iterations");
        execute(s.body.at(0), state, loop_cap);
      }
    }
    case StmtKind::PartitionInit: {
      std::size_t len = length_of(state, s.vec);
      state.cursors[s.vec] = Cursor{s.split == SplitAt::Top ? 0 : len, std::nullopt};
      return;
    }
    case StmtKind::Repartition: {
      std::size_t len = length_of(state, s.vec);
      Cursor& c = cursor_of(state, s.vec);
      if (c.exposed) throw EvalError(EvalErrorKind::BadCursor, "vector " + s.vec + " is already repartitioned");
      if (s.expose == Expose::FromBottom ? c.split == 0 : c.split >= len)
        throw EvalError(EvalErrorKind::BadCursor, "no element of " + s.vec + " left to expose");
      c.exposed = s.expose;
      return;
    }
    case StmtKind::MergeBack: {
      Cursor& c = cursor_of(state, s.vec);
      if (c.exposed != s.expose) throw EvalError(EvalErrorKind::BadCursor, "merge does not match the repartition of " + s.vec);
      if (s.expose == Expose::FromBottom)
        c.split -= 1;
      else
        c.split += 1;
      c.exposed.reset();
      return;
    }
    case StmtKind::CounterIncr: {
      auto it = state.scalars.find(s.vec);
      if (it == state.scalars.end()) throw EvalError(EvalErrorKind::UnboundVariable, "unbound variable " + s.vec);
      it->second += s.amount;
      return;
    }
  }
}

}  // namespace flamesmith
