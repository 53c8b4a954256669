#pragma once

#include "flamesmith/expr.hpp"
#include "flamesmith/predicate.hpp"

#include <string>
#include <vector>

namespace flamesmith {

enum class StmtKind { Skip, Assign, Seq, While, PartitionInit, Repartition, MergeBack, CounterIncr };

// Where the initial split of a vector goes: at the top (a_T empty) or at the
// bottom (a_B empty).
enum class SplitAt { Top, Bottom };

struct Stmt {
  StmtKind kind = StmtKind::Skip;
  std::vector<std::string> targets;  // Assign
  std::vector<Expr> exprs;           // Assign
  std::vector<Stmt> body;            // Seq parts, While body
  Predicate guard;                   // While
  std::string vec;                   // partition steps; counter name for CounterIncr
  SplitAt split = SplitAt::Bottom;
  Expose expose = Expose::FromBottom;
  long amount = 0;  // CounterIncr

  bool operator==(const Stmt& o) const;
  std::string str() const;
};

Stmt skip();
// Simultaneous assignment. Throws SemanticError on duplicate targets or a
// length mismatch.
Stmt assign(std::vector<std::string> targets, std::vector<Expr> exprs);
Stmt assign(const std::string& target, Expr e);
// Sequential composition; nested sequences and skips are flattened away.
Stmt seq(std::vector<Stmt> parts);
Stmt loop(Predicate guard, Stmt body);
Stmt partition(const std::string& vec, SplitAt at);
Stmt repartition(const std::string& vec, Expose e);
Stmt merge_back(const std::string& vec, Expose e);
Stmt counter_incr(const std::string& counter, long amount);

// Variables a statement may write.
std::set<std::string> assigned_vars(const Stmt& s);

// Runs `s` in place. Loops stop with an error after `loop_cap` iterations.
void execute(const Stmt& s, State& state, long loop_cap = 100000);

}  // namespace flamesmith
