#pragma once

#include "flamesmith/invariants.hpp"
#include "flamesmith/stmt.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flamesmith {

enum class Provenance { Given, Derived };

// The operation counter of an instrumented worksheet.
struct CostBlock {
  std::string counter = "C";
  long increment = 0;
  Predicate invariant;  // C = c * progress
  Expr total;           // cost at exit, in terms of the vector size
};

// A proof obligation: antecedent implies consequent.
struct Obligation {
  std::string name;  // base, step, exit, descent
  Predicate antecedent;
  Predicate consequent;
  Verdict verdict;
};

// The eight-step worksheet. Slot ids: 1a pre, 1b post, 2 invariant, 3 guard,
// 4a wp of the initialization with holes, 4b initialization, 4c partition fact
// (FLAME), 5 index update (indexed) or 5a repartition and 5b merge (FLAME),
// 6 state after indexing, 7 state the update must establish, 8 update.
struct Worksheet {
  Mode mode = Mode::Indexed;
  std::string op;
  int invariant_id = 0;
  Direction direction = Direction::LastToFirst;
  std::vector<Decl> decls;

  Predicate pre;   // 1a
  Predicate post;  // 1b
  std::optional<Predicate> invariant;  // 2
  std::optional<Atom> guard;           // 3
  std::optional<Predicate> init_wp;    // 4a
  std::optional<Stmt> init;            // 4b
  std::optional<Predicate> init_fact;  // 4c
  std::optional<Stmt> advance;         // 5 / 5a
  std::optional<Stmt> merge;           // 5b
  std::optional<Predicate> step6;
  std::optional<Predicate> step7;
  std::optional<Stmt> update;  // 8

  std::map<std::string, Provenance> provenance;
  std::vector<std::string> notes;
  std::optional<CostBlock> cost;
  std::vector<Obligation> obligations;

  // Slots a complete worksheet of this mode must have.
  std::vector<std::string> required_slots() const;
  std::vector<std::string> missing_slots() const;
  bool filled() const { return missing_slots().empty(); }
  bool complete() const;

  const Decl& vector() const;
  const Decl& output() const;
  Context context() const;
  NormContext norm() const { return context().norm(); }

  // The pieces with the counter folded in when the worksheet is instrumented.
  Predicate full_invariant() const;
  Stmt full_init() const;
  Stmt body() const;
  Stmt program() const;
};

// Fills every step of the worksheet for one candidate, then verifies it.
// Throws SemanticError for an unknown or rejected candidate and
// DerivationError naming the step that failed.
Worksheet derive(const OperationSpec& spec, int invariant_id, Mode mode, const CheckOptions& opts = {});

struct InitResult {
  Predicate init_wp;
  Stmt init;
  std::optional<Predicate> fact;
};
InitResult derive_init(const ModeSpec& ms, const InvariantCandidate& c, const Predicate& pre,
                       const CheckOptions& opts = {});

struct Traversal {
  Stmt advance;
  std::optional<Stmt> merge;
};
Traversal derive_traversal(const ModeSpec& ms, const InvariantCandidate& c);

struct UpdateResult {
  Predicate step6;
  Predicate step7;
  Stmt update;
  std::vector<std::string> templates;  // one per target
  std::vector<std::string> divisors;   // input scalars the update divides by
};
// Solves Step 7's holes by rewriting with the equalities known before the
// update, then matches the result against the update templates.
// Throws DerivationError(NoTemplateMatch).
UpdateResult derive_update(const ModeSpec& ms, const InvariantCandidate& c, const Atom& guard,
                           const Traversal& traversal, const CheckOptions& opts = {});

// The four obligations: base, step, exit and descent. Throws
// DerivationError(IncompleteWorksheet) when a slot they need is empty.
std::vector<Obligation> verify(const Worksheet& w, const CheckOptions& opts = {});

// Versioned text format; parse_worksheet(write_worksheet(w)) == w up to
// obligation details.
std::string write_worksheet(const Worksheet& w);
Worksheet parse_worksheet(std::string_view text);

}  // namespace flamesmith
