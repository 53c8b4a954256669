#pragma once

#include "flamesmith/predicate.hpp"
#include "flamesmith/stmt.hpp"

#include <string>

namespace flamesmith {

// Weakest precondition of a loop-free statement, normalized after every
// primitive step. Throws DerivationError(UnsupportedStatement) on a loop.
Predicate wp(const Stmt& s, const Predicate& r, const NormContext& ctx = {});

// Rewrites an assertion about the two-way split of `vec` into the same
// assertion about the three-way split just after a repartition. This is the
// forward direction used at the top of a loop body.
Predicate after_repartition(const Predicate& p, const std::string& vec, Expose e, const NormContext& ctx = {});

// r with a fresh hole substituted for `target`. The hole is named `hole`.
// Throws DerivationError(TargetAbsent) when target is not free in r.
Predicate wp_symbolic_assign(const std::string& target, const Predicate& r, const std::string& hole = "$E",
                             const NormContext& ctx = {});

// Samples states satisfying `pre`, runs `s`, and checks `post`. Throws
// DerivationError(VacuousPrecondition) when no state satisfies `pre` within
// 100 * trials draws.
Verdict hoare_test(const Predicate& pre, const Stmt& s, const Predicate& post, const Context& ctx,
                   const CheckOptions& opts = {});

}  // namespace flamesmith
