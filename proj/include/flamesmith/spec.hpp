#pragma once

#include "flamesmith/predicate.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace flamesmith {

enum class Mode { Indexed, Flame };
const char* to_string(Mode m);
Mode parse_mode(const std::string& s);

// A reduction over one vector: exactly one output scalar, one traversed
// vector, and a postcondition `out = sum(...)` or `out = pi(...)`.
struct OperationSpec {
  std::string name;
  std::vector<Decl> decls;  // includes the implicit size variables
  Predicate pre;
  Predicate post;

  const Decl& output() const;
  const Decl& vector() const;
  // The loop index, if one is declared.
  const Decl* index() const;
  Context context() const;
  std::set<std::string> vectors() const;
};

// Parses a specification file. Its sums have inclusive upper bounds; they are stored
// exclusive. Throws ParseError or SemanticError.
OperationSpec parse_spec(std::string_view text);

// Renders back to the DSL; parse_spec(render_spec(s)) equals s.
std::string render_spec(const OperationSpec& spec);

// Index-free restatement: the output and input scalars take Greek names, the
// postcondition becomes `out = pi(a, chi)`, the loop index is dropped, and
// preconditions on the size alone become true.
OperationSpec to_flame(const OperationSpec& spec);

}  // namespace flamesmith
