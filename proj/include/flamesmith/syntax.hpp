#pragma once

#include "flamesmith/expr.hpp"
#include "flamesmith/predicate.hpp"
#include "flamesmith/stmt.hpp"

#include <set>
#include <string>
#include <string_view>

namespace flamesmith {

// File: the ASCII syntax of spec and worksheet files (reparseable).
// Text: Unicode, math-style sums and Greek names.
// Latex: math-mode LaTeX.
enum class Style { File, Text, Latex };

std::string print(const Expr& e, Style style = Style::File);
std::string print(const Atom& a, Style style = Style::File);
std::string print(const Predicate& p, Style style = Style::File);
std::string print(const Stmt& s, Style style = Style::File);

// Display name of a variable ("psi" -> "ψ", "$E0" -> "ℰ_0").
std::string display_name(const std::string& name, Style style);

// Parsing needs to know which identifiers are vectors so that `a_T`, `a_1`
// and `a[i]` resolve to regions and elements. `line` is used in error
// positions when the text is one line of a larger file.
struct ParseScope {
  std::set<std::string> vectors;
  std::size_t line = 1;
  std::size_t column = 1;
};

Expr parse_expr(std::string_view text, const ParseScope& scope);
Predicate parse_predicate(std::string_view text, const ParseScope& scope);
Stmt parse_stmt(std::string_view text, const ParseScope& scope);

}  // namespace flamesmith
