#pragma once

#include "flamesmith/worksheet.hpp"

#include <string>

namespace flamesmith {

enum class Format { Text, Latex, Markdown };
Format parse_format(const std::string& s);

// The worksheet laid out as an annotated algorithm: assertions in braces,
// commands indented inside the loop, each line tagged with its step, and a
// cost column when the worksheet is instrumented. LaTeX output is a complete
// document.
std::string render(const Worksheet& w, Format f);

}  // namespace flamesmith
