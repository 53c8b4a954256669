#include "flamesmith/render.hpp"

#include "flamesmith/syntax.hpp"
#include "flamesmith/wp.hpp"

#include <sstream>

namespace flamesmith {

Format parse_format(const std::string& s) {
  if (s == "text") return Format::Text;
  if (s == "latex") return Format::Latex;
  if (s == "markdown") return Format::Markdown;
  throw SemanticError("unknown format '" + s + "' (expected text, latex or markdown)");
}

namespace {

struct Row {
  std::string step;
  int depth = 0;
  std::string text;
  std::string cost;
};

std::size_t display_width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

class Layout {
 public:
  Layout(const Worksheet& w, Style style) : w_(w), style_(style) {}

  std::vector<Row> rows() {
    if (w_.mode == Mode::Flame)
      flame();
    else
      indexed();
    return rows_;
  }

 private:
  std::string assertion(const Predicate& p) const {
    std::string body = print(p, style_);
    return style_ == Style::Latex ? "$\\{\\; " + body + " \\;\\}$" : "{ " + body + " }";
  }
  std::string command(const Stmt& s) const {
    std::string body = print(s, style_);
    return style_ == Style::Latex ? "$" + body + "$" : body;
  }
  std::string keyword(const std::string& k) const { return style_ == Style::Latex ? "\\textbf{" + k + "}" : k; }
  std::string note(const std::string& n) const {
    return style_ == Style::Latex ? "\\quad\\textit{(" + n + ")}" : "  (" + n + ")";
  }

  std::string cost_assertion(const std::optional<Predicate>& p) const {
    return p ? assertion(*p) : std::string();
  }
  std::optional<Predicate> cost_inv() const {
    if (!w_.cost) return std::nullopt;
    return w_.cost->invariant;
  }

  void add(std::string step, int depth, std::string text, std::string cost = "") {
    rows_.push_back({std::move(step), depth, std::move(text), std::move(cost)});
  }

  std::string guard() const { return w_.guard ? print(*w_.guard, style_) : "?"; }
  std::string math(const std::string& s) const { return style_ == Style::Latex ? "$" + s + "$" : s; }

  std::string counter_init() const {
    return w_.cost ? command(assign(w_.cost->counter, num(0))) : std::string();
  }
  std::string counter_step() const {
    return w_.cost ? command(counter_incr(w_.cost->counter, w_.cost->increment)) : std::string();
  }
  std::string total() const {
    if (!w_.cost) return "";
    return assertion(Predicate(eq(var(w_.cost->counter), w_.cost->total)));
  }
  Predicate inv() const { return w_.invariant.value_or(Predicate()); }

  void loop_top() {
    add("2", 0, assertion(inv()), cost_assertion(cost_inv()));
    add("3", 0, keyword("while") + " " + math(guard()) + " " + keyword("do"));
    Predicate g = w_.guard ? Predicate(*w_.guard) : Predicate();
    add("2∧3", 1, assertion(inv() && g), cost_assertion(cost_inv()));
  }
  void loop_bottom() {
    add("2", 1, assertion(inv()), cost_assertion(cost_inv()));
    add("", 0, keyword("endwhile"));
    Predicate ng = w_.guard ? Predicate(negate(*w_.guard)) : Predicate();
    add("2∧¬3", 0, assertion(inv() && ng), cost_assertion(cost_inv()));
    add("1b", 0, assertion(w_.post), total());
  }

  void indexed() {
    NormContext nc = w_.norm();
    std::optional<Predicate> cost6, cost7;
    if (w_.cost && w_.advance) {
      cost6 = wp(*w_.advance, w_.cost->invariant, nc);
      cost7 = wp(counter_incr(w_.cost->counter, w_.cost->increment), *cost6, nc);
    }
    add("1a", 0, assertion(w_.pre));
    if (w_.init_wp) add("4a", 0, assertion(*w_.init_wp));
    if (w_.init) add("4b", 0, command(*w_.init), counter_init());
    loop_top();
    if (w_.step7) add("7", 1, assertion(*w_.step7), cost_assertion(cost7));
    if (w_.update) add("8", 1, command(*w_.update), counter_step());
    if (w_.step6) add("6", 1, assertion(*w_.step6), cost_assertion(cost6));
    if (w_.advance) add("5", 1, command(*w_.advance));
    loop_bottom();
  }

  void flame() {
    NormContext nc = w_.norm();
    std::optional<Predicate> cost6, cost7;
    if (w_.cost && w_.advance && w_.merge) {
      cost6 = after_repartition(w_.cost->invariant, w_.advance->vec, w_.advance->expose, nc);
      cost7 = wp(*w_.merge, w_.cost->invariant, nc);
    }
    add("1a", 0, assertion(w_.pre));
    if (w_.init_wp) add("4a", 0, assertion(*w_.init_wp));
    if (w_.init) {
      std::string fact;
      if (w_.init_fact) fact = note("where " + math(print(*w_.init_fact, style_)));
      add("4b", 0, command(*w_.init) + fact, counter_init());
    }
    loop_top();
    if (w_.advance) {
      const std::string alpha = style_ == Style::Latex ? "$\\alpha_1$" : display_name("alpha", style_) + "_1";
      add("5a", 1, command(*w_.advance) + note("where " + alpha + " has 1 row"));
    }
    if (w_.step6) add("6", 1, assertion(*w_.step6), cost_assertion(cost6));
    if (w_.update) add("8", 1, command(*w_.update), counter_step());
    if (w_.step7) add("7", 1, assertion(*w_.step7), cost_assertion(cost7));
    if (w_.merge) add("5b", 1, keyword("continue with") + " " + command(*w_.merge));
    loop_bottom();
  }

  const Worksheet& w_;
  Style style_;
  std::vector<Row> rows_;
};

std::string title(const Worksheet& w) {
  return w.op + ", invariant " + std::to_string(w.invariant_id) + " (" + to_string(w.mode) + ", " +
         to_string(w.direction) + ")";
}

std::string obligation_line(const Obligation& o) {
  std::string line = o.name + ": " + describe(o.verdict);
  if (o.verdict.counterexample) line += " at " + describe(*o.verdict.counterexample);
  return line;
}

std::string render_text(const Worksheet& w) {
  std::vector<Row> rows = Layout(w, Style::Text).rows();
  std::size_t step_w = 4, text_w = 0;
  for (const Row& r : rows) {
    step_w = std::max(step_w, display_width(r.step));
    text_w = std::max(text_w, 2 * r.depth + display_width(r.text));
  }
  std::ostringstream out;
  out << "Worksheet: " << title(w) << "\n\n";
  auto pad = [](const std::string& s, std::size_t width) {
    std::size_t n = display_width(s);
    return s + std::string(width > n ? width - n : 0, ' ');
  };
  bool costed = w.cost.has_value();
  out << pad("Step", step_w) << "  " << (costed ? pad("Algorithm", text_w) + "  Cost" : std::string("Algorithm")) << "\n";
  for (const Row& r : rows) {
    std::string text = std::string(2 * r.depth, ' ') + r.text;
    std::string line = pad(r.step, step_w) + "  " + (costed && !r.cost.empty() ? pad(text, text_w) + "  " + r.cost : text);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << "\n";
  }
  if (!w.notes.empty()) {
    out << "\nNotes:\n";
    for (const std::string& n : w.notes) out << "  - " << n << "\n";
  }
  if (!w.obligations.empty()) {
    out << "\nObligations:\n";
    for (const Obligation& o : w.obligations) out << "  " << obligation_line(o) << "\n";
  }
  return out.str();
}

std::string render_markdown(const Worksheet& w) {
  std::vector<Row> rows = Layout(w, Style::Text).rows();
  bool costed = w.cost.has_value();
  std::ostringstream out;
  out << "## Worksheet: " << title(w) << "\n\n";
  out << (costed ? "| Step | Algorithm | Cost |\n|---|---|---|\n" : "| Step | Algorithm |\n|---|---|\n");
  auto cell = [](std::string s) {
    std::string out;
    for (char c : s) out += c == '|' ? std::string("\\|") : std::string(1, c);
    return out;
  };
  for (const Row& r : rows) {
    std::string indent;
    for (int i = 0; i < r.depth; ++i) indent += "&emsp;";
    out << "| " << cell(r.step) << " | " << indent << cell(r.text) << " |";
    if (costed) out << " " << cell(r.cost) << " |";
    out << "\n";
  }
  if (!w.notes.empty()) {
    out << "\n**Notes**\n\n";
    for (const std::string& n : w.notes) out << "- " << n << "\n";
  }
  if (!w.obligations.empty()) {
    out << "\n**Obligations**\n\n";
    for (const Obligation& o : w.obligations) out << "- " << obligation_line(o) << "\n";
  }
  return out.str();
}

std::string latex_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '_': out += "\\_"; break;
      case '&': out += "\\&"; break;
      case '%': out += "\\%"; break;
      case '$': out += "\\$"; break;
      case '#': out += "\\#"; break;
      case '{': out += "\\{"; break;
      case '}': out += "\\}"; break;
      case '^': out += "\\^{}"; break;
      case '~': out += "\\~{}"; break;
      case '\\': out += "\\textbackslash{}"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_latex(const Worksheet& w) {
  std::vector<Row> rows = Layout(w, Style::Latex).rows();
  bool costed = w.cost.has_value();
  std::ostringstream out;
  out << "\\documentclass{article}\n"
      << "\\usepackage[margin=1.5cm,landscape]{geometry}\n"
      << "\\usepackage{amsmath,amssymb}\n"
      << "\\begin{document}\n"
      << "\\section*{Worksheet: " << latex_escape(title(w)) << "}\n"
      << "\\begin{tabular}{l" << (costed ? "ll" : "l") << "}\n"
      << "Step & Algorithm" << (costed ? " & Cost" : "") << " \\\\\n\\hline\n";
  for (const Row& r : rows) {
    std::string step = r.step == "2∧3" ? "$2 \\wedge 3$" : r.step == "2∧¬3" ? "$2 \\wedge \\neg 3$" : r.step;
    std::string indent;
    for (int i = 0; i < r.depth; ++i) indent += "\\quad ";
    out << step << " & " << indent << r.text;
    if (costed) out << " & " << r.cost;
    out << " \\\\\n";
  }
  out << "\\end{tabular}\n";
  if (!w.notes.empty()) {
    out << "\n\\subsection*{Notes}\n\\begin{itemize}\n";
    for (const std::string& n : w.notes) out << "\\item " << latex_escape(n) << "\n";
    out << "\\end{itemize}\n";
  }
  if (!w.obligations.empty()) {
    out << "\n\\subsection*{Obligations}\n\\begin{itemize}\n";
    for (const Obligation& o : w.obligations) out << "\\item " << latex_escape(obligation_line(o)) << "\n";
    out << "\\end{itemize}\n";
  }
  out << "\\end{document}\n";
  return out.str();
}

}  // namespace

std::string render(const Worksheet& w, Format f) {
  switch (f) {
    case Format::Text: return render_text(w);
    case Format::Latex: return render_latex(w);
    case Format::Markdown: return render_markdown(w);
  }
  return "";
}

}  // namespace flamesmith
