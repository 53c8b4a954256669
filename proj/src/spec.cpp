#include "flamesmith/spec.hpp"

#include "flamesmith/normalize.hpp"
#include "flamesmith/syntax.hpp"

#include <map>
#include <sstream>

namespace flamesmith {

const char* to_string(Mode m) { return m == Mode::Indexed ? "indexed" : "flame"; }

Mode parse_mode(const std::string& s) {
  if (s == "indexed") return Mode::Indexed;
  if (s == "flame") return Mode::Flame;
  throw SemanticError("unknown mode '" + s + "' (expected indexed or flame)");
}

const Decl& OperationSpec::output() const {
  for (const Decl& d : decls)
    if (d.role == Role::Output) return d;
  throw SemanticError("specification declares no output");
}

const Decl& OperationSpec::vector() const {
  for (const Decl& d : decls)
    if (d.is_vector) return d;
  throw SemanticError("specification declares no vector");
}

const Decl* OperationSpec::index() const {
  for (const Decl& d : decls)
    if (d.role == Role::Index) return &d;
  return nullptr;
}

Context OperationSpec::context() const { return Context{decls, {}}; }

std::set<std::string> OperationSpec::vectors() const {
  std::set<std::string> out;
  for (const Decl& d : decls)
    if (d.is_vector) out.insert(d.name);
  return out;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

struct Line {
  std::size_t number;
  std::size_t offset;  // column of the first character of `text`
  std::string text;
};

Decl parse_var(const Line& line, const std::string& rest) {
  auto fail = [&](const std::string& expected, const std::string& found) {
    throw ParseError(line.number, line.offset, expected, found);
  };
  auto colon = rest.find(':');
  if (colon == std::string::npos) fail("':' in variable declaration", rest);
  Decl d;
  d.name = trim(rest.substr(0, colon));
  if (!is_identifier(d.name)) fail("a variable name", d.name);
  auto comma = rest.find(',', colon);
  if (comma == std::string::npos) fail("',' followed by a role", rest.substr(colon + 1));
  std::string kind = trim(rest.substr(colon + 1, comma - colon - 1));
  std::string role = trim(rest.substr(comma + 1));
  if (kind == "scalar") {
    d.is_vector = false;
  } else if (kind.rfind("vector(", 0) == 0 && kind.back() == ')') {
    d.is_vector = true;
    d.size = trim(kind.substr(7, kind.size() - 8));
    if (!is_identifier(d.size)) fail("a size name", d.size);
  } else {
    fail("'scalar' or 'vector(<size>)'", kind);
  }
  static const std::map<std::string, Role> roles = {
      {"in", Role::Input}, {"out", Role::Output}, {"index", Role::Index}, {"aux", Role::Aux}};
  auto it = roles.find(role);
  if (it == roles.end()) fail("one of in, out, index, aux", role);
  d.role = it->second;
  return d;
}

void check_names(const Predicate& p, const OperationSpec& spec, const char* where) {
  for (const std::string& v : free_vars(p)) {
    const Decl* d = nullptr;
    for (const Decl& x : spec.decls)
      if (x.name == v) d = &x;
    if (!d) throw SemanticError(std::string("undeclared \"") + v + "\" in " + where);
    if (d->is_vector) throw SemanticError(std::string("vector \"") + v + "\" used as a scalar in " + where);
  }
}

}  // namespace

OperationSpec parse_spec(std::string_view text) {
  OperationSpec spec;
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string raw(text.substr(start, end - start));
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::size_t lead = 0;
    while (lead < raw.size() && std::isspace(static_cast<unsigned char>(raw[lead]))) ++lead;
    std::string body = trim(raw);
    if (!body.empty()) lines.push_back({number, lead + 1, body});
    start = end + 1;
  }

  std::optional<Line> pre_line, post_line;
  for (const Line& line : lines) {
    const std::string& t = line.text;
    if (t.rfind("op ", 0) == 0) {
      spec.name = trim(t.substr(3));
      if (!is_identifier(spec.name)) throw ParseError(line.number, line.offset + 3, "an operation name", spec.name);
    } else if (t.rfind("var ", 0) == 0) {
      Decl d = parse_var(line, t.substr(4));
      for (const Decl& e : spec.decls)
        if (e.name == d.name) throw SemanticError("variable \"" + d.name + "\" declared twice");
      spec.decls.push_back(d);
    } else if (t.rfind("pre:", 0) == 0) {
      pre_line = line;
    } else if (t.rfind("post:", 0) == 0) {
      post_line = line;
    } else {
      std::string word = t.substr(0, t.find(' '));
      throw ParseError(line.number, line.offset, "'op', 'var', 'pre:' or 'post:'", word);
    }
  }
  if (spec.name.empty()) throw ParseError(number, 1, "an 'op' line", "");
  if (!post_line) throw ParseError(number, 1, "a 'post:' line", "");

  // Size variables are implicit declarations.
  std::vector<Decl> sizes;
  for (const Decl& d : spec.decls) {
    if (!d.is_vector) continue;
    bool known = false;
    for (const Decl& e : spec.decls) known = known || (e.name == d.size && !e.is_vector);
    for (const Decl& e : sizes) known = known || e.name == d.size;
    if (!known) sizes.push_back(Decl{d.size, Role::Size, false, ""});
  }
  for (Decl& d : spec.decls)
    for (const Decl& v : spec.decls)
      if (v.is_vector && v.size == d.name && !d.is_vector) d.role = Role::Size;
  spec.decls.insert(spec.decls.end(), sizes.begin(), sizes.end());

  int outputs = 0, vectors = 0;
  for (const Decl& d : spec.decls) {
    if (d.role == Role::Output) {
      ++outputs;
      if (d.is_vector) throw SemanticError("output \"" + d.name + "\" must be a scalar");
    }
    if (d.is_vector) ++vectors;
  }
  if (outputs != 1) throw SemanticError(outputs == 0 ? "no output declared" : "multiple outputs declared");
  if (vectors != 1) throw SemanticError(vectors == 0 ? "no vector declared" : "more than one vector declared");

  ParseScope scope;
  scope.vectors = spec.vectors();
  if (pre_line) {
    scope.line = pre_line->number;
    scope.column = pre_line->offset + 4;
    spec.pre = parse_predicate(pre_line->text.substr(4), scope);
  }
  scope.line = post_line->number;
  scope.column = post_line->offset + 5;
  spec.post = parse_predicate(post_line->text.substr(5), scope);
  check_names(spec.pre, spec, "the precondition");
  check_names(spec.post, spec, "the postcondition");
  if (spec.post.atoms.size() != 1 || spec.post.atoms[0].rel != Rel::Eq)
    throw SemanticError("postcondition must be a single equality");
  const Atom& post = spec.post.atoms[0];
  if (!post.lhs.is_var(spec.output().name))
    throw SemanticError("postcondition must define the output \"" + spec.output().name + "\"");
  if (occurs_free(post.rhs, spec.output().name))
    throw SemanticError("postcondition mentions the output on its right-hand side");
  return spec;
}

std::string render_spec(const OperationSpec& spec) {
  std::ostringstream out;
  out << "op " << spec.name << "\n";
  for (const Decl& d : spec.decls) {
    if (d.role == Role::Size || d.role == Role::Counter || d.role == Role::Ghost) continue;
    out << "var " << d.name << " : " << (d.is_vector ? "vector(" + d.size + ")" : "scalar") << ", " << to_string(d.role)
        << "\n";
  }
  if (!spec.pre.is_true()) out << "pre: " << print(spec.pre) << "\n";
  out << "post: " << print(spec.post) << "\n";
  return out.str();
}

OperationSpec to_flame(const OperationSpec& spec) {
  static const std::map<std::string, std::string> greek = {
      {"y", "psi"}, {"x", "chi"}, {"a", "alpha"}, {"b", "beta"}, {"c", "gamma"}, {"d", "delta"}, {"t", "tau"},
  };
  const Decl& vec = spec.vector();
  OperationSpec out;
  out.name = spec.name;
  Bindings renames;
  std::set<std::string> inputs;
  for (const Decl& d : spec.decls) {
    if (d.role == Role::Index) continue;
    Decl n = d;
    if (!d.is_vector && (d.role == Role::Input || d.role == Role::Output)) {
      auto it = greek.find(d.name);
      if (it != greek.end()) n.name = it->second;
      if (n.name != d.name) renames.emplace_back(d.name, var(n.name));
      if (d.role == Role::Input) inputs.insert(d.name);
    }
    out.decls.push_back(n);
  }
  NormContext nc = spec.context().norm();
  const Atom& post = spec.post.atoms.at(0);
  Expr rhs = normalize(post.rhs, nc);
  std::optional<Expr> point;
  if (rhs.kind() == ExprKind::Poly && rhs.path().region == Region::Whole) point = rhs.point();
  for (const std::string& x : inputs) {
    if (point) break;
    Expr poly = Expr::sum("i", num(0), var(vec.size), Expr::elem({vec.name, Region::Whole}, var("i")) * pow(var(x), var("i")));
    if (equivalent(rhs, poly, nc)) point = var(x);
  }
  if (!point)
    throw DerivationError(DerivationErrorKind::UnsplittableForm, "1b",
                          "postcondition is not a polynomial over " + vec.name + ": " + print(post.rhs));
  std::string out_name = spec.output().name;
  for (const auto& [from, to] : renames)
    if (from == out_name) out_name = to.name();
  out.post = Predicate(eq(var(out_name), Expr::poly({vec.name, Region::Whole}, substitute(*point, renames))));
  for (const Atom& a : spec.pre.atoms) {
    auto fv = free_vars(a.lhs);
    for (const auto& v : free_vars(a.rhs)) fv.insert(v);
    bool size_only = vec_paths(a.lhs).empty() && vec_paths(a.rhs).empty();
    for (const std::string& v : fv) {
      const Decl* d = spec.context().find(v);
      size_only = size_only && d && d->role == Role::Size;
    }
    // A vector's length is never negative, so facts about sizes alone are
    // implicit in the partitioned view.
    if (size_only) continue;
    out.pre.atoms.push_back({a.rel, substitute(a.lhs, renames), substitute(a.rhs, renames)});
  }
  return out;
}

}  // namespace flamesmith
