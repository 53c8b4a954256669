#include "flamesmith/syntax.hpp"
#include "flamesmith/worksheet.hpp"

#include <sstream>

namespace flamesmith {

namespace {

const char* kHeader = "flamesmith-worksheet 1";

std::string decl_line(const Decl& d) {
  return "var " + d.name + " : " + (d.is_vector ? "vector(" + d.size + ")" : std::string("scalar")) + ", " +
         to_string(d.role);
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string write_worksheet(const Worksheet& w) {
  std::ostringstream out;
  out << kHeader << "\n";
  out << "op " << w.op << "\n";
  out << "mode " << to_string(w.mode) << "\n";
  out << "invariant " << w.invariant_id << "\n";
  out << "direction " << to_string(w.direction) << "\n";
  for (const Decl& d : w.decls) out << decl_line(d) << "\n";
  for (const std::string& n : w.notes) out << "note " << n << "\n";
  auto slot = [&](const std::string& id, const std::string& text) {
    auto it = w.provenance.find(id);
    bool given = it != w.provenance.end() && it->second == Provenance::Given;
    out << "slot " << id << " " << (given ? "given" : "derived") << ": " << text << "\n";
  };
  slot("1a", print(w.pre));
  slot("1b", print(w.post));
  if (w.invariant) slot("2", print(*w.invariant));
  if (w.guard) slot("3", print(*w.guard));
  if (w.init_wp) slot("4a", print(*w.init_wp));
  if (w.init) slot("4b", print(*w.init));
  if (w.init_fact) slot("4c", print(*w.init_fact));
  if (w.advance) slot(w.mode == Mode::Flame ? "5a" : "5", print(*w.advance));
  if (w.merge) slot("5b", print(*w.merge));
  if (w.step6) slot("6", print(*w.step6));
  if (w.step7) slot("7", print(*w.step7));
  if (w.update) slot("8", print(*w.update));
  if (w.cost) {
    out << "cost counter " << w.cost->counter << "\n";
    out << "cost increment " << w.cost->increment << "\n";
    out << "cost invariant " << print(w.cost->invariant) << "\n";
    out << "cost total " << print(w.cost->total) << "\n";
  }
  for (const Obligation& o : w.obligations)
    out << "obligation " << o.name << " " << to_string(o.verdict.kind) << " " << o.verdict.tier << "\n";
  out << "end\n";
  return out.str();
}

Worksheet parse_worksheet(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::size_t number = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string line = trim(text.substr(start, end - start));
    if (!line.empty() && line[0] != '#') lines.emplace_back(number, line);
    start = end + 1;
  }
  if (lines.empty() || lines.front().second != kHeader)
    throw ParseError(lines.empty() ? 1 : lines.front().first, 1, std::string("'") + kHeader + "'",
                     lines.empty() ? "" : lines.front().second);

  Worksheet w;
  bool ended = false;
  ParseScope scope;
  struct PendingSlot {
    std::size_t line;
    std::string id;
    std::string text;
    std::size_t column;
  };
  std::vector<PendingSlot> slots;
  std::vector<std::pair<std::size_t, std::string>> cost_lines;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [ln, t] = lines[li];
    if (ended) throw ParseError(ln, 1, "nothing after 'end'", t);
    std::string word = t.substr(0, t.find(' '));
    std::string rest = t.size() > word.size() ? trim(t.substr(word.size())) : "";
    if (word == "end") {
      ended = true;
    } else if (word == "op") {
      w.op = rest;
    } else if (word == "mode") {
      try {
        w.mode = parse_mode(rest);
      } catch (const SemanticError&) {
        throw ParseError(ln, 6, "indexed or flame", rest);
      }
    } else if (word == "invariant") {
      try {
        w.invariant_id = std::stoi(rest);
      } catch (const std::exception&) {
        throw ParseError(ln, 11, "an invariant number", rest);
      }
    } else if (word == "direction") {
      if (rest == "first-to-last")
        w.direction = Direction::FirstToLast;
      else if (rest == "last-to-first")
        w.direction = Direction::LastToFirst;
      else
        throw ParseError(ln, 11, "first-to-last or last-to-first", rest);
    } else if (word == "var") {
      auto colon = rest.find(':');
      auto comma = rest.find(',', colon == std::string::npos ? 0 : colon);
      if (colon == std::string::npos || comma == std::string::npos)
        throw ParseError(ln, 5, "'<name> : <kind>, <role>'", rest);
      Decl d;
      d.name = trim(rest.substr(0, colon));
      std::string kind = trim(rest.substr(colon + 1, comma - colon - 1));
      std::string role = trim(rest.substr(comma + 1));
      if (kind.rfind("vector(", 0) == 0 && kind.back() == ')') {
        d.is_vector = true;
        d.size = trim(kind.substr(7, kind.size() - 8));
        scope.vectors.insert(d.name);
      } else if (kind != "scalar") {
        throw ParseError(ln, 5 + colon + 2, "'scalar' or 'vector(<size>)'", kind);
      }
      bool known = false;
      for (Role r : {Role::Input, Role::Output, Role::Index, Role::Aux, Role::Counter, Role::Size, Role::Ghost})
        if (role == to_string(r)) {
          d.role = r;
          known = true;
        }
      if (!known) throw ParseError(ln, 5 + comma + 2, "a role", role);
      w.decls.push_back(d);
    } else if (word == "note") {
      w.notes.push_back(rest);
    } else if (word == "slot") {
      auto sp = rest.find(' ');
      auto colon = rest.find(':');
      if (sp == std::string::npos || colon == std::string::npos || colon < sp)
        throw ParseError(ln, 6, "'<id> given|derived: <text>'", rest);
      std::string id = rest.substr(0, sp);
      std::string prov = trim(rest.substr(sp + 1, colon - sp - 1));
      if (prov != "given" && prov != "derived") throw ParseError(ln, 6 + sp + 1, "given or derived", prov);
      w.provenance[id] = prov == "given" ? Provenance::Given : Provenance::Derived;
      std::size_t offset = t.find(':') + 1;
      slots.push_back({ln, id, t.substr(offset), offset + 1});
    } else if (word == "cost") {
      cost_lines.emplace_back(ln, rest);
    } else if (word == "obligation") {
      std::istringstream in(rest);
      Obligation o;
      std::string kind;
      in >> o.name >> kind >> o.verdict.tier;
      bool known = false;
      for (VerdictKind k : {VerdictKind::Proved, VerdictKind::Tested, VerdictKind::Falsified, VerdictKind::Unknown})
        if (kind == to_string(k)) {
          o.verdict.kind = k;
          known = true;
        }
      if (!known) throw ParseError(ln, 12, "a verdict", kind);
      w.obligations.push_back(o);
    } else {
      throw ParseError(ln, 1, "a worksheet line", word);
    }
  }
  if (!ended) throw ParseError(number, 1, "'end'", "");

  for (const PendingSlot& s : slots) {
    ParseScope sc = scope;
    sc.line = s.line;
    sc.column = s.column;
    const std::string& id = s.id;
    if (id == "1a") w.pre = parse_predicate(s.text, sc);
    else if (id == "1b") w.post = parse_predicate(s.text, sc);
    else if (id == "2") w.invariant = parse_predicate(s.text, sc);
    else if (id == "3") {
      Predicate g = parse_predicate(s.text, sc);
      if (g.atoms.size() != 1) throw ParseError(s.line, s.column, "a single comparison as the guard", trim(s.text));
      w.guard = g.atoms[0];
    } else if (id == "4a") w.init_wp = parse_predicate(s.text, sc);
    else if (id == "4b") w.init = parse_stmt(s.text, sc);
    else if (id == "4c") w.init_fact = parse_predicate(s.text, sc);
    else if (id == "5" || id == "5a") w.advance = parse_stmt(s.text, sc);
    else if (id == "5b") w.merge = parse_stmt(s.text, sc);
    else if (id == "6") w.step6 = parse_predicate(s.text, sc);
    else if (id == "7") w.step7 = parse_predicate(s.text, sc);
    else if (id == "8") w.update = parse_stmt(s.text, sc);
    else throw ParseError(s.line, 6, "a slot id", id);
  }

  if (!cost_lines.empty()) {
    CostBlock cb;
    for (const auto& [ln, rest] : cost_lines) {
      std::string key = rest.substr(0, rest.find(' '));
      std::string value = rest.size() > key.size() ? trim(rest.substr(key.size())) : "";
      ParseScope sc = scope;
      sc.line = ln;
      if (key == "counter") {
        cb.counter = value;
      } else if (key == "increment") {
        try {
          cb.increment = std::stol(value);
        } catch (const std::exception&) {
          throw ParseError(ln, 16, "an integer increment", value);
        }
      } else if (key == "invariant") {
        cb.invariant = parse_predicate(value, sc);
      } else if (key == "total") {
        cb.total = parse_expr(value, sc);
      } else {
        throw ParseError(ln, 6, "counter, increment, invariant or total", key);
      }
    }
    bool declared = false;
    for (const Decl& d : w.decls) declared = declared || d.name == cb.counter;
    if (!declared) w.decls.push_back(Decl{cb.counter, Role::Counter, false, ""});
    w.cost = cb;
  }

  std::set<std::string> names;
  for (const Decl& d : w.decls) names.insert(d.name);
  auto check = [&](const Predicate& p, const std::string& where) {
    for (const std::string& v : free_vars(p))
      if (!names.count(v) && v.rfind('$', 0) != 0)
        throw SemanticError("undeclared \"" + v + "\" in slot " + where);
  };
  check(w.pre, "1a");
  check(w.post, "1b");
  if (w.invariant) check(*w.invariant, "2");
  if (w.guard) check(Predicate(*w.guard), "3");
  return w;
}

}  // namespace flamesmith
