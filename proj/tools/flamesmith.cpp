#include "flamesmith/cost.hpp"
#include "flamesmith/interpreter.hpp"
#include "flamesmith/invariants.hpp"
#include "flamesmith/render.hpp"
#include "flamesmith/syntax.hpp"
#include "flamesmith/worksheet.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace flamesmith;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kFalsified = 1;
constexpr int kInputError = 2;
constexpr int kDerivationFailure = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SemanticError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OperationSpec load_spec(const std::string& path) { return parse_spec(read_file(path)); }

Worksheet load_worksheet(const std::string& path) { return parse_worksheet(read_file(path)); }

std::vector<Mode> modes_for(const std::string& mode) {
  if (mode == "both") return {Mode::Indexed, Mode::Flame};
  return {parse_mode(mode)};
}

Rational parse_rational(const std::string& s) {
  std::string t = s;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
  Rational r;
  if (t.empty() || r.set_str(t, 10) != 0) throw SemanticError("not a number: '" + s + "'");
  r.canonicalize();
  return r;
}

std::vector<Rational> parse_coeffs(const std::string& s) {
  std::vector<Rational> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  return out;
}

std::string pad(const std::string& s, std::size_t width) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return s + std::string(width > n ? width - n : 0, ' ');
}

// True when the postcondition is the polynomial sum a_i x^i over the whole
// vector, so the oracle applies.
bool polynomial_post(const Worksheet& w) {
  if (w.post.atoms.size() != 1 || w.post.atoms[0].rel != Rel::Eq) return false;
  const Expr& rhs = w.post.atoms[0].rhs;
  const Decl& v = w.vector();
  for (const Decl& d : w.decls) {
    if (d.role != Role::Input || d.is_vector) continue;
    if (equivalent(rhs, Expr::poly({v.name, Region::Whole}, var(d.name)), w.norm())) return true;
    Expr sum = Expr::sum("i", num(0), var(v.size), elem(v.name, var("i")) * pow(var(d.name), var("i")));
    if (equivalent(rhs, sum, w.norm())) return true;
  }
  return false;
}

std::string state_line(const Worksheet& w, const State& s) {
  std::string out;
  for (const Decl& d : w.decls) {
    if (d.is_vector || d.role == Role::Input || d.role == Role::Size || d.role == Role::Ghost) continue;
    auto it = s.scalars.find(d.name);
    if (it == s.scalars.end()) continue;
    out += (out.empty() ? "" : ", ") + d.name + " = " + to_string(it->second);
  }
  for (const auto& [vec, c] : s.cursors) out += (out.empty() ? "" : ", ") + std::string("m(") + vec + "_T) = " +
                                              std::to_string(c.split);
  return out;
}

int cmd_invariants(const std::string& path, const std::string& mode, const CheckOptions& opts) {
  OperationSpec spec = load_spec(path);
  for (Mode m : modes_for(mode)) {
    ModeSpec ms = mode_spec(spec, m);
    SplitIdentity split = split_postcondition(ms, opts.seed);
    std::cout << "Invariant candidates for " << spec.name << " (" << to_string(m) << ")\n";
    std::cout << "split: " << print(split.output, Style::Text) << " = " << print(split.split, Style::Text);
    if (!split.range.is_true()) std::cout << " ∧ " << print(split.range, Style::Text);
    std::cout << "\n";
    for (const InvariantCandidate& c : enumerate_invariants(ms, opts)) {
      std::cout << pad(std::to_string(c.id), 3) << pad(c.valid ? "valid" : "rejected", 10) << pad(to_string(c.direction), 15)
                << print(c.predicate, Style::Text) << "\n";
      std::cout << "   selection: " << c.label << "\n";
      for (const auto& [name, def] : c.auxiliaries)
        std::cout << "   auxiliary: " << name << " = " << print(def, Style::Text) << "\n";
      for (const std::string& n : c.notes) std::cout << "   note: " << n << "\n";
      if (!c.valid) std::cout << "   reason: " << c.reason << "\n";
    }
  }
  return kOk;
}

int verdict_exit(const std::vector<Obligation>& obs) {
  for (const Obligation& o : obs)
    if (o.verdict.kind == VerdictKind::Falsified) return kFalsified;
  return kOk;
}

int cmd_derive(const std::string& path, int id, const std::string& mode, const std::string& out_path, bool with_cost,
               const CheckOptions& opts) {
  OperationSpec spec = load_spec(path);
  Worksheet w = derive(spec, id, parse_mode(mode), opts);
  if (with_cost) {
    w = instrument(w);
    w.obligations = verify(w, opts);
  }
  std::string text = write_worksheet(w);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw SemanticError("cannot write " + out_path);
    out << text;
    std::cout << "wrote " << out_path << "\n";
    std::cout << "guard: " << print(*w.guard, Style::Text) << "\n";
    std::cout << "init: " << print(*w.init, Style::Text) << "\n";
    std::cout << "update: " << print(*w.update, Style::Text) << "\n";
  }
  return verdict_exit(w.obligations);
}

void print_obligation(const Obligation& o) {
  std::cout << pad(o.name, 9) << describe(o.verdict) << "\n";
  if (o.verdict.kind == VerdictKind::Falsified) {
    std::cout << "  antecedent: " << print(o.antecedent) << "\n";
    std::cout << "  consequent: " << print(o.consequent) << "\n";
    if (o.verdict.counterexample) std::cout << "  counterexample: " << describe(*o.verdict.counterexample) << "\n";
    if (!o.verdict.detail.empty()) std::cout << "  " << o.verdict.detail << "\n";
  } else if (o.verdict.kind == VerdictKind::Unknown && !o.verdict.detail.empty()) {
    std::cout << "  " << o.verdict.detail << "\n";
  }
}

int cmd_verify(const std::string& path, const CheckOptions& opts) {
  Worksheet w = load_worksheet(path);
  std::vector<Obligation> obs = verify(w, opts);
  std::cout << "Obligations for " << w.op << ", invariant " << w.invariant_id << " (" << to_string(w.mode) << ")\n";
  for (const Obligation& o : obs) print_obligation(o);
  int code = verdict_exit(obs);
  std::cout << (code == kOk ? "all obligations hold" : "falsified") << "\n";
  return code;
}

int cmd_run(const std::string& path, const std::string& coeffs, const std::string& x, bool check, bool trace) {
  Worksheet w = load_worksheet(path);
  std::vector<Rational> a = parse_coeffs(coeffs);
  Rational point = parse_rational(x);
  RunResult r = run(w, make_input(w, a, point), check);
  const std::string& out = w.output().name;
  Rational y = r.final.scalars.at(out);
  if (trace) {
    for (std::size_t i = 0; i < r.trace.size(); ++i)
      std::cout << "iteration " << i << ": " << state_line(w, r.trace[i]) << "\n";
  }
  std::cout << out << " = " << to_string(y) << "\n";
  std::cout << "iterations: " << r.iterations << "\n";
  if (check) std::cout << "invariant checks: passed\n";
  if (polynomial_post(w)) {
    Rational expected = oracle(a, point);
    std::cout << "oracle: " << to_string(expected) << (expected == y ? " (agrees)" : " (MISMATCH)") << "\n";
    if (expected != y) return kFalsified;
  }
  return kOk;
}

int cmd_cost(const std::string& path, long max_n, const CheckOptions& opts) {
  Worksheet w = load_worksheet(path);
  CostReport r = prove_cost(w, max_n, opts);
  Worksheet iw = instrument(w);
  std::cout << "Cost of " << w.op << ", invariant " << w.invariant_id << " (" << to_string(w.mode) << ")\n";
  std::cout << "update: " << print(*w.update) << "\n";
  std::cout << "increment: " << to_string(r.recurrence.increment) << " flops per iteration\n";
  std::cout << "recurrence: " << r.counter << "_0 = " << to_string(r.recurrence.initial) << ", " << r.counter
            << "_{k+1} = " << r.counter << "_k + " << to_string(r.recurrence.increment) << "\n";
  std::cout << "closed form: " << r.counter << "_k = " << print(r.closed_form) << "\n";
  std::cout << "progress: k = " << print(progress(iw)) << "\n";
  std::cout << "cost invariant: " << print(r.cost_invariant) << "\n";
  std::cout << "total: " << print(r.total) << "\n";
  for (const Obligation& o : r.verification) std::cout << "obligation " << pad(o.name, 9) << describe(o.verdict) << "\n";
  std::cout << "measured:\n";
  std::cout << "  " << pad("n", 5) << pad(r.counter, 8) << "expected\n";
  const Decl& v = iw.vector();
  for (const auto& [n, c] : r.runtime_counts) {
    State sizes;
    sizes.scalars[v.size] = Rational(n);
    sizes.vectors[v.name] = std::vector<Rational>(static_cast<std::size_t>(n));
    std::cout << "  " << pad(std::to_string(n), 5) << pad(to_string(c), 8) << to_string(evaluate(r.total, sizes)) << "\n";
  }
  if (!r.mismatches.empty()) {
    std::cout << r.mismatches.size() << " measurements disagree with the total\n";
    return kFalsified;
  }
  std::cout << "all " << r.runtime_counts.size() << " measurements agree with the total\n";
  return kOk;
}

int cmd_render(const std::string& path, const std::string& format) {
  Worksheet w = load_worksheet(path);
  std::cout << render(w, parse_format(format));
  return kOk;
}

struct Input {
  std::vector<Rational> a;
  Rational x;
};

// Inputs for one algorithm, drawn from a fixed sequence and filtered by its
// precondition.
std::vector<Input> sample_inputs(const Worksheet& w, long count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
  std::vector<Input> out;
  for (long draws = 0; static_cast<long>(out.size()) < count && draws < 100 * count; ++draws) {
    Input in;
    long n = uniform(0, 8);
    for (long i = 0; i < n; ++i) in.a.emplace_back(uniform(-5, 5));
    in.x = uniform(-3, 3);
    if (evaluate(w.pre, make_input(w, in.a, in.x)) == Truth::True) out.push_back(std::move(in));
  }
  return out;
}

int cmd_derive_all(const std::string& path, const std::string& mode, long inputs, const CheckOptions& opts) {
  OperationSpec spec = load_spec(path);
  int code = kOk;
  std::cout << pad("mode", 9) << pad("id", 4) << pad("guard", 16) << pad("update", 40) << pad("cost", 14)
            << "oracle\n";
  for (Mode m : modes_for(mode)) {
    ModeSpec ms = mode_spec(spec, m);
    for (const InvariantCandidate& c : enumerate_invariants(ms, opts)) {
      if (!c.valid) continue;
      Worksheet w;
      try {
        w = derive(spec, c.id, m, opts);
      } catch (const DerivationError& e) {
        std::cout << pad(to_string(m), 9) << pad(std::to_string(c.id), 4) << "derivation failed: " << e.what() << "\n";
        code = std::max(code, kDerivationFailure);
        continue;
      }
      std::string cost;
      try {
        cost = print(prove_cost(w, 8, opts).closed_form, Style::Text);
      } catch (const DerivationError&) {
        cost = "unsupported";
      }
      long agree = 0, total = 0;
      bool oracle_applies = polynomial_post(w);
      for (const Input& in : sample_inputs(w, inputs, opts.seed)) {
        ++total;
        try {
          RunResult r = run(w, make_input(w, in.a, in.x), true);
          if (!oracle_applies || r.final.scalars.at(w.output().name) == oracle(in.a, in.x)) ++agree;
        } catch (const Error& e) {
          std::cerr << "invariant " << c.id << " (" << to_string(m) << "): " << e.what() << "\n";
        }
      }
      if (agree != total || total < inputs) code = std::max(code, kFalsified);
      if (verdict_exit(w.obligations) != kOk) code = std::max(code, kFalsified);
      std::cout << pad(to_string(m), 9) << pad(std::to_string(c.id), 4) << pad(print(*w.guard, Style::Text), 16)
                << pad(print(*w.update, Style::Text), 40) << pad(cost, 14) << agree << "/" << total << "\n";
    }
  }
  return code;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FLAMESMITH_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw SemanticError(std::string("FLAMESMITH_SEED is not a number: ") + env);
    }
  }
  return 42;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derives loops from pre/postcondition specifications and checks them"};
  app.require_subcommand(1);

  std::string file, mode = "indexed", out_path, coeffs, x, format = "text";
  int id = 0;
  long trials = 1000, max_n = 64, inputs = 1000;
  std::uint64_t seed = 0;
  bool check = false, trace = false, with_cost = false;

  std::vector<CLI::Option*> seed_options;
  auto add_checks = [&](CLI::App* sub) {
    seed_options.push_back(sub->add_option("--seed", seed, "random seed (default 42, or FLAMESMITH_SEED)"));
    sub->add_option("--trials", trials, "random trials per obligation")->check(CLI::PositiveNumber);
  };
  auto modes = CLI::IsMember({"indexed", "flame"});

  auto* inv = app.add_subcommand("invariants", "list invariant candidates");
  inv->add_option("spec", file, "specification file")->required();
  inv->add_option("--mode", mode, "indexed, flame or both")->check(CLI::IsMember({"indexed", "flame", "both"}));
  add_checks(inv);

  auto* der = app.add_subcommand("derive", "derive a worksheet for one invariant");
  der->add_option("spec", file, "specification file")->required();
  der->add_option("--invariant", id, "candidate id")->required();
  der->add_option("--mode", mode, "indexed or flame")->check(modes);
  der->add_option("-o,--output", out_path, "write the worksheet here");
  der->add_flag("--with-cost", with_cost, "add the operation counter and its invariant");
  add_checks(der);

  auto* ver = app.add_subcommand("verify", "check a worksheet's proof obligations");
  ver->add_option("worksheet", file, "worksheet file")->required();
  add_checks(ver);

  auto* run_cmd = app.add_subcommand("run", "execute a worksheet's algorithm");
  run_cmd->add_option("worksheet", file, "worksheet file")->required();
  run_cmd->add_option("--coeffs", coeffs, "comma-separated coefficients")->required();
  run_cmd->add_option("--x", x, "evaluation point")->required();
  run_cmd->add_flag("--check-invariants", check, "assert the invariant every iteration");
  run_cmd->add_flag("--trace", trace, "print the state at every loop test");

  auto* cost = app.add_subcommand("cost", "count operations and prove the cost");
  cost->add_option("worksheet", file, "worksheet file")->required();
  cost->add_option("--max-n", max_n, "largest size measured")->check(CLI::NonNegativeNumber);
  add_checks(cost);

  auto* ren = app.add_subcommand("render", "lay out a worksheet");
  ren->add_option("worksheet", file, "worksheet file")->required();
  ren->add_option("--format", format, "text, latex or markdown")->check(CLI::IsMember({"text", "latex", "markdown"}));

  auto* all = app.add_subcommand("derive-all", "derive every valid candidate and test against the oracle");
  all->add_option("spec", file, "specification file")->required();
  all->add_option("--mode", mode, "indexed, flame or both")->check(CLI::IsMember({"indexed", "flame", "both"}));
  all->add_option("--inputs", inputs, "random inputs per algorithm")->check(CLI::PositiveNumber);
  add_checks(all);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  if (all->parsed() && all->count("--mode") == 0) mode = "both";

  try {
    CheckOptions opts;
    opts.trials = trials;
    bool seed_given = false;
    for (const CLI::Option* o : seed_options) seed_given = seed_given || o->count() > 0;
    opts.seed = seed_given ? seed : default_seed();
    if (inv->parsed()) return cmd_invariants(file, mode, opts);
    if (der->parsed()) return cmd_derive(file, id, mode, out_path, with_cost, opts);
    if (ver->parsed()) return cmd_verify(file, opts);
    if (run_cmd->parsed()) return cmd_run(file, coeffs, x, check, trace);
    if (cost->parsed()) return cmd_cost(file, max_n, opts);
    if (ren->parsed()) return cmd_render(file, format);
    if (all->parsed()) return cmd_derive_all(file, mode, inputs, opts);
  } catch (const ParseError& e) {
    std::cerr << file << ": " << e.what() << "\n";
    return kInputError;
  } catch (const SemanticError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DerivationError& e) {
    std::cerr << "derivation failed: " << e.what() << "\n";
    return kDerivationFailure;
  } catch (const CostInvariantFalsified& e) {
    std::cerr << e.what() << "\n";
    print_obligation(e.obligation());
    return kFalsified;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFalsified;
  }
  return kInputError;
}
