#include "cli_support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace testing;
namespace fs = std::filesystem;

namespace {

const std::string kData = FLAMESMITH_DATA;

std::string data(const std::string& name) { return quote(kData + "/" + name); }

bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

// A file under a per-process scratch directory holding `text`.
std::string scratch_file(const std::string& name, const std::string& text) {
  fs::path dir = fs::temp_directory_path() / ("flamesmith-cli-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return quote(p.string());
}

}  // namespace

TEST_CASE("cli: run prints the result and agrees with the oracle") {
  Cli r = cli("run " + data("horner_indexed.wks") + " --coeffs 1,2,3 --x 2");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "y = 17\n"));
  CHECK(contains(r.out, "oracle: 17 (agrees)"));

  Cli f = cli("run " + data("horner.wks") + " --coeffs 1,2,3 --x 2 --trace --check-invariants");
  CHECK(f.code == 0);
  CHECK(contains(f.out, "iteration 0: psi = 0, C = 0, m(a_T) = 3\n"));
  CHECK(contains(f.out, "iteration 3: psi = 17, C = 6, m(a_T) = 0\n"));
  CHECK(contains(f.out, "invariant checks: passed"));

  Cli empty = cli("run " + data("horner_indexed.wks") + " --coeffs '' --x 5");
  CHECK(empty.code == 0);
  CHECK(contains(empty.out, "y = 0\n"));
  CHECK(contains(empty.out, "iterations: 0\n"));

  Cli frac = cli("run " + data("horner_indexed.wks") + " --coeffs 1/2,3 --x -1/3");
  CHECK(frac.code == 0);
  CHECK(contains(frac.out, "y = -1/2\n"));
}

TEST_CASE("cli: exit code 1 for falsified obligations and wrong results") {
  Cli v = cli("verify " + data("mutants/wrong_index.wks"));
  CHECK(v.code == 1);
  CHECK(contains(v.out, "step     Falsified (tier 2, seed 42)"));
  CHECK(contains(v.out, "counterexample: "));

  Cli oob = cli("run " + data("mutants/wrong_index.wks") + " --coeffs 1,2,3 --x 2", "", true);
  CHECK(oob.code == 1);
  CHECK(contains(oob.out, "index 3 out of range"));

  // Horner with one added to every step.
  std::ifstream in(kData + "/horner_indexed.wks");
  std::string text, line;
  while (std::getline(in, line)) {
    if (line.rfind("obligation", 0) == 0) continue;
    if (line.rfind("slot 8 ", 0) == 0) line += " + 1";
    text += line + "\n";
  }
  std::string off = scratch_file("off_by_one.wks", text);

  Cli wrong = cli("run " + off + " --coeffs 1,2,3 --x 2");
  CHECK(wrong.code == 1);
  CHECK(contains(wrong.out, "oracle: 17 (MISMATCH)"));

  Cli checked = cli("run " + off + " --coeffs 1,2,3 --x 2 --check-invariants", "", true);
  CHECK(checked.code == 1);
  CHECK(contains(checked.out, "loop bottom assertion fails at iteration 1"));

  Cli cost = cli("cost " + data("mutants/wrong_cost.wks"));
  CHECK(cost.code == 1);
}

TEST_CASE("cli: exit code 2 for input errors") {
  CHECK(cli("verify /nonexistent/file.wks").code == 2);
  CHECK(cli("derive " + data("polyeval.spec") + " --invariant 6").code == 2);
  CHECK(cli("derive " + data("polyeval.spec") + " --invariant 5 --mode sideways").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("").code == 2);

  std::string bad = scratch_file("bad.spec", "op p\nvar y : scalar, out\nvar a : vector(n), in\npre: 0 <=\npost: y = 0\n");
  Cli r = cli("invariants " + bad, "", true);
  CHECK(r.code == 2);
  CHECK(contains(r.out, "parse error at 4:10: expected an expression"));

  std::string undeclared = scratch_file("undeclared.spec", "op p\nvar a : vector(n), in\npre: 0 <= n\npost: y = sum(i, 0, n-1, a[i])\n");
  CHECK(cli("invariants " + undeclared).code == 2);

  CHECK(cli("run " + data("horner.wks") + " --coeffs 1,x --x 2").code == 2);
}

TEST_CASE("cli: exit code 3 for derivation failures") {
  std::string two = scratch_file("two.spec",
                                 "op two\nvar y : scalar, out\nvar a : vector(n), in\npre: 0 <= n\n"
                                 "post: y = sum(i, 0, n-1, a[i]) + sum(i, 0, n-1, a[i] * a[i])\n");
  Cli r = cli("invariants " + two, "", true);
  CHECK(r.code == 3);
  CHECK(contains(r.out, "UnsplittableForm"));

  std::string inv2 = scratch_file("inv2.wks", cli("derive " + data("polyeval.spec") + " --invariant 2").out);
  Cli cost = cli("cost " + inv2, "", true);
  CHECK(cost.code == 3);
  CHECK(contains(cost.out, "UnsupportedRecurrence"));
}

TEST_CASE("cli: seed precedence") {
  std::string mutant = data("mutants/weak_guard.wks");
  CHECK(contains(cli("verify " + mutant).out, "seed 42"));
  CHECK(contains(cli("verify " + mutant, "FLAMESMITH_SEED=7").out, "seed 7)"));
  CHECK(contains(cli("verify " + mutant + " --seed 9", "FLAMESMITH_SEED=7").out, "seed 9)"));
  CHECK(cli("verify " + mutant, "FLAMESMITH_SEED=abc").code == 2);
}

TEST_CASE("cli: derive writes a file that verifies") {
  std::string out = scratch_file("derived.wks", "");
  Cli d = cli("derive " + data("polyeval.spec") + " --invariant 3 --mode flame -o " + out);
  CHECK(d.code == 0);
  CHECK(contains(d.out, "update: ψ, z := α_1 × z + ψ, z × χ"));
  Cli v = cli("verify " + out);
  CHECK(v.code == 0);
  CHECK(contains(v.out, "all obligations hold"));
}

TEST_CASE("cli: shipped worksheets are what derive produces") {
  auto read = [](const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(cli("derive " + data("polyeval.spec") + " --invariant 5").out == read(kData + "/horner_indexed.wks"));
  CHECK(cli("derive " + data("polyeval.spec") + " --invariant 5 --mode flame --with-cost").out ==
        read(kData + "/horner.wks"));
}

TEST_CASE("cli: render formats") {
  Cli t = cli("render " + data("horner.wks") + " --format text");
  CHECK(t.code == 0);
  CHECK(contains(t.out, "while m(a_B) < m(a) do"));
  Cli l = cli("render " + data("horner.wks") + " --format latex");
  CHECK(l.code == 0);
  CHECK(contains(l.out, "\\end{document}"));
  Cli m = cli("render " + data("horner_indexed.wks") + " --format markdown");
  CHECK(m.code == 0);
  CHECK(contains(m.out, "| Step | Algorithm |"));
  CHECK(cli("render " + data("horner.wks") + " --format pdf").code == 2);
}

TEST_CASE("cli: help") {
  Cli h = cli("--help");
  CHECK(h.code == 0);
  CHECK(contains(h.out, "derive-all"));
}
