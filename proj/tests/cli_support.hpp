#pragma once

#include <array>
#include <chrono>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace testing {

struct Cli {
  int code = -1;
  std::string out;
  double seconds = 0;
};

inline std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the flamesmith binary with `args` through the shell. Standard error is
// discarded unless `merge_stderr` is set.
inline Cli cli(const std::string& args, const std::string& env = "", bool merge_stderr = false) {
  Cli r;
  std::string cmd = (env.empty() ? "" : env + " ") + quote(FLAMESMITH_CLI) + " " + args +
                    (merge_stderr ? " 2>&1" : " 2>/dev/null");
  auto t0 = std::chrono::steady_clock::now();
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace testing
