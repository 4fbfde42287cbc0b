#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <sys/wait.h>

#include "gnslab/acceptance.hpp"

using namespace gnslab;

namespace {

struct Outcome {
  int exit_code;
  std::string out;
  double seconds;
};

Outcome capture(const std::string& cmd) {
  const auto start = std::chrono::steady_clock::now();
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "", 0.0};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, secs};
}

acceptance::CriterionResult determinism() {
  const std::string cmd = std::string(GNSLAB_CLI_PATH) + " selftest --quick";
  const Outcome a = capture(cmd), b = capture(cmd);
  acceptance::detail::Check c(acceptance::Options{});
  c.truth("exit codes " + std::to_string(a.exit_code) + ", " + std::to_string(b.exit_code),
          a.exit_code == 0 && b.exit_code == 0);
  c.truth("runtime within 60 s", a.seconds <= 60.0 && b.seconds <= 60.0);
  c.truth("repeated output byte-identical", !a.out.empty() && a.out == b.out);
  return acceptance::detail::finish(10, "determinism and self-test", c);
}

}  // namespace

int main() {
  auto results = acceptance::run_all(acceptance::Options{acceptance::Level::full, 1.0});
  results.push_back(determinism());
  int failed = 0;
  for (const auto& r : results) {
    std::cout << acceptance::format_line(r) << "\n";
    if (!r.pass) ++failed;
  }
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
