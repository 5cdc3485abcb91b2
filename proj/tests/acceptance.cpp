// Runs the eleven acceptance criteria at their default sizes and prints one
// line per criterion. Exit status is nonzero when any criterion fails.

#include <cstdio>
#include <exception>

#include "seqglr/properties.hpp"

int main() {
  namespace p = seqglr::properties;
  try {
    const auto checks = p::acceptance_suite(p::SuiteOptions{});
    int failed = 0;
    for (const auto& c : checks) {
      std::printf("%s %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
      if (!c.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(checks.size()) - failed, checks.size());
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance suite aborted: %s\n", e.what());
    return 2;
  }
}
