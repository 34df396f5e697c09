// Runs every acceptance check and prints one PASS/FAIL line per criterion.
// Usage: acceptance [--quick] [--seed N]

#include "lambo/verify.hpp"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  lambo::VerifyOptions opts;
  opts.log = &std::cerr;
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;
    else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) opts.seed = std::strtoull(argv[++i], nullptr, 10);
    else {
      std::cerr << "usage: acceptance [--quick] [--seed N]\n";
      return 2;
    }
  }
  const auto results = lambo::run_verification(quick ? lambo::quick_criteria() : lambo::all_criteria(), opts);
  int failed = 0;
  for (const auto& r : results) {
    std::cout << lambo::format_result(r) << '\n';
    failed += r.pass ? 0 : 1;
  }
  std::cout << (results.size() - failed) << '/' << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
