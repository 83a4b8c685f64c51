#include <cstdio>
#include <string>

#include "potlab/acceptance.hpp"
#include "potlab/errors.hpp"

#ifndef POTLAB_SCENARIO_DIR
#define POTLAB_SCENARIO_DIR "scenarios"
#endif

int main(int argc, char** argv) {
  potlab::AcceptanceOptions opts;
  opts.scenario_dir = argc > 1 ? argv[1] : POTLAB_SCENARIO_DIR;
  for (int i = 2; i < argc; ++i) opts.only.insert(std::stoi(argv[i]));
  try {
    const auto results = potlab::run_acceptance(opts);
    int passed = 0;
    for (const auto& r : results) {
      std::printf("%s\n", potlab::format_result(r).c_str());
      std::fflush(stdout);
      passed += r.pass;
    }
    std::printf("%d/%zu criteria pass\n", passed, results.size());
    return passed == static_cast<int>(results.size()) ? 0 : 1;
  } catch (const potlab::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
}
