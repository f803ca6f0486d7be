#include <cstdlib>
#include <cstring>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fstream>
#include <iostream>
#include <spdlog/spdlog.h>

#include "hpafem/verify.hpp"

// Prints one line per criterion and writes the same lines to
// acceptance_report.txt. Failed empirical targets do not change the exit
// status unless --strict is given.
int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) strict = strict || std::strcmp(argv[i], "--strict") == 0;
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("HP_AFEM_LOG")) spdlog::set_level(spdlog::level::from_str(env));
  const auto results = hpafem::run_suite("all");
  std::ofstream report("acceptance_report.txt");
  std::vector<int> failed;
  for (const auto& r : results) {
    const std::string line = hpafem::format_result(r);
    std::cout << line << std::endl;
    report << line << "\n";
    if (!r.pass) failed.push_back(r.id);
  }
  const auto gating = hpafem::gating_failures(results);
  const std::string summary =
      failed.empty() ? fmt::format("acceptance: all {} criteria pass", results.size())
                     : fmt::format("acceptance: {}/{} criteria pass; failed: {}; gating failures: {}",
                                   results.size() - failed.size(), results.size(), fmt::join(failed, ", "),
                                   gating.empty() ? std::string("none") : fmt::format("{}", fmt::join(gating, ", ")));
  std::cout << summary << std::endl;
  report << summary << "\n";
  const bool ok = strict ? failed.empty() : gating.empty();
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
