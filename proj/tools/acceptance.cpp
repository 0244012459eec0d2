// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exits 1 if any criterion fails.

#include <cstdio>
#include <exception>
#include <string>

#include "sdym/suites.hpp"

int main() {
  int failed = 0;
  for (int k = 1; k <= sdym::kCriteria; ++k) {
    try {
      sdym::SuiteResult s = sdym::run_criterion(k);
      bool ok = s.passed();
      std::string why;
      if (!s.within_budget()) why = " over budget";
      for (const auto& c : s.checks) {
        if (c.status == sdym::Verdict::pass) continue;
        why += " [" + c.name;
        if (c.value) why += " value=" + std::to_string(*c.value);
        if (c.threshold) why += " threshold=" + std::to_string(*c.threshold);
        why += "]";
      }
      char budget[64];
      if (s.runtime_limit > 0) {
        std::snprintf(budget, sizeof budget, "%.2fs, limit %.0fs", s.seconds, s.runtime_limit);
      } else {
        std::snprintf(budget, sizeof budget, "%.2fs", s.seconds);
      }
      std::printf("%s criterion %d: %s (%zu checks, %s)%s\n", ok ? "PASS" : "FAIL", k, s.title.c_str(),
                  s.checks.size(), budget, why.c_str());
      if (!ok) ++failed;
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %d: error %s\n", k, e.what());
      ++failed;
    }
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
