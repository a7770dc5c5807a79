#include "stablecyl/verify.hpp"

#include <cstdio>

using namespace stablecyl;

int main() {
  bool all = true;
  for (const auto& check : acceptance_checks()) {
    const CheckRecord r = run_check(check);
    const bool ok = r.status == CheckStatus::Pass;
    all = all && ok;
    std::printf("[%s] criterion %2d %-22s measured=%-12.4g tol=%-10.3g %.2fs\n", ok ? "PASS" : "FAIL", check.id,
                check.name.c_str(), r.measured, r.tolerance, r.seconds);
    if (!ok) std::printf("       details: %s\n", r.details.dump().c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
