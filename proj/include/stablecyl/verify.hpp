#pragma once

#include "stablecyl/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace stablecyl {

// The desk-scale acceptance suite. Each check returns a record whose status
// already accounts for its runtime budget.
struct AcceptanceCheck {
  int id = 0;
  std::string name;
  std::string anchor;
  double time_limit = 0.0;  // seconds
  std::function<CheckRecord()> run;
};

const std::vector<AcceptanceCheck>& acceptance_checks();

// Times the check and turns exceptions into failing records.
CheckRecord run_check(const AcceptanceCheck& check);

// Runs every check. With `parallel`, up to `threads` checks run concurrently.
// A nonempty out_dir receives one subdirectory per check plus report.json.
RunReport verify_all(bool parallel = false, int threads = 1, const std::string& out_dir = "");

CheckRecord check_b_spectrum();
CheckRecord check_catalog_convergence();
CheckRecord check_stability_labels();
CheckRecord check_poincare();
CheckRecord check_weight_decomposition();
CheckRecord check_nonlocal_constancy();
CheckRecord check_extension_equivalence();
CheckRecord check_eigenvalue_growth();
CheckRecord check_operator_distinctness();
CheckRecord check_counterexample();
CheckRecord check_extremum_sign();

}  // namespace stablecyl
