#pragma once

#include <string>
#include <vector>

namespace povmlab {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

/// Runs the full structural-property suite over the four catalog observables
/// with pinned tolerances and fixed seeds. Deterministic.
std::vector<CriterionResult> run_acceptance_criteria();

}  // namespace povmlab
