#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "explab/families.hpp"
#include "explab/io.hpp"

namespace explab {

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst_violation = 0.0;  // measured worst residual or breach
  std::string witness;           // attaining model / subset / pair, or "vacuous"
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Models the suite runs on. Kernel entries must carry (or imply) a reversing
// measure; action entries may carry a base metric keyed by name, without
// which the warped-geometry checks skip them.
struct VerifyScope {
  std::vector<std::pair<std::string, MarkovKernel>> kernels;
  std::vector<std::pair<std::string, FiniteAction>> actions;
  std::map<std::string, Mat> metrics;
  std::vector<std::pair<std::string, ActionChain>> chains;
  bool include_refining_family = false;  // the built-in expander tower
};

// Every built-in family plus seeded random reversible kernels and weighted
// actions.
VerifyScope builtin_scope(std::uint64_t seed);

// One loaded document. Chains contribute each level as an action as well.
VerifyScope document_scope(const AnyDocument& doc, const std::string& name);

// Runs the whole invariant suite over the scope. Checks that find no
// applicable model pass with witness "vacuous".
VerifyReport run_verify(const VerifyScope& scope, std::uint64_t seed,
                        const Tolerances& tol = default_tolerances());

Json verify_report_json(const VerifyReport& report);

// Diameter-2 normalization of the word metric when every orbit distance is
// finite; nullopt otherwise. The fallback base metric for metric-free inputs.
std::optional<Mat> derived_word_metric(const FiniteAction& action);

}  // namespace explab
