#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyadic/model.hpp"
#include "dyadic/shift.hpp"
#include "dyadic/verify.hpp"
#include "dyadic/weights.hpp"

namespace dyadic {

struct CheckContext {
  int dimension = 1;
  int depth = 8;
  std::uint64_t seed = 2026;
  int instances = 6;
  double threshold = 4.0;               // stopping threshold
  std::string baseline_path = "data/baseline.json";
  PowerIterationOptions power;
  bool operator==(const CheckContext&) const = default;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double statistic = 0.0;  // measured value
  double bound = 0.0;      // what the statistic must not exceed
  std::string detail;
};

// Rotating collection of shift / weight / function triples all checks run on.
struct CorpusItem {
  std::string label;
  HaarShift shift;
  Weight weight;
  StepFunction f;
  StepFunction g;
};

std::vector<CorpusItem> standard_corpus(const CheckContext& ctx);

std::vector<std::string> available_checks();

// Worst norm over a2 ratio across the corpus, and the key under which the
// baseline file records it.
double linear_bound_statistic(const CheckContext& ctx);
std::string check_context_key(const CheckContext& ctx);

CheckResult run_check(const std::string& name, const CheckContext& ctx);

std::vector<CheckResult> run_all_checks(const CheckContext& ctx);

}  // namespace dyadic
