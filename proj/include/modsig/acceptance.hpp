#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace modsig {

constexpr int kCriterionCount = 16;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;                   // one line, measured values against thresholds
  nlohmann::ordered_json measurements;   // stable key order
  double seconds = 0;
};

std::string criterion_title(int id);
// Runs one acceptance criterion at full scale. Never throws for a failed
// check; exceptions from the libraries are reported as a failure.
CriterionResult run_criterion(int id, unsigned workers);
nlohmann::ordered_json to_json(const CriterionResult& r);

}  // namespace modsig
