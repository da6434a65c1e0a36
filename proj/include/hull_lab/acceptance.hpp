#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hull_lab::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::vector<std::string> details;
};

// Runs the full battery in a fixed order, printing one line per criterion.
std::vector<CriterionResult> run_all(std::ostream& out);

}  // namespace hull_lab::acceptance
