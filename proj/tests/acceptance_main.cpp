#include <iostream>

#include "hull_lab/acceptance.hpp"

int main() {
  const auto results = hull_lab::acceptance::run_all(std::cout);
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  std::cout << (all ? "all criteria passed" : "some criteria FAILED") << "\n";
  return all ? 0 : 1;
}
