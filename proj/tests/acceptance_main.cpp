// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Same machinery as `swarmlab verify`.

#include <iostream>

#include "swarm/scenarios.hpp"

int main() {
  const auto results = swarm::verify_all(std::cout);
  bool pass = !results.empty();
  for (const auto& r : results) pass = pass && r.pass;
  std::cout << (pass ? "ALL PASS" : "FAILURES PRESENT") << " (" << results.size()
            << " criteria)\n";
  return pass ? 0 : 1;
}
