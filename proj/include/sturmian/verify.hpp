#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sturmian {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double value = 0;  // measured quantity
  double bound = 0;  // what it was compared against
  std::string detail;
};

// Fast invariant suite over all modules; randomized parts are driven by `seed`.
std::vector<VerifyCheck> run_verify_suite(std::uint64_t seed, unsigned threads = 0);

}  // namespace sturmian
