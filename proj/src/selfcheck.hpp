#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fmpp {

struct SelfCheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Reduced-replicate Monte Carlo checks of the estimator: Poisson ground
/// unbiasedness under all edge corrections plus the analytic edge-weight
/// integral identity. `replicates` defaults to 100 when <= 0.
std::vector<SelfCheckLine> run_selfcheck(int replicates, uint64_t seed);

}  // namespace fmpp
