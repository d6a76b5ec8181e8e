#pragma once

#include <string>
#include <vector>

#include "output.hpp"

namespace ionbath::cli {

// Each command returns the files it wrote.
std::vector<std::string> cmd_equilibrium(const RunContext& ctx);
std::vector<std::string> cmd_modes(const RunContext& ctx);
std::vector<std::string> cmd_specdensity(const RunContext& ctx);
std::vector<std::string> cmd_evolve(const RunContext& ctx);
std::vector<std::string> cmd_measure(const RunContext& ctx);

struct ScanOutcome {
  std::vector<std::string> files;
  int failures = 0;
};
ScanOutcome cmd_scan(const RunContext& ctx);

}  // namespace ionbath::cli
