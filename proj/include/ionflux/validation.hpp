#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ionflux {

struct CheckResult
{
  std::string name;
  bool passed = false;
  double value = 0.0;      // worst observed error measure
  double tolerance = 0.0;  // bound it was compared against
  std::string detail;
};

struct ValidationOptions
{
  std::uint64_t seed = 20240601;
  int random_systems = 24;  // per size, N = 1..8
  int stochastic_trials = 400;
  int threads = 0;
};

/// Property and oracle checks over both steady-state backends, the bath model,
/// the potential derivatives and a small stochastic ensemble.
std::vector<CheckResult> run_property_suite(const ValidationOptions& options = {});

}  // namespace ionflux
