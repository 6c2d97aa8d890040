#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankone/io.hpp"

namespace rankone {

struct Check {
  std::string name;
  bool pass = false;
  std::string observed;
  std::string expected;
  std::string tolerance;
};

struct VerifyReport {
  ConstructionParams params;
  std::vector<Check> checks;
  bool pass() const;
  int exit_code() const { return pass() ? 0 : 1; }
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::size_t samples = 100'000;
  std::size_t nesting_trials = 100;
  unsigned threads = 0;
};

/// Runs every check that the construction's materialized stages allow. Exact
/// checks come first, statistical ones second, each group ordered by name.
/// Construction failures become a failed "construction.build" entry.
VerifyReport run_verify(const ConstructionParams& params, const VerifyOptions& options = {});

json report_to_json(const VerifyReport& report);

struct NestingTrial {
  LevelSet a;
  LevelSet b;
  Index n = 0;
  int depth = 0;  // compared against depth + 1
};

/// Random (A, B, n, J) with J + 1 <= j_max, n < h_{J-1} and A, B small unions
/// of levels of stages J-2..J-1.
std::vector<NestingTrial> random_nesting_trials(const StageTable& table, std::size_t count, std::uint64_t seed);

}  // namespace rankone
