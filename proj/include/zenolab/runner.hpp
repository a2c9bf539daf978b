#pragma once

#include <iosfwd>

#include "zenolab/results.hpp"
#include "zenolab/scenario.hpp"

namespace zenolab {

const char* version();

struct RunOptions {
  int threads = 1;
  bool reproducible = false;     // omit the timestamp metadata field
  std::ostream* log = nullptr;   // one line per grid point when set
};

/// Runs a parsed scenario. Output is a deterministic function of the
/// scenario (seed included), independent of the thread count. Module errors
/// are rethrown with the scenario source prepended, keeping their type.
ResultTable execute(const ScenarioFile& scenario, const RunOptions& options = {});

}  // namespace zenolab
