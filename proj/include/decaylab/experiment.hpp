#pragma once

#include <string>
#include <vector>

#include "decaylab/acceptance.hpp"
#include "decaylab/io.hpp"

namespace decaylab {

struct RunOutcome {
  std::string summary;               // one line of key scalar results
  std::vector<std::string> written;  // output files
};

// Validates and executes an experiment config {kind, parameters, output, seed}.
RunOutcome run_experiment(const io::json& config);

// Sweep concurrency: DECAYLAB_THREADS if set and positive, else hardware threads.
unsigned sweep_threads();

io::json acceptance_report(const std::vector<acceptance::CriterionResult>& results);

}  // namespace decaylab
