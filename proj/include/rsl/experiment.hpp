// experiment.hpp - batch runs of the learners against reference targets:
// draw training samples, infer, measure model size and L1 distance, and
// exchange the results as CSV.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rsl/automata.hpp"

namespace rsl {

struct ExperimentRecord {
  std::string experiment;
  std::string target;
  std::string algo;
  double param = 0.0;
  int n = 0;
  int trial = 0;
  int states = 0;
  double d1 = 0.0;
  double seconds = 0.0;
};

struct ExperimentOptions {
  uint64_t seed = 0;
  double alergia_alpha = 0.05;
  double mdi_gamma = 0.02;
  // Unset means the sample-size power rule |S|^(-1/3).
  std::optional<double> dees_epsilon;
  // Off by default so identical seeds give byte-identical CSV; turning it
  // on records real inference wall times.
  bool wall_time = false;
};

extern const char kExpPaFig3[];
extern const char kExpNonrationalFig2[];
extern const char kExpRandomPa[];

// Runs one of the built-in experiment grids; rows come out sorted by grid
// position (algorithm, then size, then trial).
std::vector<ExperimentRecord> run_experiment(const std::string& id,
                                             const ExperimentOptions& options);

// The standard grid (sizes 100..10000, 10 trials, all three learners)
// against a caller-supplied target.
std::vector<ExperimentRecord> run_custom_experiment(const WeightedAutomaton& target,
                                                    const std::string& target_id,
                                                    const ExperimentOptions& options);

// CSV with header experiment,target,algo,param,n,trial,states,d1,seconds;
// numbers print as shortest round-tripping decimals, so parsing recovers
// the records exactly.
std::string format_records(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> parse_records(std::istream& in);

}  // namespace rsl
