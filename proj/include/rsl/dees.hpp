// dees.hpp - inference of a prefix-closed weighted automaton from a sample:
// grow states from the empty word, and for each frontier word either express
// its empirical residual as a feasible combination of existing states or
// promote it to a new state.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rsl/evalkit.hpp"

namespace rsl {

struct StateCapExceeded : std::runtime_error {
  explicit StateCapExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

// A residual P_S(uw Sigma*)/P_S(u Sigma*) is undefined when no sample word
// starts with u.
struct ZeroPrefixMass : std::runtime_error {
  explicit ZeroPrefixMass(const std::string& msg) : std::runtime_error(msg) {}
};

struct DeesConfig {
  // Feasibility slack; defaults to |S|^(-1/3) when unset.
  std::optional<double> fixed_epsilon;
  int max_states = 200;
  // Keep each decision's full constraint system in the trace.  The systems
  // have one row per distinct sample factor, so turn this off for large
  // samples where only the verdicts matter.
  bool keep_systems = true;
};

// One frontier word's fate, with the size (and optionally the content) of
// the system that decided it.
struct DeesDecision {
  Word frontier_word;
  int num_vars = 0;
  long long num_rows = 0;  // absolute-value rows plus the sum-to-one row
  ConstraintSystem system;  // populated only under DeesConfig::keep_systems
  bool new_state = false;
  std::vector<double> coefficients;  // combination witness; empty for new states
};

struct DeesTrace {
  double epsilon = 0.0;
  std::vector<DeesDecision> decisions;
  // Whether the finished automaton defines a pseudo-stochastic series;
  // finite samples occasionally produce one that does not.
  bool psl_undecided = false;
  PslCertificate certificate;
};

// The feasibility system for expressing v's residual over the states q:
// one |target - coeffs . X| <= epsilon row per distinct sample factor
// (empty word included), plus sum X = 1.
ConstraintSystem build_constraint_system(const std::vector<Word>& q, const Word& v,
                                         const EmpiricalDistribution& dist,
                                         double epsilon);

// Frontier words processed shortest-first; identical input gives an
// identical automaton and trace.
std::pair<WeightedAutomaton, DeesTrace> dees_infer(const Sample& sample,
                                                   const DeesConfig& config = {});

// Line-oriented rendition of a trace (one line per decision plus the
// closing series check).
std::string format_trace(const DeesTrace& trace, const Alphabet& alphabet);

}  // namespace rsl
