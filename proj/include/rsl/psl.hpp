// psl.hpp - the stochastic language p_r carried by a pseudo-stochastic
// series: pruning negative-mass branches, renormalizing, evaluating,
// sampling, and measuring the truncated distance between r and p_r.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rsl/automata.hpp"
#include "rsl/rng.hpp"

namespace rsl {

struct NotPseudoStochastic : std::runtime_error {
  explicit NotPseudoStochastic(const std::string& msg) : std::runtime_error(msg) {}
};

// All clamped masses vanished at a prefix that still carries probability;
// the pruned construction cannot continue from there.
struct DegenerateNormalizer : std::runtime_error {
  explicit DegenerateNormalizer(const std::string& msg) : std::runtime_error(msg) {}
};

struct EnumerationTooLarge : std::runtime_error {
  explicit EnumerationTooLarge(const std::string& msg) : std::runtime_error(msg) {}
};

// One surviving prefix of a p_r walk: the clamped stop and branch masses,
// their sum, and the running probability of reaching the prefix.
struct PrunedStep {
  Word prefix;
  double stop_mass = 0.0;
  std::vector<double> branch_masses;
  double normalizer = 0.0;
  double cumulative = 0.0;  // p_r(prefix Sigma*)
};

struct NrMassResult {
  double nr_truncated = 0.0;       // sum of |r(u)| over words with r(u) <= 0
  double d1_r_pr_truncated = 0.0;  // sum of |r(u) - p_r(u)|
  double residual_gap = 0.0;       // sum of r(u) - p_r(u)
};

// Shared machinery behind pr_evaluate / pr_sample / nr_mass: checks the
// pseudo-stochastic certificate once, solves for the per-state series
// totals, and walks prefixes with the clamp-and-normalize rule.  A branch
// survives only while its raw prefix mass stays strictly positive.
class PrEngine {
 public:
  explicit PrEngine(const WeightedAutomaton& a);

  const PslCertificate& certificate() const { return cert_; }
  const Alphabet& alphabet() const { return walk_.alphabet(); }

  // (p_r(u), p_r(u Sigma*)); (0, 0) when u fell out of the pruned tree.
  std::pair<double, double> evaluate(const Word& u) const;
  // The walk down to u, one step per surviving prefix; stops early when a
  // prefix of u is pruned.
  std::vector<PrunedStep> steps(const Word& u) const;
  Word sample(Rng& rng) const;
  NrMassResult nr_mass(int max_len) const;

  struct Node {
    std::vector<double> forward;
    double cumulative = 0.0;
    bool alive = false;
  };
  struct Expansion {
    double stop_raw = 0.0;
    double stop_clamped = 0.0;
    std::vector<double> branch_raw;
    std::vector<double> branch_clamped;
    std::vector<std::vector<double>> child_forward;
    double normalizer = 0.0;
  };

  Node root() const;
  // Raw and clamped masses at a node; callers guard the normalizer before
  // dividing by it.
  Expansion expand(const Node& node) const;
  Node child(const Node& node, const Expansion& ex, int x) const;

 private:
  WeightedAutomaton walk_;
  PslCertificate cert_;
  std::vector<Matrix> mats_;
  std::vector<double> tau_;
  std::vector<double> series_;
};

std::pair<double, double> pr_evaluate(const WeightedAutomaton& a, const Word& u);
std::vector<PrunedStep> pr_steps(const WeightedAutomaton& a, const Word& u);
// Deterministic in the seed; caps words at one million symbols as a safety
// valve (termination is almost sure when the radius is below one).
Word pr_sample(const WeightedAutomaton& a, uint64_t seed);
// Truncated comparison of r and p_r over all words up to max_len; errors
// when the enumeration would exceed 1e7 words.
NrMassResult nr_mass(const WeightedAutomaton& a, int max_len);

}  // namespace rsl
