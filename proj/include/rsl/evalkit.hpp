// evalkit.hpp - samples and their empirical distributions, sample
// generation from automata, truncated and support-based L1 distances, and
// random probabilistic-automaton targets.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rsl/automata.hpp"
#include "rsl/psl.hpp"
#include "rsl/rng.hpp"

namespace rsl {

// Multiset of words over a shared alphabet; duplicates stored repeatedly.
struct Sample {
  Alphabet alphabet;
  std::vector<Word> words;
};

// Prefix-tree counts of a sample: for each stored prefix u, how many words
// equal u and how many pass through it, giving P_S(u) and P_S(u Sigma*).
class EmpiricalDistribution {
 public:
  struct Node {
    long long words = 0;
    long long prefixes = 0;
    std::map<int, int> children;
  };

  explicit EmpiricalDistribution(const Sample& sample);

  const Alphabet& alphabet() const { return alphabet_; }
  long long total() const { return nodes_[0].prefixes; }
  long long word_count(const Word& u) const;
  long long prefix_count(const Word& u) const;
  double word_prob(const Word& u) const;    // P_S(u)
  double prefix_prob(const Word& u) const;  // P_S(u Sigma*)

  // Trie over the distinct factors of the sample's words; node 0 is the
  // empty word and nodes are laid out in length-lex order of the factors
  // they spell.
  struct FactorNode {
    int parent = -1;
    int symbol = -1;
  };

  // Node 0 is the root (the empty prefix).
  const std::vector<Node>& nodes() const { return nodes_; }
  // Distinct factors of the sample's words, always including the empty
  // word, in length-lex order.  Computed once on first use.
  const std::vector<Word>& factors() const;
  // The same factors as a trie; factors()[i] spells factor_nodes()[i], but
  // the trie form avoids materializing the words.
  const std::vector<FactorNode>& factor_nodes() const;

 private:
  int find(const Word& u) const;

  Alphabet alphabet_;
  std::vector<Node> nodes_;
  mutable std::vector<Word> factors_;
  mutable bool factors_ready_ = false;
  mutable std::vector<FactorNode> factor_nodes_;
  mutable bool factor_nodes_ready_ = false;
};

EmpiricalDistribution empirical(const Sample& sample);

// Text format:
//   sample v1
//   alphabet a b
// then one word per line as whitespace-separated symbols; a blank line is
// the empty word.  No comments.
Sample parse_sample(std::istream& in);
std::string format_sample(const Sample& sample);
Sample load_sample(const std::string& path);
void save_sample(const Sample& sample, const std::string& path);

// n independent words from the automaton's distribution: a stop-or-step
// walk when the automaton is a PA, otherwise p_r sampling.  Draw i uses the
// seed derived for stream i, so the sample is independent of draw order.
Sample sample_from(const WeightedAutomaton& a, int n, uint64_t seed);

// Sum of |left(u) - right(u)| over all words up to max_len; each side is
// the raw series or its p_r per the matching flag.  Errors when the
// enumeration would exceed 1e7 words.
double d1_truncated(const WeightedAutomaton& a, const WeightedAutomaton& b,
                    int max_len, bool use_pr_a, bool use_pr_b);

// Same summand over the distinct words of a support sample.
double d1_on_support(const WeightedAutomaton& a, const WeightedAutomaton& b,
                     const Sample& support, bool use_pr_a, bool use_pr_b);

// One automaton's value (raw series or p_r) at every prefix node of the
// support trie, indexed like dist.nodes().  Lets a harness evaluate one
// side once and reuse it across many opponents.
std::vector<double> values_on_support(const WeightedAutomaton& a,
                                      const EmpiricalDistribution& dist,
                                      bool use_pr);

// Sum of |va[i] - vb[i]| over the word nodes of the support trie, in the
// same traversal order d1_on_support uses.
double d1_from_values(const EmpiricalDistribution& dist,
                      const std::vector<double>& va,
                      const std::vector<double>& vb);

// Random PA target: state 0 initial, a spanning tree of transitions into
// each later state for reachability, and each remaining (state, letter)
// pair given one arc to a uniform destination with probability density.
// Keeping the out-degree independent of the state count keeps the stop
// mass per state bounded away from zero, so sampled words stay short no
// matter how large the target is.  Weights are normalized from independent
// uniforms with stop mass floored at 0.01 so every state can halt.
WeightedAutomaton random_pa(int n_states, const Alphabet& alphabet,
                            double density, uint64_t seed);

}  // namespace rsl
