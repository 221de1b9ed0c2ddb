// baselines.hpp - the comparison learners: a frequency prefix tree built
// from a sample, and the ALERGIA and MDI state-merging algorithms on top of
// it, both emitting deterministic probabilistic automata.
#pragma once

#include "rsl/evalkit.hpp"

namespace rsl {

// Prefix tree with multiset counts: how many words pass through each
// prefix, end there, and continue with each symbol.
struct FreqPrefixTree {
  struct Node {
    Word word;  // the prefix that created the node
    long long pass = 0;
    long long stop = 0;
    std::vector<int> child;              // per symbol, -1 when absent
    std::vector<long long> child_count;  // per symbol
  };
  Alphabet alphabet;
  std::vector<Node> nodes;  // 0 is the root
};

FreqPrefixTree build_fpta(const Sample& sample);

// Red-blue merging with the Hoeffding compatibility test at risk level
// alpha: smaller alpha makes the test more permissive (wider bound).
WeightedAutomaton alergia_infer(const Sample& sample, double alpha);

// Red-blue merging accepting a merge when its per-state divergence cost
// stays below gamma; gamma 0 keeps the whole tree, large gamma merges
// everything into a unigram.
WeightedAutomaton mdi_infer(const Sample& sample, double gamma);

}  // namespace rsl
