#include "rsl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace rsl {

namespace {

// Shared red-blue driver state: the tree being merged, the red (kept)
// nodes, and the blue frontier of red children awaiting a verdict.
struct Merger {
  FreqPrefixTree t;
  std::vector<bool> red;
  std::vector<int> red_order;

  explicit Merger(FreqPrefixTree tree) : t(std::move(tree)), red(t.nodes.size(), false) {
    red[0] = true;
    red_order.push_back(0);
  }

  int k() const { return t.alphabet.size(); }

  // Current blue nodes (non-red children of red nodes) in length-lex order
  // of the prefixes that created them.
  std::set<std::pair<Word, int>> blues() const {
    std::set<std::pair<Word, int>> out;
    for (int r : red_order)
      for (int x = 0; x < k(); ++x) {
        int c = t.nodes[r].child[x];
        if (c >= 0 && !red[c]) out.insert({t.nodes[c].word, c});
      }
    return out;
  }

  // The unique red edge currently leading to blue node b.
  std::pair<int, int> incoming(int b) const {
    for (int r : red_order)
      for (int x = 0; x < k(); ++x)
        if (t.nodes[r].child[x] == b) return {r, x};
    throw std::logic_error("blue node without a red parent");
  }
};

// Count mutations with an undo journal, so MDI can evaluate a merge and
// back out.  Also tracks the node-local log-likelihood sum
//   LL = sum over live nodes of stop*log(stop/pass) + sum_x cnt*log(cnt/pass),
// which equals the sample log-likelihood under the frequency-normalized
// machine; folding updates it incrementally.
struct FoldJournal {
  struct CountEntry {
    int node;
    long long pass, stop;
    std::vector<long long> child_count;
  };
  struct ChildEntry {
    int node, sym, old_child;
  };
  std::vector<CountEntry> counts;
  std::vector<ChildEntry> children;
  double ll_delta = 0.0;
  int folds = 0;
};

double node_ll(const FreqPrefixTree::Node& n) {
  double ll = 0.0;
  double pass = static_cast<double>(n.pass);
  if (n.stop > 0) ll += static_cast<double>(n.stop) * std::log(static_cast<double>(n.stop) / pass);
  for (long long c : n.child_count)
    if (c > 0) ll += static_cast<double>(c) * std::log(static_cast<double>(c) / pass);
  return ll;
}

void save_counts(Merger& m, FoldJournal& j, int node) {
  j.counts.push_back({node, m.t.nodes[node].pass, m.t.nodes[node].stop,
                      m.t.nodes[node].child_count});
}

// Adds b's counts and subtree onto r.  b's own node goes dead (nothing
// points at it once the caller redirects the incoming edge).
void fold(Merger& m, FoldJournal& j, int r, int b) {
  ++j.folds;
  save_counts(m, j, r);
  j.ll_delta -= node_ll(m.t.nodes[r]);
  j.ll_delta -= node_ll(m.t.nodes[b]);
  m.t.nodes[r].pass += m.t.nodes[b].pass;
  m.t.nodes[r].stop += m.t.nodes[b].stop;
  for (int x = 0; x < m.k(); ++x)
    m.t.nodes[r].child_count[x] += m.t.nodes[b].child_count[x];
  j.ll_delta += node_ll(m.t.nodes[r]);
  for (int x = 0; x < m.k(); ++x) {
    int rc = m.t.nodes[r].child[x];
    int bc = m.t.nodes[b].child[x];
    if (bc < 0) continue;
    if (rc < 0) {
      j.children.push_back({r, x, rc});
      m.t.nodes[r].child[x] = bc;  // attach the whole subtree
    } else {
      fold(m, j, rc, bc);
    }
  }
}

void undo(Merger& m, FoldJournal& j) {
  for (auto it = j.children.rbegin(); it != j.children.rend(); ++it)
    m.t.nodes[it->node].child[it->sym] = it->old_child;
  for (auto it = j.counts.rbegin(); it != j.counts.rend(); ++it) {
    m.t.nodes[it->node].pass = it->pass;
    m.t.nodes[it->node].stop = it->stop;
    m.t.nodes[it->node].child_count = it->child_count;
  }
}

// try_merge(r, b, parent, sym) either performs the merge and returns true,
// or leaves the tree untouched and returns false.
WeightedAutomaton run_red_blue(
    const Sample& sample,
    const std::function<bool(Merger&, int, int, int, int)>& try_merge) {
  Merger m(build_fpta(sample));
  for (;;) {
    auto blue = m.blues();
    if (blue.empty()) break;
    int b = blue.begin()->second;
    auto [parent, sym] = m.incoming(b);
    bool merged = false;
    for (int r : m.red_order)
      if (try_merge(m, r, b, parent, sym)) {
        merged = true;
        break;
      }
    if (!merged) {
      m.red[b] = true;
      m.red_order.push_back(b);
    }
  }

  WeightedAutomaton wa(m.t.alphabet);
  std::vector<int> state_of(m.t.nodes.size(), -1);
  for (size_t i = 0; i < m.red_order.size(); ++i) {
    const auto& n = m.t.nodes[m.red_order[i]];
    state_of[m.red_order[i]] = wa.add_state(
        format_word(m.t.alphabet, n.word), i == 0 ? 1.0 : 0.0,
        static_cast<double>(n.stop) / static_cast<double>(n.pass));
  }
  for (int r : m.red_order) {
    const auto& n = m.t.nodes[r];
    for (int x = 0; x < m.k(); ++x)
      if (n.child[x] >= 0 && n.child_count[x] > 0)
        wa.add_transition(state_of[r], x, state_of[n.child[x]],
                          static_cast<double>(n.child_count[x]) /
                              static_cast<double>(n.pass));
  }
  return wa;
}

}  // namespace

FreqPrefixTree build_fpta(const Sample& sample) {
  if (sample.words.empty()) throw std::invalid_argument("build_fpta: empty sample");
  FreqPrefixTree t;
  t.alphabet = sample.alphabet;
  int k = t.alphabet.size();
  auto fresh = [&](const Word& w) {
    FreqPrefixTree::Node n;
    n.word = w;
    n.child.assign(k, -1);
    n.child_count.assign(k, 0);
    t.nodes.push_back(std::move(n));
    return static_cast<int>(t.nodes.size()) - 1;
  };
  fresh({});
  for (const Word& w : sample.words) {
    int cur = 0;
    ++t.nodes[cur].pass;
    Word prefix;
    for (int x : w) {
      if (x < 0 || x >= k)
        throw std::invalid_argument("sample word uses a symbol outside the alphabet");
      prefix.push_back(x);
      if (t.nodes[cur].child[x] < 0) {
        int id = fresh(prefix);
        t.nodes[cur].child[x] = id;
      }
      ++t.nodes[cur].child_count[x];
      cur = t.nodes[cur].child[x];
      ++t.nodes[cur].pass;
    }
    ++t.nodes[cur].stop;
  }
  return t;
}

WeightedAutomaton alergia_infer(const Sample& sample, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alergia_infer: alpha outside (0,1]");
  double log_term = std::sqrt(std::log(2.0 / alpha) / 2.0);

  // Hoeffding compatibility, recursively over the paired subtrees; a
  // missing side has zero observations and is trivially compatible.
  std::function<bool(const Merger&, int, int)> compatible =
      [&](const Merger& m, int r, int b) -> bool {
    const auto& nr = m.t.nodes[r];
    const auto& nb = m.t.nodes[b];
    double bound = (std::sqrt(1.0 / static_cast<double>(nr.pass)) +
                    std::sqrt(1.0 / static_cast<double>(nb.pass))) *
                   log_term;
    auto freq_gap = [&](long long fr, long long fb) {
      return std::fabs(static_cast<double>(fr) / static_cast<double>(nr.pass) -
                       static_cast<double>(fb) / static_cast<double>(nb.pass));
    };
    if (freq_gap(nr.stop, nb.stop) > bound) return false;
    for (int x = 0; x < m.k(); ++x)
      if (freq_gap(nr.child_count[x], nb.child_count[x]) > bound) return false;
    for (int x = 0; x < m.k(); ++x) {
      int rc = nr.child[x], bc = nb.child[x];
      if (rc >= 0 && bc >= 0 && !compatible(m, rc, bc)) return false;
    }
    return true;
  };

  return run_red_blue(sample, [&](Merger& m, int r, int b, int parent, int sym) {
    if (!compatible(m, r, b)) return false;
    FoldJournal j;
    m.t.nodes[parent].child[sym] = r;
    fold(m, j, r, b);
    return true;
  });
}

WeightedAutomaton mdi_infer(const Sample& sample, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("mdi_infer: negative gamma");
  return run_red_blue(sample, [&](Merger& m, int r, int b, int parent, int sym) {
    FoldJournal j;
    int old_target = m.t.nodes[parent].child[sym];
    m.t.nodes[parent].child[sym] = r;
    fold(m, j, r, b);
    // ll_delta is LL(after) - LL(before), count-weighted over the sample, so
    // -ll_delta / n is the empirical divergence the merge introduces between
    // the folded machine and the tree's own distribution.  Weigh it against
    // the number of nodes the merge removes.
    double div_increase =
        std::max(-j.ll_delta, 0.0) / static_cast<double>(sample.words.size());
    if (div_increase / static_cast<double>(j.folds) < gamma) return true;
    undo(m, j);
    m.t.nodes[parent].child[sym] = old_target;
    return false;
  });
}

}  // namespace rsl
