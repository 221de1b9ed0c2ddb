#include "rsl/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace rsl {

namespace {

constexpr double kEnumerationGuard = 1e7;
constexpr size_t kWalkLengthCap = 1000000;

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// One side of a distance computation: either the raw series, tracked by a
// forward vector, or its p_r, tracked by an engine node.
struct SideContext {
  bool use_pr = false;
  std::vector<Matrix> mats;
  std::vector<double> tau;
  std::optional<PrEngine> engine;

  explicit SideContext(const WeightedAutomaton& a, bool pr) : use_pr(pr) {
    if (use_pr) {
      engine.emplace(a);
    } else {
      tau = a.final_vector();
      mats.reserve(a.alphabet().size());
      for (int x = 0; x < a.alphabet().size(); ++x)
        mats.push_back(a.symbol_matrix(x));
    }
  }
};

struct SideCursor {
  std::vector<double> forward;
  PrEngine::Node node;
  std::optional<PrEngine::Expansion> expansion;
};

double side_value(const SideContext& ctx, SideCursor& cur) {
  if (!ctx.use_pr) return dot(cur.forward, ctx.tau);
  if (!cur.node.alive) return 0.0;
  cur.expansion = ctx.engine->expand(cur.node);
  if (cur.expansion->normalizer <= 0.0)
    throw DegenerateNormalizer("no positive mass at a reachable prefix");
  return cur.node.cumulative * (cur.expansion->stop_clamped / cur.expansion->normalizer);
}

SideCursor side_child(const SideContext& ctx, const SideCursor& cur, int x) {
  SideCursor next;
  if (!ctx.use_pr) {
    next.forward = ctx.mats[x].apply_left(cur.forward);
  } else if (cur.node.alive) {
    next.node = ctx.engine->child(cur.node, *cur.expansion, x);
  }
  return next;
}

Word pa_walk(const WeightedAutomaton& a, Rng& rng) {
  int k = a.alphabet().size();
  int q = rng.categorical(a.initial_vector());
  Word u;
  for (;;) {
    std::vector<double> weights{a.final_weight(q)};
    std::vector<std::pair<int, int>> moves;
    for (int x = 0; x < k; ++x)
      for (const auto& [dst, w] : a.arcs(q, x)) {
        weights.push_back(w);
        moves.emplace_back(x, dst);
      }
    int pick = rng.categorical(weights);
    if (pick == 0) return u;
    if (u.size() >= kWalkLengthCap)
      throw std::runtime_error("sample_from exceeded the word length cap");
    u.push_back(moves[pick - 1].first);
    q = moves[pick - 1].second;
  }
}

void check_enumeration(int k, int max_len) {
  double words = 1.0, layer = 1.0;
  for (int i = 1; i <= max_len; ++i) {
    layer *= k;
    words += layer;
  }
  if (words > kEnumerationGuard) {
    std::ostringstream msg;
    msg << "enumerating words up to length " << max_len << " over " << k
        << " symbols would visit " << words << " words";
    throw EnumerationTooLarge(msg.str());
  }
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(const Sample& sample)
    : alphabet_(sample.alphabet) {
  nodes_.emplace_back();
  for (const Word& w : sample.words) {
    int cur = 0;
    ++nodes_[cur].prefixes;
    for (int x : w) {
      if (x < 0 || x >= alphabet_.size())
        throw std::invalid_argument("sample word uses a symbol outside the alphabet");
      auto [it, inserted] = nodes_[cur].children.emplace(x, static_cast<int>(nodes_.size()));
      if (inserted) nodes_.emplace_back();
      cur = it->second;
      ++nodes_[cur].prefixes;
    }
    ++nodes_[cur].words;
  }
}

int EmpiricalDistribution::find(const Word& u) const {
  int cur = 0;
  for (int x : u) {
    auto it = nodes_[cur].children.find(x);
    if (it == nodes_[cur].children.end()) return -1;
    cur = it->second;
  }
  return cur;
}

long long EmpiricalDistribution::word_count(const Word& u) const {
  int i = find(u);
  return i < 0 ? 0 : nodes_[i].words;
}

long long EmpiricalDistribution::prefix_count(const Word& u) const {
  int i = find(u);
  return i < 0 ? 0 : nodes_[i].prefixes;
}

double EmpiricalDistribution::word_prob(const Word& u) const {
  return static_cast<double>(word_count(u)) / static_cast<double>(total());
}

double EmpiricalDistribution::prefix_prob(const Word& u) const {
  return static_cast<double>(prefix_count(u)) / static_cast<double>(total());
}

const std::vector<Word>& EmpiricalDistribution::factors() const {
  if (factors_ready_) return factors_;
  const std::vector<FactorNode>& trie = factor_nodes();
  std::vector<Word> out(trie.size());
  for (size_t i = 1; i < trie.size(); ++i) {
    out[i] = out[trie[i].parent];
    out[i].push_back(trie[i].symbol);
  }
  factors_ = std::move(out);
  factors_ready_ = true;
  return factors_;
}

// Breadth-first closure over occurrence sets: a factor's occurrences are
// the trie nodes reachable by reading it from any starting position, and
// extending by x keeps exactly the x-children of those nodes.  Breadth
// first with symbols in declared order yields length-lex layout.
const std::vector<EmpiricalDistribution::FactorNode>&
EmpiricalDistribution::factor_nodes() const {
  if (factor_nodes_ready_) return factor_nodes_;
  factor_nodes_.clear();
  factor_nodes_.push_back({});
  std::vector<std::vector<int>> occ(1);
  occ[0].resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) occ[0][i] = static_cast<int>(i);
  int k = alphabet_.size();
  std::vector<std::vector<int>> buckets(k);
  for (size_t f = 0; f < factor_nodes_.size(); ++f) {
    for (auto& b : buckets) b.clear();
    for (int n : occ[f])
      for (const auto& [x, child] : nodes_[n].children) buckets[x].push_back(child);
    for (int x = 0; x < k; ++x) {
      if (buckets[x].empty()) continue;
      std::sort(buckets[x].begin(), buckets[x].end());
      buckets[x].erase(std::unique(buckets[x].begin(), buckets[x].end()),
                       buckets[x].end());
      factor_nodes_.push_back({static_cast<int>(f), x});
      occ.push_back(std::move(buckets[x]));
      buckets[x] = {};
    }
    occ[f] = {};
  }
  factor_nodes_ready_ = true;
  return factor_nodes_;
}

EmpiricalDistribution empirical(const Sample& sample) {
  if (sample.words.empty()) throw std::invalid_argument("empirical: empty sample");
  return EmpiricalDistribution(sample);
}

Sample parse_sample(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "sample v1")
    throw ParseError("line 1: expected 'sample v1'");
  if (!std::getline(in, line))
    throw ParseError("line 2: expected 'alphabet ...'");
  auto toks = split_ws(strip_cr(line));
  if (toks.empty() || toks[0] != "alphabet")
    throw ParseError("line 2: expected 'alphabet ...'");
  Sample out;
  out.alphabet = Alphabet(std::vector<std::string>(toks.begin() + 1, toks.end()));
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    Word w;
    for (const std::string& tok : split_ws(strip_cr(line))) {
      int x = out.alphabet.index(tok);
      if (x < 0)
        throw ParseError("line " + std::to_string(lineno) + ": unknown symbol '" + tok + "'");
      w.push_back(x);
    }
    out.words.push_back(std::move(w));
  }
  return out;
}

std::string format_sample(const Sample& sample) {
  std::ostringstream out;
  out << "sample v1\nalphabet";
  for (const std::string& s : sample.alphabet.symbols()) out << ' ' << s;
  out << '\n';
  for (const Word& w : sample.words) {
    for (size_t i = 0; i < w.size(); ++i) {
      if (i > 0) out << ' ';
      out << sample.alphabet.symbol(w[i]);
    }
    out << '\n';
  }
  return out.str();
}

Sample load_sample(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return parse_sample(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_sample(const Sample& sample, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << format_sample(sample);
  if (!out) throw std::runtime_error("cannot write " + path);
}

Sample sample_from(const WeightedAutomaton& a, int n, uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample_from: negative sample size");
  Sample out;
  out.alphabet = a.alphabet();
  out.words.reserve(n);
  if (validate_pa(a)) {
    for (int i = 0; i < n; ++i) {
      Rng rng(derive_seed(seed, i));
      out.words.push_back(pa_walk(a, rng));
    }
  } else {
    PrEngine engine(a);
    for (int i = 0; i < n; ++i) {
      Rng rng(derive_seed(seed, i));
      out.words.push_back(engine.sample(rng));
    }
  }
  return out;
}

double d1_truncated(const WeightedAutomaton& a, const WeightedAutomaton& b,
                    int max_len, bool use_pr_a, bool use_pr_b) {
  if (!(a.alphabet() == b.alphabet()))
    throw std::invalid_argument("d1_truncated: alphabets differ");
  int k = a.alphabet().size();
  check_enumeration(k, max_len);
  SideContext ca(a, use_pr_a), cb(b, use_pr_b);

  double total = 0.0;
  auto rec = [&](auto&& self, SideCursor cura, SideCursor curb, int depth) -> void {
    total += std::fabs(side_value(ca, cura) - side_value(cb, curb));
    if (depth == max_len) return;
    for (int x = 0; x < k; ++x)
      self(self, side_child(ca, cura, x), side_child(cb, curb, x), depth + 1);
  };
  SideCursor ra, rb;
  if (use_pr_a) ra.node = ca.engine->root(); else ra.forward = a.initial_vector();
  if (use_pr_b) rb.node = cb.engine->root(); else rb.forward = b.initial_vector();
  rec(rec, std::move(ra), std::move(rb), 0);
  return total;
}

std::vector<double> values_on_support(const WeightedAutomaton& a,
                                      const EmpiricalDistribution& dist,
                                      bool use_pr) {
  if (!(dist.alphabet() == a.alphabet()))
    throw std::invalid_argument("values_on_support: support alphabet differs");
  SideContext ctx(a, use_pr);
  std::vector<double> out(dist.nodes().size(), 0.0);
  auto rec = [&](auto&& self, int node, SideCursor cur) -> void {
    out[node] = side_value(ctx, cur);
    for (const auto& [x, child] : dist.nodes()[node].children)
      self(self, child, side_child(ctx, cur, x));
  };
  SideCursor root;
  if (use_pr) root.node = ctx.engine->root(); else root.forward = a.initial_vector();
  rec(rec, 0, std::move(root));
  return out;
}

double d1_from_values(const EmpiricalDistribution& dist,
                      const std::vector<double>& va,
                      const std::vector<double>& vb) {
  if (va.size() != dist.nodes().size() || vb.size() != dist.nodes().size())
    throw std::invalid_argument("d1_from_values: value vector size mismatch");
  double total = 0.0;
  auto rec = [&](auto&& self, int node) -> void {
    if (dist.nodes()[node].words > 0) total += std::fabs(va[node] - vb[node]);
    for (const auto& [x, child] : dist.nodes()[node].children) self(self, child);
  };
  rec(rec, 0);
  return total;
}

double d1_on_support(const WeightedAutomaton& a, const WeightedAutomaton& b,
                     const Sample& support, bool use_pr_a, bool use_pr_b) {
  if (!(a.alphabet() == b.alphabet()))
    throw std::invalid_argument("d1_on_support: alphabets differ");
  if (!(support.alphabet == a.alphabet()))
    throw std::invalid_argument("d1_on_support: support alphabet differs");
  if (support.words.empty()) return 0.0;
  EmpiricalDistribution dist(support);
  return d1_from_values(dist, values_on_support(a, dist, use_pr_a),
                        values_on_support(b, dist, use_pr_b));
}

WeightedAutomaton random_pa(int n_states, const Alphabet& alphabet,
                            double density, uint64_t seed) {
  if (n_states < 1) throw std::invalid_argument("random_pa: need at least one state");
  if (alphabet.size() < 1) throw std::invalid_argument("random_pa: empty alphabet");
  if (!(density >= 0.0 && density <= 1.0))
    throw std::invalid_argument("random_pa: density outside [0,1]");
  int n = n_states, k = alphabet.size();
  Rng rng(seed);

  std::vector<std::vector<std::vector<bool>>> present(
      n, std::vector<std::vector<bool>>(k, std::vector<bool>(n, false)));
  for (int i = 1; i < n; ++i) {
    int src = rng.below(i);
    int sym = rng.below(k);
    present[src][sym][i] = true;
  }
  for (int src = 0; src < n; ++src)
    for (int sym = 0; sym < k; ++sym)
      if (rng.next_double() < density) present[src][sym][rng.below(n)] = true;

  std::vector<double> stop(n);
  std::vector<std::vector<std::vector<double>>> weight(
      n, std::vector<std::vector<double>>(k, std::vector<double>(n, 0.0)));
  for (int src = 0; src < n; ++src) {
    double raw_stop = std::max(rng.next_double(), 0.01);
    double total = raw_stop;
    for (int sym = 0; sym < k; ++sym)
      for (int dst = 0; dst < n; ++dst)
        if (present[src][sym][dst]) {
          weight[src][sym][dst] = rng.next_double();
          total += weight[src][sym][dst];
        }
    stop[src] = raw_stop / total;
    for (int sym = 0; sym < k; ++sym)
      for (int dst = 0; dst < n; ++dst)
        if (present[src][sym][dst]) weight[src][sym][dst] /= total;
  }

  WeightedAutomaton wa(alphabet);
  for (int i = 0; i < n; ++i)
    wa.add_state("q" + std::to_string(i), i == 0 ? 1.0 : 0.0, stop[i]);
  for (int src = 0; src < n; ++src)
    for (int sym = 0; sym < k; ++sym)
      for (int dst = 0; dst < n; ++dst)
        if (present[src][sym][dst]) wa.add_transition(src, sym, dst, weight[src][sym][dst]);
  return wa;
}

}  // namespace rsl
