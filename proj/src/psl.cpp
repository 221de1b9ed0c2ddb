#include "rsl/psl.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>

namespace rsl {

namespace {

constexpr size_t kSampleLengthCap = 1000000;
constexpr double kEnumerationGuard = 1e7;

}  // namespace

PrEngine::PrEngine(const WeightedAutomaton& a) {
  cert_ = is_pseudo_stochastic(a);
  if (!cert_.verdict) {
    std::ostringstream msg;
    msg << "not a pseudo-stochastic series: ";
    if (cert_.reduced_dimension == 0)
      msg << "the series is identically zero";
    else if (std::isnan(cert_.series_total))
      msg << "reduced spectral radius " << cert_.spectral_radius_value << " is not below one";
    else
      msg << "total series mass " << cert_.series_total << " is not one";
    throw NotPseudoStochastic(msg.str());
  }
  // Walk the automaton as given when its own letter-sum matrix converges,
  // so exact inputs stay exact; otherwise fall back to the reduced form,
  // which the certificate guarantees converges.
  try {
    series_ = state_series(a);
    walk_ = a;
  } catch (const SpectralRadiusNotLtOne&) {
    walk_ = reduce(a);
    series_ = state_series(walk_);
  } catch (const NumericError&) {
    walk_ = reduce(a);
    series_ = state_series(walk_);
  }
  tau_ = walk_.final_vector();
  mats_.reserve(walk_.alphabet().size());
  for (int x = 0; x < walk_.alphabet().size(); ++x)
    mats_.push_back(walk_.symbol_matrix(x));
}

PrEngine::Node PrEngine::root() const {
  return Node{walk_.initial_vector(), 1.0, true};
}

PrEngine::Expansion PrEngine::expand(const Node& node) const {
  Expansion ex;
  ex.stop_raw = dot(node.forward, tau_);
  ex.stop_clamped = std::max(ex.stop_raw, 0.0);
  int k = walk_.alphabet().size();
  ex.branch_raw.resize(k);
  ex.branch_clamped.resize(k);
  ex.child_forward.resize(k);
  ex.normalizer = ex.stop_clamped;
  for (int x = 0; x < k; ++x) {
    ex.child_forward[x] = mats_[x].apply_left(node.forward);
    ex.branch_raw[x] = dot(ex.child_forward[x], series_);
    ex.branch_clamped[x] = std::max(ex.branch_raw[x], 0.0);
    ex.normalizer += ex.branch_clamped[x];
  }
  return ex;
}

PrEngine::Node PrEngine::child(const Node& node, const Expansion& ex, int x) const {
  Node c;
  c.forward = ex.child_forward[x];
  c.alive = node.alive && ex.branch_raw[x] > 0.0;
  c.cumulative = c.alive ? node.cumulative * (ex.branch_clamped[x] / ex.normalizer) : 0.0;
  return c;
}

std::pair<double, double> PrEngine::evaluate(const Word& u) const {
  Node cur = root();
  for (size_t i = 0;; ++i) {
    Expansion ex = expand(cur);
    if (ex.normalizer <= 0.0)
      throw DegenerateNormalizer("no positive mass at a reachable prefix");
    if (i == u.size())
      return {cur.cumulative * (ex.stop_clamped / ex.normalizer), cur.cumulative};
    if (ex.branch_raw[u[i]] <= 0.0) return {0.0, 0.0};
    cur = child(cur, ex, u[i]);
  }
}

std::vector<PrunedStep> PrEngine::steps(const Word& u) const {
  std::vector<PrunedStep> out;
  Node cur = root();
  Word prefix;
  for (size_t i = 0;; ++i) {
    Expansion ex = expand(cur);
    if (ex.normalizer <= 0.0)
      throw DegenerateNormalizer("no positive mass at a reachable prefix");
    out.push_back(PrunedStep{prefix, ex.stop_clamped, ex.branch_clamped,
                             ex.normalizer, cur.cumulative});
    if (i == u.size() || ex.branch_raw[u[i]] <= 0.0) return out;
    prefix.push_back(u[i]);
    cur = child(cur, ex, u[i]);
  }
}

Word PrEngine::sample(Rng& rng) const {
  Word u;
  Node cur = root();
  for (;;) {
    Expansion ex = expand(cur);
    if (ex.normalizer <= 0.0)
      throw DegenerateNormalizer("no positive mass at a reachable prefix");
    std::vector<double> weights;
    weights.reserve(ex.branch_clamped.size() + 1);
    weights.push_back(ex.stop_clamped);
    for (double w : ex.branch_clamped) weights.push_back(w);
    int pick = rng.categorical(weights);
    if (pick == 0) return u;
    if (u.size() >= kSampleLengthCap)
      throw std::runtime_error("pr_sample exceeded the word length cap");
    u.push_back(pick - 1);
    cur = child(cur, ex, pick - 1);
  }
}

NrMassResult PrEngine::nr_mass(int max_len) const {
  int k = walk_.alphabet().size();
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

  NrMassResult out;
  // The identity d1 = 2 nr + gap needs each word's r and p_r taken from the
  // same forward vector, so one walker feeds all three sums.  Pruned
  // subtrees still contribute their r values.
  struct Frame {
    Node node;
    Expansion ex;
    int next = 0;
  };
  std::vector<Frame> stack;
  stack.push_back(Frame{root(), {}, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next == 0) {
      double r, p;
      if (f.node.alive) {
        f.ex = expand(f.node);
        if (f.ex.normalizer <= 0.0)
          throw DegenerateNormalizer("no positive mass at a reachable prefix");
        r = f.ex.stop_raw;
        p = f.node.cumulative * (f.ex.stop_clamped / f.ex.normalizer);
      } else {
        r = dot(f.node.forward, tau_);
        p = 0.0;
      }
      if (r <= 0.0) out.nr_truncated += -r;
      out.d1_r_pr_truncated += std::fabs(r - p);
      out.residual_gap += r - p;
    }
    if (static_cast<int>(stack.size()) > max_len || f.next >= k) {
      stack.pop_back();
      continue;
    }
    int x = f.next++;
    Node c;
    if (f.node.alive) {
      c = child(f.node, f.ex, x);
    } else {
      c.forward = mats_[x].apply_left(f.node.forward);
      c.cumulative = 0.0;
      c.alive = false;
    }
    stack.push_back(Frame{std::move(c), {}, 0});
  }
  return out;
}

std::pair<double, double> pr_evaluate(const WeightedAutomaton& a, const Word& u) {
  return PrEngine(a).evaluate(u);
}

std::vector<PrunedStep> pr_steps(const WeightedAutomaton& a, const Word& u) {
  return PrEngine(a).steps(u);
}

Word pr_sample(const WeightedAutomaton& a, uint64_t seed) {
  PrEngine engine(a);
  Rng rng(seed);
  return engine.sample(rng);
}

NrMassResult nr_mass(const WeightedAutomaton& a, int max_len) {
  return PrEngine(a).nr_mass(max_len);
}

}  // namespace rsl
