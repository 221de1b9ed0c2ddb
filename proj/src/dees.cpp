#include "rsl/dees.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace rsl {

ConstraintSystem build_constraint_system(const std::vector<Word>& q, const Word& v,
                                         const EmpiricalDistribution& dist,
                                         double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  auto residual_base = [&](const Word& u) {
    long long c = dist.prefix_count(u);
    if (c == 0)
      throw ZeroPrefixMass("no sample word starts with " +
                           format_word(dist.alphabet(), u));
    return static_cast<double>(c) / static_cast<double>(dist.total());
  };
  double v_mass = residual_base(v);
  std::vector<double> q_mass;
  q_mass.reserve(q.size());
  for (const Word& u : q) q_mass.push_back(residual_base(u));

  ConstraintSystem sys;
  sys.num_vars = static_cast<int>(q.size());
  auto extend = [](const Word& a, const Word& b) {
    Word out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
  };
  for (const Word& w : dist.factors()) {
    AbsRow row;
    row.target = dist.prefix_prob(extend(v, w)) / v_mass;
    row.coeffs.reserve(q.size());
    for (size_t i = 0; i < q.size(); ++i)
      row.coeffs.push_back(dist.prefix_prob(extend(q[i], w)) / q_mass[i]);
    row.bound = epsilon;
    sys.abs_rows.push_back(std::move(row));
  }
  sys.eq_rows.push_back(EqRow{std::vector<double>(q.size(), 1.0), 1.0});
  return sys;
}

namespace {

// Residual machinery shared by one inference run: the sample trie flattened
// to an array so cursor advances are loads, and the factor trie giving the
// row index set.  resid(u)[f] equals the constraint-system entry
// P_S(u w_f Sigma*)/P_S(u Sigma*) bit for bit.
struct ResidualTable {
  const EmpiricalDistribution& dist;
  const std::vector<EmpiricalDistribution::FactorNode>& trie;
  int k;
  std::vector<int> flat_child;

  explicit ResidualTable(const EmpiricalDistribution& d)
      : dist(d), trie(d.factor_nodes()), k(d.alphabet().size()) {
    const auto& nodes = dist.nodes();
    flat_child.assign(nodes.size() * static_cast<size_t>(k), -1);
    for (size_t i = 0; i < nodes.size(); ++i)
      for (const auto& [x, child] : nodes[i].children)
        flat_child[i * static_cast<size_t>(k) + x] = child;
  }

  int node_of(const Word& u) const {
    int cur = 0;
    for (int x : u) {
      cur = flat_child[static_cast<size_t>(cur) * k + x];
      if (cur < 0) return -1;
    }
    return cur;
  }

  std::vector<double> residuals(int base_node) const {
    const auto& nodes = dist.nodes();
    double total = static_cast<double>(dist.total());
    double base_mass =
        static_cast<double>(nodes[base_node].prefixes) / total;
    std::vector<int> cur(trie.size());
    std::vector<double> out(trie.size());
    cur[0] = base_node;
    out[0] = (static_cast<double>(nodes[base_node].prefixes) / total) / base_mass;
    for (size_t f = 1; f < trie.size(); ++f) {
      int p = cur[trie[f].parent];
      int c = p < 0 ? -1
                    : flat_child[static_cast<size_t>(p) * k + trie[f].symbol];
      cur[f] = c;
      double mass =
          c < 0 ? 0.0 : static_cast<double>(nodes[c].prefixes) / total;
      out[f] = mass / base_mass;
    }
    return out;
  }
};

// Feasibility of the residual system by cutting planes: solve the system
// restricted to an active row set, then scan every row for a violation
// exceeding the active optimum; when none does, the witness is optimal for
// the full system and the verdict matches solving it whole.
FeasibilityResult solve_residual_system(
    const std::vector<std::vector<double>>& state_resid,
    const std::vector<double>& v_resid, double epsilon) {
  size_t m = state_resid.size();
  size_t rows = v_resid.size();
  std::vector<char> in_active(rows, 0);
  std::vector<size_t> active{0};
  in_active[0] = 1;
  std::vector<double> combo(rows);

  for (;;) {
    ConstraintSystem sys;
    sys.num_vars = static_cast<int>(m);
    for (size_t f : active) {
      AbsRow row;
      row.target = v_resid[f];
      row.coeffs.reserve(m);
      for (size_t j = 0; j < m; ++j) row.coeffs.push_back(state_resid[j][f]);
      row.bound = epsilon;
      sys.abs_rows.push_back(std::move(row));
    }
    sys.eq_rows.push_back(EqRow{std::vector<double>(m, 1.0), 1.0});
    FeasibilityResult res;
    try {
      res = lp_feasible(sys);
    } catch (const NumericError&) {
      // Both LP routes broke down, so feasibility cannot be certified; treat
      // the word as a new state rather than aborting the whole inference.
      return {false, {}};
    }
    if (!res.feasible) return {false, {}};

    std::fill(combo.begin(), combo.end(), 0.0);
    for (size_t j = 0; j < m; ++j) {
      double c = res.witness[j];
      if (c == 0.0) continue;
      const std::vector<double>& s = state_resid[j];
      for (size_t f = 0; f < rows; ++f) combo[f] += c * s[f];
    }
    double worst = -1.0, active_worst = -1.0;
    size_t worst_f = 0;
    for (size_t f = 0; f < rows; ++f) {
      double viol = std::fabs(v_resid[f] - combo[f]);
      if (viol > worst) {
        worst = viol;
        worst_f = f;
      }
      if (in_active[f] && viol > active_worst) active_worst = viol;
    }
    if (in_active[worst_f] || worst <= active_worst + 1e-12)
      return {worst <= epsilon + 1e-9, std::move(res.witness)};
    in_active[worst_f] = 1;
    active.push_back(worst_f);
  }
}

}  // namespace

std::pair<WeightedAutomaton, DeesTrace> dees_infer(const Sample& sample,
                                                   const DeesConfig& config) {
  if (sample.words.empty()) throw std::invalid_argument("dees_infer: empty sample");
  if (config.max_states < 1) throw std::invalid_argument("dees_infer: state cap below one");
  EmpiricalDistribution dist(sample);
  const Alphabet& alphabet = sample.alphabet;
  int k = alphabet.size();

  DeesTrace trace;
  trace.epsilon = config.fixed_epsilon
                      ? *config.fixed_epsilon
                      : std::pow(static_cast<double>(dist.total()), -1.0 / 3.0);
  if (!(trace.epsilon > 0.0))
    throw std::invalid_argument("dees_infer: epsilon must be positive");

  ResidualTable table(dist);
  long long system_rows =
      static_cast<long long>(table.trie.size()) + 1;

  WeightedAutomaton wa(alphabet);
  std::vector<Word> states{Word{}};
  std::vector<std::vector<double>> state_resid{table.residuals(0)};
  wa.add_state(format_word(alphabet, {}), 1.0, dist.word_prob({}));

  std::set<Word, LengthLexLess> frontier;
  for (int x = 0; x < k; ++x)
    if (dist.prefix_count({x}) > 0) frontier.insert({x});

  while (!frontier.empty()) {
    Word v = *frontier.begin();
    frontier.erase(frontier.begin());
    Word parent(v.begin(), v.end() - 1);
    int sym = v.back();
    int parent_idx = wa.state_index(format_word(alphabet, parent));
    double ratio = dist.prefix_prob(v) / dist.prefix_prob(parent);

    DeesDecision decision;
    decision.frontier_word = v;
    decision.num_vars = static_cast<int>(states.size());
    decision.num_rows = system_rows;
    if (config.keep_systems)
      decision.system = build_constraint_system(states, v, dist, trace.epsilon);
    std::vector<double> v_resid = table.residuals(table.node_of(v));
    FeasibilityResult result =
        solve_residual_system(state_resid, v_resid, trace.epsilon);
    if (result.feasible) {
      decision.coefficients = result.witness;
      for (size_t i = 0; i < states.size(); ++i) {
        double w = result.witness[i] * ratio;
        if (w != 0.0) wa.add_transition(parent_idx, sym, static_cast<int>(i), w);
      }
    } else {
      decision.new_state = true;
      if (static_cast<int>(states.size()) >= config.max_states)
        throw StateCapExceeded("state cap " + std::to_string(config.max_states) +
                               " reached at " + format_word(alphabet, v));
      int idx = wa.add_state(format_word(alphabet, v), 0.0,
                             dist.word_prob(v) / dist.prefix_prob(v));
      states.push_back(v);
      state_resid.push_back(std::move(v_resid));
      wa.add_transition(parent_idx, sym, idx, ratio);
      for (int x = 0; x < k; ++x) {
        Word vx = v;
        vx.push_back(x);
        if (dist.prefix_count(vx) > 0) frontier.insert(std::move(vx));
      }
    }
    trace.decisions.push_back(std::move(decision));
  }

  try {
    trace.certificate = is_pseudo_stochastic(wa);
  } catch (const NumericError&) {
    // Spectral margin undecided, or the series solve broke down on a
    // near-singular hypothesis; either way there is no certificate.
    trace.psl_undecided = true;
  }
  return {std::move(wa), std::move(trace)};
}

std::string format_trace(const DeesTrace& trace, const Alphabet& alphabet) {
  std::ostringstream out;
  out << "dees v1\n";
  out << "epsilon " << format_double(trace.epsilon) << '\n';
  for (const DeesDecision& d : trace.decisions) {
    out << "decision " << format_word(alphabet, d.frontier_word) << " vars="
        << d.num_vars << " rows=" << d.num_rows;
    if (d.new_state) {
      out << " new-state";
    } else {
      out << " combination";
      for (double c : d.coefficients) out << ' ' << format_double(c);
    }
    out << '\n';
  }
  if (trace.psl_undecided) {
    out << "psl undecided\n";
  } else {
    out << "psl " << (trace.certificate.verdict ? "true" : "false")
        << " dimension=" << trace.certificate.reduced_dimension
        << " radius=" << format_double(trace.certificate.spectral_radius_value)
        << " series=" << format_double(trace.certificate.series_total) << '\n';
  }
  return out.str();
}

}  // namespace rsl
