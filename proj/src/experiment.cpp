#include "rsl/experiment.hpp"

#include <chrono>
#include <memory>
#include <cstdlib>
#include <sstream>

#include "rsl/baselines.hpp"
#include "rsl/dees.hpp"
#include "rsl/evalkit.hpp"
#include "rsl/fixtures.hpp"
#include "rsl/rng.hpp"

namespace rsl {

const char kExpPaFig3[] = "exp-pa-fig3";
const char kExpNonrationalFig2[] = "exp-nonrational-fig2";
const char kExpRandomPa[] = "exp-random-pa";

namespace {

constexpr int kSupportDraws = 50000;
constexpr int kTruncatedLen = 15;
constexpr uint64_t kInfraStreamBase = 1000000000ULL;

const std::vector<int> kStandardSizes{100, 500, 1000, 2000, 5000, 10000};
constexpr int kStandardTrials = 10;

enum class Algo { Dees, Alergia, Mdi };

const char* algo_name(Algo a) {
  switch (a) {
    case Algo::Dees: return "dees";
    case Algo::Alergia: return "alergia";
    case Algo::Mdi: return "mdi";
  }
  return "?";
}

// How a target is measured: through its raw series or its p_r, and either
// by full enumeration up to length 15 or on a generated support (the
// default for alphabets beyond two letters, where enumeration explodes).
struct TargetSetup {
  WeightedAutomaton automaton;
  std::string id;
  bool target_pr = false;
  bool support_based = false;
  Sample support;
  // Support trie and the target's values on it, shared by every cell that
  // measures against this target.
  std::shared_ptr<const EmpiricalDistribution> support_dist;
  std::vector<double> support_target_vals;
};

void prepare_support(TargetSetup& setup) {
  setup.support_dist = std::make_shared<EmpiricalDistribution>(setup.support);
  setup.support_target_vals =
      values_on_support(setup.automaton, *setup.support_dist, setup.target_pr);
}

bool learner_uses_pr(const WeightedAutomaton& learner) {
  if (validate_pa(learner)) return false;  // p_r coincides with the series
  try {
    return is_pseudo_stochastic(learner).verdict;
  } catch (const NumericError&) {
    return false;
  }
}

double measure_d1(const TargetSetup& setup, const WeightedAutomaton& learner) {
  bool learner_pr = learner_uses_pr(learner);
  if (setup.support_based)
    return d1_from_values(*setup.support_dist, setup.support_target_vals,
                          values_on_support(learner, *setup.support_dist, learner_pr));
  return d1_truncated(setup.automaton, learner, kTruncatedLen, setup.target_pr,
                      learner_pr);
}

WeightedAutomaton learn(Algo algo, const Sample& sample,
                        const ExperimentOptions& options, double& param_out) {
  switch (algo) {
    case Algo::Dees: {
      DeesConfig cfg;
      cfg.fixed_epsilon = options.dees_epsilon;
      cfg.keep_systems = false;
      auto [wa, trace] = dees_infer(sample, cfg);
      param_out = trace.epsilon;
      return wa;
    }
    case Algo::Alergia:
      param_out = options.alergia_alpha;
      return alergia_infer(sample, options.alergia_alpha);
    case Algo::Mdi:
      param_out = options.mdi_gamma;
      return mdi_infer(sample, options.mdi_gamma);
  }
  throw std::logic_error("unknown algorithm");
}

ExperimentRecord run_cell(const std::string& exp_id, const TargetSetup& setup,
                          Algo algo, int size_idx, int n, int trial,
                          const ExperimentOptions& options) {
  uint64_t stream = static_cast<uint64_t>(static_cast<int>(algo)) * 1000000 +
                    static_cast<uint64_t>(size_idx) * 1000 +
                    static_cast<uint64_t>(trial);
  Sample sample = sample_from(setup.automaton, n, derive_seed(options.seed, stream));

  ExperimentRecord rec;
  rec.experiment = exp_id;
  rec.target = setup.id;
  rec.algo = algo_name(algo);
  rec.n = n;
  rec.trial = trial;
  auto t0 = std::chrono::steady_clock::now();
  WeightedAutomaton learner = learn(algo, sample, options, rec.param);
  auto t1 = std::chrono::steady_clock::now();
  rec.seconds =
      options.wall_time ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
  rec.states = learner.num_states();
  rec.d1 = measure_d1(setup, learner);
  return rec;
}

std::vector<ExperimentRecord> run_standard_grid(const std::string& exp_id,
                                                const TargetSetup& setup,
                                                const std::vector<Algo>& algos,
                                                const ExperimentOptions& options) {
  std::vector<ExperimentRecord> out;
  for (Algo algo : algos)
    for (size_t si = 0; si < kStandardSizes.size(); ++si)
      for (int trial = 0; trial < kStandardTrials; ++trial)
        out.push_back(run_cell(exp_id, setup, algo, static_cast<int>(si),
                               kStandardSizes[si], trial, options));
  return out;
}

std::vector<ExperimentRecord> run_random_pa(const ExperimentOptions& options) {
  Alphabet abc({"a", "b", "c"});
  std::vector<TargetSetup> setups;
  for (int n_states = 2; n_states <= 25; ++n_states) {
    TargetSetup setup;
    setup.automaton = random_pa(n_states, abc, 0.15,
                                derive_seed(options.seed, kInfraStreamBase + 100 + n_states));
    setup.id = "random-pa-" + std::to_string(n_states);
    setup.support_based = true;
    setup.support = sample_from(setup.automaton, kSupportDraws,
                                derive_seed(options.seed, kInfraStreamBase + 200 + n_states));
    prepare_support(setup);
    setups.push_back(std::move(setup));
  }
  std::vector<ExperimentRecord> out;
  for (Algo algo : {Algo::Dees, Algo::Alergia})
    for (int n_states = 2; n_states <= 25; ++n_states)
      for (int trial = 0; trial < 5; ++trial)
        out.push_back(run_cell(kExpRandomPa, setups[n_states - 2], algo,
                               n_states - 2, 300 * n_states, trial, options));
  return out;
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const std::string& id,
                                             const ExperimentOptions& options) {
  if (id == kExpPaFig3) {
    TargetSetup setup;
    setup.automaton = golden_pa();
    setup.id = "golden-pa";
    return run_standard_grid(id, setup, {Algo::Dees, Algo::Alergia, Algo::Mdi},
                             options);
  }
  if (id == kExpNonrationalFig2) {
    TargetSetup setup;
    setup.automaton = nonrational_target();
    setup.id = "nonrational-pr";
    setup.target_pr = true;
    setup.support_based = true;
    setup.support = sample_from(setup.automaton, kSupportDraws,
                                derive_seed(options.seed, kInfraStreamBase + 1));
    prepare_support(setup);
    return run_standard_grid(id, setup, {Algo::Dees, Algo::Alergia, Algo::Mdi},
                             options);
  }
  if (id == kExpRandomPa) return run_random_pa(options);
  throw std::invalid_argument("unknown experiment: " + id);
}

std::vector<ExperimentRecord> run_custom_experiment(const WeightedAutomaton& target,
                                                    const std::string& target_id,
                                                    const ExperimentOptions& options) {
  TargetSetup setup;
  setup.automaton = target;
  setup.id = target_id;
  setup.target_pr = !validate_pa(target);
  setup.support_based = target.alphabet().size() > 2;
  if (setup.support_based) {
    setup.support = sample_from(target, kSupportDraws,
                                derive_seed(options.seed, kInfraStreamBase + 1));
    prepare_support(setup);
  }
  return run_standard_grid("custom", setup, {Algo::Dees, Algo::Alergia, Algo::Mdi},
                           options);
}

std::string format_records(const std::vector<ExperimentRecord>& records) {
  std::ostringstream out;
  out << "experiment,target,algo,param,n,trial,states,d1,seconds\n";
  for (const ExperimentRecord& r : records)
    out << r.experiment << ',' << r.target << ',' << r.algo << ','
        << format_double(r.param) << ',' << r.n << ',' << r.trial << ','
        << r.states << ',' << format_double(r.d1) << ','
        << format_double(r.seconds) << '\n';
  return out.str();
}

std::vector<ExperimentRecord> parse_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      (line != "experiment,target,algo,param,n,trial,states,d1,seconds" &&
       line != "experiment,target,algo,param,n,trial,states,d1,seconds\r"))
    throw ParseError("line 1: expected the record header");
  std::vector<ExperimentRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 9)
      throw ParseError("line " + std::to_string(lineno) + ": expected 9 fields");
    ExperimentRecord r;
    r.experiment = fields[0];
    r.target = fields[1];
    r.algo = fields[2];
    try {
      r.param = parse_number(fields[3]);
      r.n = std::stoi(fields[4]);
      r.trial = std::stoi(fields[5]);
      r.states = std::stoi(fields[6]);
      r.d1 = parse_number(fields[7]);
      r.seconds = parse_number(fields[8]);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(lineno) + ": malformed number");
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace rsl
