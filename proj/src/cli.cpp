#include "rsl/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "rsl/automata.hpp"
#include "rsl/baselines.hpp"
#include "rsl/dees.hpp"
#include "rsl/evalkit.hpp"
#include "rsl/experiment.hpp"
#include "rsl/psl.hpp"

namespace rsl {

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// Print to stdout unless an output path was given.
void emit(const std::string& text, const std::string& out_path,
          std::ostream& out) {
  if (out_path.empty())
    out << text;
  else
    write_text(out_path, text);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"rational and pseudo-stochastic language toolkit"};
  app.name("rsl");
  app.require_subcommand(1);

  std::string file, word_text, out_path, trace_path, target_path;
  int draws = 0;
  int max_len = 12;
  uint64_t seed = 0;
  bool use_pr = false;
  bool wall_time = false;
  std::optional<double> param;

  CLI::App* ma = app.add_subcommand("ma", "automaton utilities");
  ma->require_subcommand(1);

  CLI::App* check = ma->add_subcommand("check", "pseudo-stochastic certificate");
  check->add_option("file", file, "automaton file")->required();
  check->callback([&] {
    PslCertificate cert = is_pseudo_stochastic(load_ma(file));
    out << "verdict " << (cert.verdict ? "true" : "false") << "\n"
        << "dimension " << cert.reduced_dimension << "\n"
        << "radius " << format_double(cert.spectral_radius_value) << "\n"
        << "total " << format_double(cert.series_total) << "\n";
  });

  CLI::App* eval = ma->add_subcommand("eval", "value of one word");
  eval->add_option("file", file, "automaton file")->required();
  eval->add_option("word", word_text, "word (eps for the empty word)")->required();
  eval->add_flag("--pr", use_pr, "evaluate p_r instead of the raw series");
  eval->callback([&] {
    WeightedAutomaton a = load_ma(file);
    Word w = parse_word(a.alphabet(), word_text);
    double v = use_pr ? pr_evaluate(a, w).first : evaluate(a, w);
    out << format_double(v) << "\n";
  });

  CLI::App* prefix = ma->add_subcommand("prefix", "mass of a prefix set u*");
  prefix->add_option("file", file, "automaton file")->required();
  prefix->add_option("word", word_text, "prefix (eps for the empty word)")->required();
  prefix->add_flag("--pr", use_pr, "measure p_r instead of the raw series");
  prefix->callback([&] {
    WeightedAutomaton a = load_ma(file);
    Word w = parse_word(a.alphabet(), word_text);
    double v = use_pr ? pr_evaluate(a, w).second : evaluate_prefix(a, w);
    out << format_double(v) << "\n";
  });

  CLI::App* sum = ma->add_subcommand("sum", "total series mass");
  sum->add_option("file", file, "automaton file")->required();
  sum->callback([&] { out << format_double(series_sum(load_ma(file))) << "\n"; });

  CLI::App* reduce_cmd = ma->add_subcommand("reduce", "minimal-dimension form");
  reduce_cmd->add_option("file", file, "automaton file")->required();
  reduce_cmd->add_option("--out", out_path, "output file (default stdout)");
  reduce_cmd->callback(
      [&] { emit(format_ma(reduce(load_ma(file))), out_path, out); });

  CLI::App* sample_cmd = ma->add_subcommand("sample", "draw words");
  sample_cmd->add_option("file", file, "automaton file")->required();
  sample_cmd->add_option("n", draws, "number of draws")->required();
  sample_cmd->add_option("--seed", seed, "root seed (default 0)");
  sample_cmd->add_option("--out", out_path, "output file (default stdout)");
  sample_cmd->callback([&] {
    emit(format_sample(sample_from(load_ma(file), draws, seed)), out_path, out);
  });

  CLI::App* nr = ma->add_subcommand("nr", "negative-mass diagnostics");
  nr->add_option("file", file, "automaton file")->required();
  nr->add_option("--max-len", max_len, "truncation length (default 12)");
  nr->callback([&] {
    NrMassResult res = nr_mass(load_ma(file), max_len);
    out << "nr " << format_double(res.nr_truncated) << "\n"
        << "d1 " << format_double(res.d1_r_pr_truncated) << "\n"
        << "gap " << format_double(res.residual_gap) << "\n";
  });

  CLI::App* infer = app.add_subcommand("infer", "learn an automaton from a sample");
  std::string algo;
  infer->add_option("algo", algo, "dees, alergia, or mdi")
      ->required()
      ->check(CLI::IsMember({"dees", "alergia", "mdi"}));
  infer->add_option("sample", file, "sample file")->required();
  infer->add_option("--param", param,
                    "epsilon (dees, default |S|^-1/3), alpha (alergia, "
                    "default 0.05), or gamma (mdi, default 0.02)");
  infer->add_option("--out", out_path, "output file (default stdout)");
  infer->add_option("--trace", trace_path, "decision trace file (dees only)");
  infer->callback([&] {
    Sample sample = load_sample(file);
    WeightedAutomaton model;
    if (algo == "dees") {
      DeesConfig cfg;
      cfg.fixed_epsilon = param;
      auto [wa, trace] = dees_infer(sample, cfg);
      model = wa;
      if (!trace_path.empty())
        write_text(trace_path, format_trace(trace, sample.alphabet));
    } else {
      if (!trace_path.empty())
        throw std::invalid_argument("only dees produces a trace");
      model = algo == "alergia" ? alergia_infer(sample, param.value_or(0.05))
                                : mdi_infer(sample, param.value_or(0.02));
    }
    emit(format_ma(model), out_path, out);
  });

  CLI::App* experiment = app.add_subcommand("experiment", "batch learner runs");
  experiment->require_subcommand(1);
  CLI::App* run = experiment->add_subcommand("run", "run a grid, emit CSV");
  std::string exp_id;
  ExperimentOptions options;
  run->add_option("id", exp_id,
                  "exp-pa-fig3, exp-nonrational-fig2, exp-random-pa, or "
                  "custom (with --target)")
      ->required();
  run->add_option("--target", target_path, "target automaton for a custom run");
  run->add_option("--seed", options.seed, "root seed (default 0)");
  run->add_option("--alpha", options.alergia_alpha, "alergia parameter");
  run->add_option("--gamma", options.mdi_gamma, "mdi parameter");
  run->add_option("--epsilon", options.dees_epsilon,
                  "dees tolerance (default |S|^-1/3)");
  run->add_flag("--wall-time", wall_time, "record real inference times");
  run->add_option("--out", out_path, "output file (default stdout)");
  run->callback([&] {
    options.wall_time = wall_time;
    std::vector<ExperimentRecord> records;
    if (exp_id == "custom") {
      if (target_path.empty())
        throw std::invalid_argument("custom experiment needs --target");
      records = run_custom_experiment(
          load_ma(target_path),
          std::filesystem::path(target_path).stem().string(), options);
    } else {
      if (!target_path.empty())
        throw std::invalid_argument("--target requires the custom experiment");
      records = run_experiment(exp_id, options);
    }
    emit(format_records(records), out_path, out);
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rsl
