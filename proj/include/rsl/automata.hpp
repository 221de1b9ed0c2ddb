// automata.hpp - weighted automata over finite alphabets: the data model,
// series evaluation, trimming, module reduction, and the pseudo-stochastic
// decision, plus the text format the tools exchange.
#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rsl/numkit.hpp"

namespace rsl {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Prefix mass of the series is only defined when the letter-summed matrix
// has spectral radius below one.
struct SpectralRadiusNotLtOne : std::runtime_error {
  explicit SpectralRadiusNotLtOne(const std::string& msg) : std::runtime_error(msg) {}
};

// Ordered set of distinct symbol names; indices follow declaration order.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::string& symbol(int i) const { return symbols_.at(i); }
  // -1 when the name is not a symbol.
  int index(const std::string& name) const;
  const std::vector<std::string>& symbols() const { return symbols_; }
  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int> index_;
};

// A word is a sequence of symbol indices into some alphabet.
using Word = std::vector<int>;

// Shorter words first, ties by symbol index order.
bool length_lex_less(const Word& a, const Word& b);
struct LengthLexLess {
  bool operator()(const Word& a, const Word& b) const { return length_lex_less(a, b); }
};

// "eps" for the empty word; plain concatenation when every symbol is a
// single character, dot-joined otherwise.
std::string format_word(const Alphabet& a, const Word& w);
Word parse_word(const Alphabet& a, const std::string& text);

// Weighted automaton with real initial, final, and transition weights.
// States and transitions keep their insertion order.
class WeightedAutomaton {
 public:
  WeightedAutomaton() = default;
  explicit WeightedAutomaton(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  const Alphabet& alphabet() const { return alphabet_; }
  int num_states() const { return static_cast<int>(names_.size()); }

  int add_state(const std::string& name, double initial, double final_weight);
  void add_transition(int src, int sym, int dst, double weight);

  const std::string& state_name(int q) const { return names_.at(q); }
  // -1 when the name is not a state.
  int state_index(const std::string& name) const;
  double initial(int q) const { return initial_.at(q); }
  double final_weight(int q) const { return final_.at(q); }
  // Outgoing arcs of q on symbol x as (destination, weight) pairs.
  const std::vector<std::pair<int, double>>& arcs(int q, int x) const {
    return arcs_.at(q).at(x);
  }

  std::vector<double> initial_vector() const { return initial_; }
  std::vector<double> final_vector() const { return final_; }
  Matrix symbol_matrix(int x) const;
  // Sum of the per-symbol matrices.
  Matrix letter_sum_matrix() const;

 private:
  Alphabet alphabet_;
  std::vector<std::string> names_;
  std::map<std::string, int> name_index_;
  std::vector<double> initial_;
  std::vector<double> final_;
  std::vector<std::vector<std::vector<std::pair<int, double>>>> arcs_;
};

// Series value of a single word: initial row times the transition matrices
// times the final column.
double evaluate(const WeightedAutomaton& a, const Word& w);

// Per-state series totals: the solution of (I - M) s = final, where M is the
// letter-summed matrix.  Requires spectral radius below one.
std::vector<double> state_series(const WeightedAutomaton& a);

// Total series mass over all words (initial row dotted with state_series).
double series_sum(const WeightedAutomaton& a);

// Series mass of all words extending prefix w.
double evaluate_prefix(const WeightedAutomaton& a, const Word& w);

// Drops states that are not both accessible through nonzero weights and
// co-accessible to a nonzero final weight.  Preserves every series value.
WeightedAutomaton trim(const WeightedAutomaton& a);

// Minimal-dimension equivalent automaton over the forward and backward
// modules (rank tolerance 1e-9).  Preserves every series value.
WeightedAutomaton reduce(const WeightedAutomaton& a);

struct PslCertificate {
  bool verdict = false;
  int reduced_dimension = 0;
  double spectral_radius_value = 0.0;
  double series_total = 0.0;  // NaN when the radius test already failed
};

// Decides whether the series is pseudo-stochastic: the reduced automaton
// must have letter-sum spectral radius below one and total series mass one
// (within 1e-6).  Propagates Undecided from the radius test.
PslCertificate is_pseudo_stochastic(const WeightedAutomaton& a);

// Probabilistic automaton checks: weights in [0,1], initial mass one, each
// state's final weight plus outgoing mass one (all within 1e-9), and the
// automaton trimmed.
bool validate_pa(const WeightedAutomaton& a);
// validate_pa plus determinism: one initial state, at most one arc per
// (state, symbol).
bool validate_pda(const WeightedAutomaton& a);

// Text format:
//   ma v1
//   alphabet a b
//   state NAME init=NUM final=NUM
//   trans SRC SYM DST NUM
// NUM is a decimal or a p/q fraction; '#' opens a comment; declaration order
// fixes state indices.
WeightedAutomaton parse_ma(std::istream& in);
std::string format_ma(const WeightedAutomaton& a);
WeightedAutomaton load_ma(const std::string& path);
void save_ma(const WeightedAutomaton& a, const std::string& path);

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);
// Decimal or p/q fraction.
double parse_number(const std::string& text);

}  // namespace rsl
