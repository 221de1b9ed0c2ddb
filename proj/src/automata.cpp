// automata.cpp - weighted automata: evaluation, trimming, module reduction,
// the pseudo-stochastic decision, and the text format.
#include "rsl/automata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

namespace rsl {

namespace {

constexpr double kWeightTol = 1e-9;
constexpr double kRankTol = 1e-9;
constexpr double kSeriesTol = 1e-6;

void check_symbol_name(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty symbol name");
  if (s == "eps") throw std::invalid_argument("'eps' is reserved for the empty word");
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '#')
      throw std::invalid_argument("symbol name contains whitespace or '#': " + s);
}

void check_state_name(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty state name");
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '#')
      throw std::invalid_argument("state name contains whitespace or '#': " + s);
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  for (int i = 0; i < static_cast<int>(symbols_.size()); ++i) {
    check_symbol_name(symbols_[i]);
    if (!index_.emplace(symbols_[i], i).second)
      throw std::invalid_argument("duplicate symbol: " + symbols_[i]);
  }
}

int Alphabet::index(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

bool length_lex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string format_word(const Alphabet& a, const Word& w) {
  if (w.empty()) return "eps";
  bool single = true;
  for (const std::string& s : a.symbols())
    if (s.size() != 1) single = false;
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i > 0 && !single) out += '.';
    out += a.symbol(w[i]);
  }
  return out;
}

Word parse_word(const Alphabet& a, const std::string& text) {
  if (text.empty() || text == "eps") return {};
  int whole = a.index(text);
  if (whole >= 0) return {whole};
  Word w;
  if (text.find('.') != std::string::npos) {
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, '.')) {
      int i = a.index(tok);
      if (i < 0) throw ParseError("unknown symbol '" + tok + "' in word: " + text);
      w.push_back(i);
    }
    return w;
  }
  bool single = true;
  for (const std::string& s : a.symbols())
    if (s.size() != 1) single = false;
  if (!single) throw ParseError("cannot parse word: " + text);
  for (char c : text) {
    int i = a.index(std::string(1, c));
    if (i < 0) throw ParseError("unknown symbol '" + std::string(1, c) + "' in word: " + text);
    w.push_back(i);
  }
  return w;
}

int WeightedAutomaton::add_state(const std::string& name, double initial, double final_weight) {
  check_state_name(name);
  if (!std::isfinite(initial) || !std::isfinite(final_weight))
    throw std::invalid_argument("non-finite state weight for " + name);
  int q = num_states();
  if (!name_index_.emplace(name, q).second)
    throw std::invalid_argument("duplicate state name: " + name);
  names_.push_back(name);
  initial_.push_back(initial);
  final_.push_back(final_weight);
  arcs_.emplace_back(alphabet_.size());
  return q;
}

void WeightedAutomaton::add_transition(int src, int sym, int dst, double weight) {
  if (src < 0 || src >= num_states() || dst < 0 || dst >= num_states())
    throw std::invalid_argument("transition endpoint out of range");
  if (sym < 0 || sym >= alphabet_.size())
    throw std::invalid_argument("transition symbol out of range");
  if (!std::isfinite(weight)) throw std::invalid_argument("non-finite transition weight");
  for (const auto& [d, w] : arcs_[src][sym])
    if (d == dst)
      throw std::invalid_argument("duplicate transition " + names_[src] + " -" +
                                  alphabet_.symbol(sym) + "-> " + names_[dst]);
  arcs_[src][sym].emplace_back(dst, weight);
}

int WeightedAutomaton::state_index(const std::string& name) const {
  auto it = name_index_.find(name);
  return it == name_index_.end() ? -1 : it->second;
}

Matrix WeightedAutomaton::symbol_matrix(int x) const {
  int n = num_states();
  Matrix m(n, n);
  for (int q = 0; q < n; ++q)
    for (const auto& [dst, w] : arcs_[q][x]) m(q, dst) += w;
  return m;
}

Matrix WeightedAutomaton::letter_sum_matrix() const {
  int n = num_states();
  Matrix m(n, n);
  for (int q = 0; q < n; ++q)
    for (int x = 0; x < alphabet_.size(); ++x)
      for (const auto& [dst, w] : arcs_[q][x]) m(q, dst) += w;
  return m;
}

namespace {

std::vector<double> step_forward(const WeightedAutomaton& a, const std::vector<double>& e,
                                 int sym) {
  std::vector<double> out(a.num_states(), 0.0);
  for (int q = 0; q < a.num_states(); ++q) {
    if (e[q] == 0.0) continue;
    for (const auto& [dst, w] : a.arcs(q, sym)) out[dst] += e[q] * w;
  }
  return out;
}

}  // namespace

double evaluate(const WeightedAutomaton& a, const Word& w) {
  if (a.num_states() == 0) return 0.0;
  std::vector<double> e = a.initial_vector();
  for (int x : w) {
    if (x < 0 || x >= a.alphabet().size())
      throw std::invalid_argument("word symbol out of range");
    e = step_forward(a, e, x);
  }
  return dot(e, a.final_vector());
}

std::vector<double> state_series(const WeightedAutomaton& a) {
  int n = a.num_states();
  if (n == 0) return {};
  Matrix m = a.letter_sum_matrix();
  if (!is_spectral_radius_lt_one(m))
    throw SpectralRadiusNotLtOne("letter-sum spectral radius is not below one");
  Matrix system(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) system(i, j) = (i == j ? 1.0 : 0.0) - m(i, j);
  return solve_linear(system, a.final_vector());
}

double series_sum(const WeightedAutomaton& a) {
  if (a.num_states() == 0) return 0.0;
  return dot(a.initial_vector(), state_series(a));
}

double evaluate_prefix(const WeightedAutomaton& a, const Word& w) {
  if (a.num_states() == 0) return 0.0;
  std::vector<double> s = state_series(a);
  std::vector<double> e = a.initial_vector();
  for (int x : w) {
    if (x < 0 || x >= a.alphabet().size())
      throw std::invalid_argument("word symbol out of range");
    e = step_forward(a, e, x);
  }
  return dot(e, s);
}

WeightedAutomaton trim(const WeightedAutomaton& a) {
  int n = a.num_states();
  int k = a.alphabet().size();
  std::vector<char> forward(n, 0), backward(n, 0);
  std::deque<int> queue;
  for (int q = 0; q < n; ++q)
    if (a.initial(q) != 0.0) {
      forward[q] = 1;
      queue.push_back(q);
    }
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    for (int x = 0; x < k; ++x)
      for (const auto& [dst, w] : a.arcs(q, x))
        if (w != 0.0 && !forward[dst]) {
          forward[dst] = 1;
          queue.push_back(dst);
        }
  }
  std::vector<std::vector<int>> rev(n);
  for (int q = 0; q < n; ++q)
    for (int x = 0; x < k; ++x)
      for (const auto& [dst, w] : a.arcs(q, x))
        if (w != 0.0) rev[dst].push_back(q);
  for (int q = 0; q < n; ++q)
    if (a.final_weight(q) != 0.0) {
      backward[q] = 1;
      queue.push_back(q);
    }
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    for (int src : rev[q])
      if (!backward[src]) {
        backward[src] = 1;
        queue.push_back(src);
      }
  }
  std::vector<int> remap(n, -1);
  WeightedAutomaton out(a.alphabet());
  for (int q = 0; q < n; ++q)
    if (forward[q] && backward[q])
      remap[q] = out.add_state(a.state_name(q), a.initial(q), a.final_weight(q));
  for (int q = 0; q < n; ++q) {
    if (remap[q] < 0) continue;
    for (int x = 0; x < k; ++x)
      for (const auto& [dst, w] : a.arcs(q, x))
        if (remap[dst] >= 0) out.add_transition(remap[q], x, remap[dst], w);
  }
  return out;
}

namespace {

double inf_norm_vec(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Incremental row-space basis with expression of new vectors in terms of the
// stored basis.  Echelonized copies carry their coordinates over the basis
// so dependent vectors come back as exact combinations.
class RowBasis {
 public:
  explicit RowBasis(int dim) : dim_(dim) {}

  int size() const { return static_cast<int>(basis_.size()); }
  const std::vector<double>& vec(int i) const { return basis_[i]; }

  // Coordinates of u over the basis, or empty if u is independent
  // (relative residual above the rank tolerance).
  bool express(const std::vector<double>& u, std::vector<double>* coords) const {
    std::vector<double> residual = u;
    std::vector<double> d(ech_.size(), 0.0);
    for (size_t i = 0; i < ech_.size(); ++i) {
      double f = residual[pivot_[i]] / ech_[i][pivot_[i]];
      d[i] = f;
      if (f != 0.0)
        for (int j = 0; j < dim_; ++j) residual[j] -= f * ech_[i][j];
    }
    if (inf_norm_vec(residual) > kRankTol * std::max(1.0, inf_norm_vec(u))) return false;
    if (coords) {
      coords->assign(basis_.size(), 0.0);
      for (size_t i = 0; i < ech_.size(); ++i)
        for (size_t j = 0; j < basis_.size(); ++j) (*coords)[j] += d[i] * mix_[i][j];
    }
    return true;
  }

  // Appends u (scaled to unit infinity norm) as a basis vector.
  void add(const std::vector<double>& u) {
    double norm = inf_norm_vec(u);
    std::vector<double> v(dim_);
    for (int j = 0; j < dim_; ++j) v[j] = u[j] / norm;
    std::vector<double> residual = v;
    std::vector<double> d(ech_.size(), 0.0);
    for (size_t i = 0; i < ech_.size(); ++i) {
      double f = residual[pivot_[i]] / ech_[i][pivot_[i]];
      d[i] = f;
      if (f != 0.0)
        for (int j = 0; j < dim_; ++j) residual[j] -= f * ech_[i][j];
    }
    int piv = 0;
    for (int j = 1; j < dim_; ++j)
      if (std::fabs(residual[j]) > std::fabs(residual[piv])) piv = j;
    basis_.push_back(v);
    std::vector<double> mix(basis_.size(), 0.0);
    mix.back() = 1.0;
    for (size_t i = 0; i < ech_.size(); ++i)
      if (d[i] != 0.0)
        for (size_t j = 0; j + 1 < basis_.size(); ++j) mix[j] -= d[i] * mix_[i][j];
    for (auto& row : mix_) row.resize(basis_.size(), 0.0);
    ech_.push_back(std::move(residual));
    pivot_.push_back(piv);
    mix_.push_back(std::move(mix));
  }

 private:
  int dim_;
  std::vector<std::vector<double>> basis_;
  std::vector<std::vector<double>> ech_;
  std::vector<int> pivot_;
  std::vector<std::vector<double>> mix_;
};

WeightedAutomaton transpose(const WeightedAutomaton& a) {
  WeightedAutomaton out(a.alphabet());
  for (int q = 0; q < a.num_states(); ++q)
    out.add_state(a.state_name(q), a.final_weight(q), a.initial(q));
  for (int q = 0; q < a.num_states(); ++q)
    for (int x = 0; x < a.alphabet().size(); ++x)
      for (const auto& [dst, w] : a.arcs(q, x)) out.add_transition(dst, x, q, w);
  return out;
}

// Quotient by the forward module: states become a basis of the span of all
// initial-row images under transition products.
WeightedAutomaton forward_reduce(const WeightedAutomaton& a) {
  int n = a.num_states();
  int k = a.alphabet().size();
  WeightedAutomaton out(a.alphabet());
  std::vector<double> init = a.initial_vector();
  if (n == 0 || inf_norm_vec(init) == 0.0) return out;
  RowBasis basis(n);
  basis.add(init);
  std::deque<int> queue = {0};
  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    for (int x = 0; x < k; ++x) {
      std::vector<double> u = step_forward(a, basis.vec(i), x);
      if (inf_norm_vec(u) == 0.0) continue;
      if (!basis.express(u, nullptr)) {
        basis.add(u);
        queue.push_back(basis.size() - 1);
      }
    }
  }
  std::vector<double> coords;
  basis.express(init, &coords);
  for (int i = 0; i < basis.size(); ++i)
    out.add_state("m" + std::to_string(i), coords[i], dot(basis.vec(i), a.final_vector()));
  for (int i = 0; i < basis.size(); ++i)
    for (int x = 0; x < k; ++x) {
      std::vector<double> u = step_forward(a, basis.vec(i), x);
      if (inf_norm_vec(u) == 0.0) continue;
      if (!basis.express(u, &coords))
        throw NumericError("forward module closure failed");
      for (int j = 0; j < basis.size(); ++j)
        if (coords[j] != 0.0) out.add_transition(i, x, j, coords[j]);
    }
  return out;
}

}  // namespace

WeightedAutomaton reduce(const WeightedAutomaton& a) {
  return transpose(forward_reduce(transpose(forward_reduce(a))));
}

PslCertificate is_pseudo_stochastic(const WeightedAutomaton& a) {
  PslCertificate cert;
  WeightedAutomaton b = reduce(a);
  cert.reduced_dimension = b.num_states();
  if (b.num_states() == 0) {
    cert.spectral_radius_value = 0.0;
    cert.series_total = 0.0;
    cert.verdict = false;
    return cert;
  }
  Matrix m = b.letter_sum_matrix();
  bool lt1 = is_spectral_radius_lt_one(m);
  cert.spectral_radius_value = spectral_radius(m);
  if (!lt1) {
    cert.series_total = std::numeric_limits<double>::quiet_NaN();
    cert.verdict = false;
    return cert;
  }
  cert.series_total = series_sum(b);
  cert.verdict = std::fabs(cert.series_total - 1.0) <= kSeriesTol;
  return cert;
}

bool validate_pa(const WeightedAutomaton& a) {
  int n = a.num_states();
  if (n == 0) return false;
  auto in_unit = [](double w) { return w >= -kWeightTol && w <= 1.0 + kWeightTol; };
  double init_mass = 0.0;
  for (int q = 0; q < n; ++q) {
    if (!in_unit(a.initial(q)) || !in_unit(a.final_weight(q))) return false;
    init_mass += a.initial(q);
    double out_mass = a.final_weight(q);
    for (int x = 0; x < a.alphabet().size(); ++x)
      for (const auto& [dst, w] : a.arcs(q, x)) {
        (void)dst;
        if (!in_unit(w)) return false;
        out_mass += w;
      }
    if (std::fabs(out_mass - 1.0) > kWeightTol) return false;
  }
  if (std::fabs(init_mass - 1.0) > kWeightTol) return false;
  return trim(a).num_states() == n;
}

bool validate_pda(const WeightedAutomaton& a) {
  if (!validate_pa(a)) return false;
  int initial_states = 0;
  for (int q = 0; q < a.num_states(); ++q) {
    if (a.initial(q) != 0.0) {
      if (std::fabs(a.initial(q) - 1.0) > kWeightTol) return false;
      ++initial_states;
    }
    for (int x = 0; x < a.alphabet().size(); ++x) {
      int nonzero = 0;
      for (const auto& [dst, w] : a.arcs(q, x)) {
        (void)dst;
        if (w != 0.0) ++nonzero;
      }
      if (nonzero > 1) return false;
    }
  }
  return initial_states == 1;
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
  if (text.empty()) throw ParseError("empty number");
  size_t slash = text.find('/');
  if (slash != std::string::npos) {
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    long long p = 0, q = 0;
    auto rp = std::from_chars(num.data(), num.data() + num.size(), p);
    auto rq = std::from_chars(den.data(), den.data() + den.size(), q);
    if (rp.ec != std::errc() || rp.ptr != num.data() + num.size() ||
        rq.ec != std::errc() || rq.ptr != den.data() + den.size())
      throw ParseError("bad fraction: " + text);
    if (q <= 0) throw ParseError("fraction denominator must be positive: " + text);
    return static_cast<double>(p) / static_cast<double>(q);
  }
  double v = 0.0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    throw ParseError("bad number: " + text);
  if (!std::isfinite(v)) throw ParseError("number out of range: " + text);
  return v;
}

namespace {

double parse_kv_number(const std::string& token, const std::string& key, int line_no) {
  std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0)
    throw ParseError("line " + std::to_string(line_no) + ": expected " + prefix + "...");
  try {
    return parse_number(token.substr(prefix.size()));
  } catch (const ParseError& e) {
    throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

}  // namespace

WeightedAutomaton parse_ma(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool saw_header = false, saw_alphabet = false;
  WeightedAutomaton wa;
  auto fail = [&](const std::string& msg) -> void {
    throw ParseError("line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream toks(line);
    std::vector<std::string> t;
    std::string tok;
    while (toks >> tok) t.push_back(tok);
    if (t.empty()) continue;
    if (!saw_header) {
      if (t.size() != 2 || t[0] != "ma" || t[1] != "v1") fail("expected 'ma v1' header");
      saw_header = true;
      continue;
    }
    if (t[0] == "alphabet") {
      if (saw_alphabet) fail("duplicate alphabet line");
      if (t.size() < 2) fail("alphabet needs at least one symbol");
      try {
        wa = WeightedAutomaton(Alphabet(std::vector<std::string>(t.begin() + 1, t.end())));
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      saw_alphabet = true;
      continue;
    }
    if (!saw_alphabet) fail("alphabet line must precede states and transitions");
    if (t[0] == "state") {
      if (t.size() != 4) fail("state line needs: state NAME init=NUM final=NUM");
      double init = parse_kv_number(t[2], "init", line_no);
      double fin = parse_kv_number(t[3], "final", line_no);
      try {
        wa.add_state(t[1], init, fin);
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      continue;
    }
    if (t[0] == "trans") {
      if (t.size() != 5) fail("trans line needs: trans SRC SYM DST NUM");
      int src = wa.state_index(t[1]);
      if (src < 0) fail("unknown source state: " + t[1]);
      int sym = wa.alphabet().index(t[2]);
      if (sym < 0) fail("unknown symbol: " + t[2]);
      int dst = wa.state_index(t[3]);
      if (dst < 0) fail("unknown destination state: " + t[3]);
      double w;
      try {
        w = parse_number(t[4]);
      } catch (const ParseError& e) {
        fail(e.what());
        return wa;  // unreachable
      }
      try {
        wa.add_transition(src, sym, dst, w);
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      continue;
    }
    fail("unrecognized directive: " + t[0]);
  }
  if (!saw_header) throw ParseError("missing 'ma v1' header");
  if (!saw_alphabet) throw ParseError("missing alphabet line");
  return wa;
}

std::string format_ma(const WeightedAutomaton& a) {
  std::ostringstream out;
  out << "ma v1\n";
  out << "alphabet";
  for (const std::string& s : a.alphabet().symbols()) out << ' ' << s;
  out << '\n';
  for (int q = 0; q < a.num_states(); ++q)
    out << "state " << a.state_name(q) << " init=" << format_double(a.initial(q))
        << " final=" << format_double(a.final_weight(q)) << '\n';
  for (int q = 0; q < a.num_states(); ++q)
    for (int x = 0; x < a.alphabet().size(); ++x)
      for (const auto& [dst, w] : a.arcs(q, x))
        out << "trans " << a.state_name(q) << ' ' << a.alphabet().symbol(x) << ' '
            << a.state_name(dst) << ' ' << format_double(w) << '\n';
  return out.str();
}

WeightedAutomaton load_ma(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open automaton file: " + path);
  return parse_ma(in);
}

void save_ma(const WeightedAutomaton& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write automaton file: " + path);
  out << format_ma(a);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rsl
