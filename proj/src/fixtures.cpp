#include "rsl/fixtures.hpp"

#include <cmath>
#include <filesystem>

namespace rsl {

WeightedAutomaton golden_pa() {
  WeightedAutomaton wa(Alphabet({"a", "b"}));
  double s5 = std::sqrt(5.0);
  double heavy = (3.0 + s5) / 8.0, light = (3.0 - s5) / 8.0;
  wa.add_state("q1", 0.5, 0.25);
  wa.add_state("q2", 0.5, 0.25);
  wa.add_transition(0, 0, 0, heavy);
  wa.add_transition(0, 1, 0, light);
  wa.add_transition(1, 0, 1, light);
  wa.add_transition(1, 1, 1, heavy);
  return wa;
}

WeightedAutomaton golden_ma() {
  WeightedAutomaton wa(Alphabet({"a", "b"}));
  wa.add_state("eps", 1.0, 0.25);
  wa.add_state("a", 0.0, 0.25);
  wa.add_transition(0, 1, 0, 3.0 / 4.0);
  wa.add_transition(0, 0, 1, 3.0 / 8.0);
  wa.add_transition(0, 1, 1, -3.0 / 8.0);
  wa.add_transition(1, 0, 0, -1.0 / 6.0);
  wa.add_transition(1, 1, 0, 1.0 / 6.0);
  wa.add_transition(1, 0, 1, 3.0 / 4.0);
  return wa;
}

WeightedAutomaton nonrational_target() {
  WeightedAutomaton wa(Alphabet({"a", "b"}));
  wa.add_state("q1", 1.5, 0.25);
  wa.add_state("q2", -0.5, 0.325);
  wa.add_transition(0, 0, 0, 0.45);
  wa.add_transition(0, 1, 0, 0.3);
  wa.add_transition(1, 0, 1, 0.3);
  wa.add_transition(1, 1, 1, 0.375);
  return wa;
}

WeightedAutomaton sign_alternating() {
  WeightedAutomaton wa(Alphabet({"a", "b"}));
  wa.add_state("q0", 1.0, 1.0);
  wa.add_transition(0, 0, 0, 1.0);
  wa.add_transition(0, 1, 0, -1.0);
  return wa;
}

WeightedAutomaton unary_two_state() {
  WeightedAutomaton wa(Alphabet({"a"}));
  wa.add_state("eps", 1.0, 1.0 / 6.0);
  wa.add_state("a", 0.0, 2.0 / 5.0);
  wa.add_transition(0, 0, 1, 5.0 / 6.0);
  wa.add_transition(1, 0, 0, -3.0 / 10.0);
  wa.add_transition(1, 0, 1, 9.0 / 10.0);
  return wa;
}

Sample unary_small_sample() {
  Sample s;
  s.alphabet = Alphabet({"a"});
  auto repeat = [&](const Word& w, int times) {
    for (int i = 0; i < times; ++i) s.words.push_back(w);
  };
  repeat({}, 10);
  repeat({0}, 20);
  repeat({0, 0}, 20);
  repeat({0, 0, 0}, 10);
  return s;
}

void write_fixture_files(const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_ma(golden_pa(), dir + "/golden_pa.ma");
  save_ma(golden_ma(), dir + "/golden_ma.ma");
  save_ma(nonrational_target(), dir + "/nonrational_target.ma");
  save_ma(sign_alternating(), dir + "/sign_alternating.ma");
  save_ma(unary_two_state(), dir + "/unary_two_state.ma");
  save_sample(unary_small_sample(), dir + "/unary_small.sample");
}

}  // namespace rsl
