// fixtures.hpp - small reference automata and samples used across tests
// and as ready-made experiment targets.
#pragma once

#include <string>

#include "rsl/automata.hpp"
#include "rsl/evalkit.hpp"

namespace rsl {

// Two-state PA over {a,b} whose loop weights involve the golden ratio:
// state i keeps symbol i's loop heavy ((3+sqrt 5)/8) and the other light
// ((3-sqrt 5)/8); both states initial with mass 1/2 and stop mass 1/4.
WeightedAutomaton golden_pa();

// Two-state MA with rational but partly negative weights computing the
// same stochastic language as golden_pa.
WeightedAutomaton golden_ma();

// Two-state MA with initial weights (3/2, -1/2) and per-state letter
// loops; it is pseudo-stochastic and its p_r is not rational.
WeightedAutomaton nonrational_target();

// Single state with a-loop +1 and b-loop -1: the series is the sign
// (-1)^(#b), a pseudo-stochastic language whose p_r lives on a*.
WeightedAutomaton sign_alternating();

// Two states over {a}: the shape a small inference run produces from
// unary_small_sample, with one negative return weight.
WeightedAutomaton unary_two_state();

// Unary multiset {eps x10, a x20, aa x20, aaa x10}.
Sample unary_small_sample();

// Writes every fixture in canonical text form into dir.
void write_fixture_files(const std::string& dir);

}  // namespace rsl
