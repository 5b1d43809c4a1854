#pragma once

#include <random>
#include <string>

#include "mbt/fsm.hpp"

namespace fixture {

// Total machine with uniformly drawn targets and outputs; may contain
// unreachable or equivalent states.
inline mbt::fsm::Mealy random_mealy(std::mt19937& rng, int states, int inputs, int outputs) {
  mbt::fsm::Mealy f;
  for (int i = 0; i < inputs; ++i) f.inputs.push_back("i" + std::to_string(i));
  for (int o = 0; o < outputs; ++o) f.outputs.push_back("o" + std::to_string(o));
  for (int s = 0; s < states; ++s) f.states.push_back("s" + std::to_string(s));
  std::uniform_int_distribution<int> st(0, states - 1), out(0, outputs - 1);
  f.delta.assign(states, std::vector<int>(inputs));
  f.lambda.assign(states, std::vector<int>(inputs));
  for (int s = 0; s < states; ++s)
    for (int x = 0; x < inputs; ++x) {
      f.delta[s][x] = st(rng);
      f.lambda[s][x] = out(rng);
    }
  return f;
}

}  // namespace fixture
