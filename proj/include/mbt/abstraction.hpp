#pragma once

// Finite abstraction of a symbolic machine over its input classes.

#include <stdexcept>
#include <vector>

#include "mbt/eqclass.hpp"
#include "mbt/fsm.hpp"
#include "mbt/sfsm.hpp"

namespace mbt::abstraction {

class AbstractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Abstraction {
  fsm::Mealy full;                             // one state per machine state
  fsm::Mealy minimal;
  std::vector<std::vector<std::size_t>> fired;  // [state][class] -> transition index
  std::vector<int> block_of;                    // machine state -> minimal state
};

Abstraction abstract(const model::Sfsm& m, const eqclass::ClassTable& classes);

}  // namespace mbt::abstraction
