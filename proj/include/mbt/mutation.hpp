#pragma once

// Bounded-state mutants of a Mealy machine and kill analysis against a suite.

#include <cstdint>
#include <string>
#include <vector>

#include "mbt/abstraction.hpp"
#include "mbt/testgen.hpp"

namespace mbt::mutation {

enum class Operator { OutputSwap, Retarget, StateSplit, GuardFlip };

std::string_view operator_name(Operator op);

struct Mutant {
  std::size_t id = 0;
  Operator op = Operator::OutputSwap;
  fsm::Mealy machine;
  std::uint64_t seed = 0;
  std::string description;
};

/// Symbolic source used by guard-literal flips; all three must describe the
/// machine the mutants are drawn from.
struct SymbolicSource {
  const model::Sfsm* model = nullptr;
  const eqclass::ClassTable* classes = nullptr;
  const abstraction::Abstraction* abs = nullptr;
};

class MutationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// `count` mutants with at most `m` states, operators drawn uniformly among
/// those applicable: state-split needs m > states(f), guard flips need `src`.
/// Reproducible from `seed`.
std::vector<Mutant> generate_mutants(const fsm::Mealy& f, int m, std::size_t count, std::uint64_t seed,
                                     const SymbolicSource* src = nullptr);

/// Single operators, exposed for tests. `rng_seed` drives every choice.
Mutant output_swap(const fsm::Mealy& f, std::uint64_t rng_seed);
Mutant retarget(const fsm::Mealy& f, std::uint64_t rng_seed);
Mutant state_split(const fsm::Mealy& f, std::uint64_t rng_seed);
/// Negates one literal of one guard and re-abstracts; the mutant fires the
/// first enabled transition in file order on each class representative and
/// keeps the original transition when none is enabled. Result is minimised.
Mutant guard_flip(const SymbolicSource& src, std::uint64_t rng_seed);

struct MutantResult {
  std::size_t id = 0;
  Operator op = Operator::OutputSwap;
  int states = 0;
  bool equivalent = false;
  bool killed = false;
  std::size_t failing = 0;  // failing case count
};

struct KillReport {
  std::vector<MutantResult> results;  // sorted by mutant id
  std::size_t equivalent = 0;
  std::size_t killed = 0;
  std::size_t survivors = 0;      // non-equivalent and not killed
  std::size_t false_alarms = 0;   // equivalent but killed
  double kill_rate() const;       // killed non-equivalent / non-equivalent
};

KillReport kill_report(const testgen::AbstractSuite& suite, const fsm::Mealy& reference, const std::vector<Mutant>& mutants);
KillReport kill_report_serial(const testgen::AbstractSuite& suite, const fsm::Mealy& reference, const std::vector<Mutant>& mutants);

std::string render(const KillReport& r, const std::string& suite_name);

}  // namespace mbt::mutation
