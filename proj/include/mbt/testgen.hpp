#pragma once

// Complete test suites for Mealy machines and their translation to
// concrete inputs.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbt/eqclass.hpp"
#include "mbt/fsm.hpp"
#include "mbt/sfsm.hpp"

namespace mbt::testgen {

using fsm::Mealy;
using fsm::Word;

struct AbstractTestCase {
  Word inputs;
  Word outputs;  // expected, indices into the reference output alphabet
  bool operator==(const AbstractTestCase&) const = default;
};

using AbstractSuite = std::vector<AbstractTestCase>;

/// Prefix tree of input words; leaves are the test cases.
class TestTree {
 public:
  TestTree();
  /// Adds `w` and returns its node.
  int add(const Word& w);
  int add(int node, const Word& suffix);
  /// Node reached by `w`, or -1.
  int find(const Word& w) const;
  int find(int node, const Word& suffix) const;
  /// Leaves in lexicographic input order.
  std::vector<Word> leaves() const;
  std::size_t size() const { return nodes_.size(); }
  std::size_t leaf_count() const;

  struct Node {
    std::vector<std::pair<int, int>> children;  // (input, node), sorted by input
  };
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<Node> nodes_;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// H-method suite for implementations with at most `m` states.
AbstractSuite h_method(const Mealy& f, int m);
/// W-method suite: state cover, all input words up to m-n+1, characterization set.
AbstractSuite w_method(const Mealy& f, int m);
/// Prefix-closed tree of the given words, with expected outputs from `f`.
AbstractSuite suite_from_words(const Mealy& f, const std::vector<Word>& words);

std::size_t max_length(const AbstractSuite& s);
/// Cases whose outputs on `impl` differ from their expectation.
std::vector<std::size_t> failing_cases(const AbstractSuite& s, const Mealy& impl);
bool kills(const AbstractSuite& s, const Mealy& impl);

std::string render(const AbstractSuite& s, const Mealy& f);

// ---------------------------------------------------------------- concrete

struct ConcreteStep {
  std::string class_id;
  logic::Valuation input;
  std::string expected;  // output label
};

struct ConcreteTestCase {
  std::vector<ConcreteStep> steps;
};

using ConcreteSuite = std::vector<ConcreteTestCase>;

ConcreteSuite concretize(const AbstractSuite& s, const Mealy& f, const eqclass::ClassTable& classes);
std::string render(const ConcreteSuite& s, const logic::Declarations& decls);

/// Implementation under test: reset to the initial state, then react to one input per step.
class Sut {
 public:
  virtual ~Sut() = default;
  virtual void reset() = 0;
  virtual std::vector<model::OutputAssignment> step(const logic::Valuation& u) = 0;
};

using SutFactory = std::function<std::unique_ptr<Sut>()>;

struct Verdict {
  enum class Kind { Pass, Fail, Error };
  std::size_t index = 0;
  Kind kind = Kind::Pass;
  std::size_t step = 0;  // failing step, for Fail and Error
  std::string expected;
  std::string observed;  // observed label, or the error message
};

std::string_view verdict_name(Verdict::Kind k);

Verdict run_case(const ConcreteTestCase& c, std::size_t index, Sut& sut);
/// Cases in suite order on one instance.
std::vector<Verdict> run_suite(const ConcreteSuite& s, Sut& sut);
/// Cases distributed over threads, one instance per thread; same verdicts as run_suite.
std::vector<Verdict> run_suite_parallel(const ConcreteSuite& s, const SutFactory& make);

}  // namespace mbt::testgen
