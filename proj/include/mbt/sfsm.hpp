#pragma once

// Symbolic finite state machines: guarded transitions over typed variables
// with discrete output assignments.

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbt/predicate.hpp"

namespace mbt::model {

using logic::Declarations;
using logic::Predicate;
using logic::Valuation;

enum class Role { Input, Observable, Output };
enum class Tag { Normal, Robustness };

std::string_view role_name(Role r);
std::string_view tag_name(Tag t);

struct OutputAssignment {
  std::string var;
  std::string value;
  bool operator==(const OutputAssignment&) const = default;
};

/// "a:=a+" style label; several assignments are joined with ','.
std::string output_label(const std::vector<OutputAssignment>& outs);

struct State {
  std::string name;
  bool end = false;  // meaningful end point for end-to-end scenarios
};

struct Transition {
  std::size_t source = 0;
  std::size_t target = 0;
  Predicate guard;
  std::vector<OutputAssignment> outputs;
  Tag tag = Tag::Normal;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepResult {
  std::size_t transition;
  std::size_t target;
  const std::vector<OutputAssignment>* outputs;
};

struct Issue {
  enum class Kind { Determinism, Completeness, Reachability, UnsatisfiableGuard };
  Kind kind;
  std::string state;
  std::string detail;
};

std::string_view issue_kind_name(Issue::Kind k);

class Sfsm {
 public:
  std::string name;
  logic::Constants constants;  // kept for documentation in saved files
  std::vector<State> states;
  std::size_t initial = 0;
  std::vector<Transition> transitions;

  void declare(logic::VarDecl d, Role r);
  const Declarations& variables() const { return all_; }
  /// Input and observable variables: the domain of every guard.
  const Declarations& guard_domain() const { return inputs_; }
  Role role(std::string_view var) const;

  std::optional<std::size_t> state_index(std::string_view name) const;
  std::size_t state_at(std::string_view name) const;
  /// Outgoing transition indices of `s` in file order.
  std::vector<std::size_t> outgoing(std::size_t s) const;

  /// Fires the unique enabled transition; throws ModelError if none or several are enabled.
  StepResult step(std::size_t s, const Valuation& u) const;
  std::vector<std::size_t> transitions_tagged(Tag t) const;
  std::vector<Issue> validate() const;

  /// "t<k>" with k the 1-based position in the transition list.
  static std::string transition_id(std::size_t i) { return "t" + std::to_string(i + 1); }

 private:
  Declarations all_;
  Declarations inputs_;
  std::map<std::string, Role, std::less<>> roles_;
};

/// Reads the line-oriented model format.
Sfsm load_model(std::istream& in);
Sfsm load_model_file(const std::string& path);
Sfsm parse_model(const std::string& text);
/// Canonical rendering; parse_model(save_model(m)) reproduces m.
std::string save_model(const Sfsm& m);

}  // namespace mbt::model
