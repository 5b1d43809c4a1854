#pragma once

// Input equivalence classes: satisfiable minterms over the distinct guards
// of a machine.

#include <optional>
#include <string>
#include <vector>

#include "mbt/predicate.hpp"
#include "mbt/sfsm.hpp"

namespace mbt::eqclass {

using logic::Declarations;
using logic::Predicate;
using logic::Valuation;

struct InputClass {
  std::string id;               // c1, c2, ...
  std::vector<bool> signs;      // one per distinct guard
  Predicate minterm;            // conjunction of signed guards
  Predicate predicate;          // simplified, equivalent to minterm
  Valuation representative;
};

struct ClassTable {
  Declarations domain;
  std::vector<Predicate> guards;  // distinct guards, first-appearance order
  std::vector<InputClass> classes;

  /// Index of the class containing `u`; nullopt if none does.
  std::optional<std::size_t> classify(const Valuation& u) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  const InputClass& at(std::string_view id) const;
};

/// Key identifying guards up to conjunct/disjunct ordering.
std::string guard_key(const Predicate& g);

/// Distinct guards of `guards` in first-appearance order.
std::vector<Predicate> distinct_guards(const std::vector<Predicate>& guards);

ClassTable input_classes(const std::vector<Predicate>& guards, const Declarations& domain);
ClassTable input_classes(const model::Sfsm& m);

/// Satisfiable sign combinations of a set of atoms. Atoms over disjoint
/// variable sets are enumerated independently and combined.
struct CellSet {
  std::vector<logic::Atom> atoms;
  std::vector<std::vector<bool>> signs;  // per cell, one sign per atom
  std::vector<Valuation> witnesses;      // per cell
};

CellSet atom_cells(const std::vector<Predicate>& preds, const Declarations& decls);

/// Line-oriented table: "id<TAB>predicate<TAB>representative".
std::string render(const ClassTable& t);

}  // namespace mbt::eqclass
