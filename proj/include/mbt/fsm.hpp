#pragma once

// Deterministic complete Mealy machines over finite alphabets.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbt::fsm {

using Word = std::vector<int>;

class AlphabetMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Mealy {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> states;  // display names
  int initial = 0;
  std::vector<std::vector<int>> delta;   // [state][input] -> state
  std::vector<std::vector<int>> lambda;  // [state][input] -> output

  int size() const { return static_cast<int>(states.size()); }
  int alphabet() const { return static_cast<int>(inputs.size()); }

  /// Output word produced from `from` (initial state by default).
  Word run(const Word& w, std::optional<int> from = std::nullopt) const;
  int reach(const Word& w, std::optional<int> from = std::nullopt) const;
  /// Throws std::invalid_argument unless total, in range and non-empty.
  void check() const;
};

bool operator==(const Mealy& a, const Mealy& b);

/// Removes unreachable states, keeping order.
Mealy trim(const Mealy& f);

/// Minimal equivalent machine; states numbered in breadth-first order and
/// named by joining the names of merged states with '|'.
Mealy minimize(const Mealy& f);

/// Shortest input word on which the machines differ, or nullopt if equivalent.
std::optional<Word> counterexample(const Mealy& f, const Mealy& g);
bool equivalent(const Mealy& f, const Mealy& g);

/// Shortest access word per state, breadth-first with inputs in order.
std::vector<Word> state_cover(const Mealy& f);

/// Shortest word separating s1 from s2; nullopt if they are equivalent.
std::optional<Word> distinguishing_trace(const Mealy& f, int s1, int s2);

/// Every word of length `len` distinguishing s1 and s2, in lexicographic order.
std::vector<Word> distinguishing_words(const Mealy& f, int s1, int s2, int len);

std::string render(const Mealy& f);
Mealy parse(const std::string& text);

std::string word_text(const Mealy& f, const Word& w);

}  // namespace mbt::fsm
