#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mbt::sexpr {

/// Parsed s-expression: either an atom or a list.
struct Node {
  bool is_list = false;
  std::string text;
  std::vector<Node> items;

  static Node atom(std::string t) { return Node{false, std::move(t), {}}; }
  static Node list_of(std::vector<Node> xs) { return Node{true, {}, std::move(xs)}; }

  bool is_atom() const { return !is_list; }
  std::string to_string() const;
};

/// Parses exactly one expression; trailing non-blank input is an error.
Node parse(std::string_view text);

}  // namespace mbt::sexpr
