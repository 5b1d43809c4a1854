#include "mbt/sexpr.hpp"

#include <cctype>

#include "mbt/predicate.hpp"

namespace mbt::sexpr {

std::string Node::to_string() const {
  if (!is_list) return text;
  std::string s = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ' ';
    s += items[i].to_string();
  }
  return s + ")";
}

namespace {

struct Reader {
  std::string_view src;
  std::size_t pos = 0;

  void skip() {
    while (pos < src.size()) {
      if (std::isspace(static_cast<unsigned char>(src[pos]))) {
        ++pos;
      } else if (src[pos] == ';') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  Node read() {
    skip();
    if (pos >= src.size()) throw logic::ParseError("unexpected end of expression");
    if (src[pos] == ')') throw logic::ParseError("unbalanced ')' at offset " + std::to_string(pos));
    if (src[pos] == '(') {
      ++pos;
      Node n = Node::list_of({});
      for (;;) {
        skip();
        if (pos >= src.size()) throw logic::ParseError("missing ')'");
        if (src[pos] == ')') {
          ++pos;
          return n;
        }
        n.items.push_back(read());
      }
    }
    std::size_t start = pos;
    while (pos < src.size() && !std::isspace(static_cast<unsigned char>(src[pos])) && src[pos] != '(' &&
           src[pos] != ')' && src[pos] != ';')
      ++pos;
    return Node::atom(std::string(src.substr(start, pos - start)));
  }
};

}  // namespace

Node parse(std::string_view text) {
  Reader r{text};
  Node n = r.read();
  r.skip();
  if (r.pos != text.size()) throw logic::ParseError("trailing input after expression: '" + std::string(text.substr(r.pos)) + "'");
  return n;
}

}  // namespace mbt::sexpr
