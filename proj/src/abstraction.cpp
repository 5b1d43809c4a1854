#include "mbt/abstraction.hpp"

#include <algorithm>
#include <map>

namespace mbt::abstraction {

Abstraction abstract(const model::Sfsm& m, const eqclass::ClassTable& classes) {
  std::map<std::string, std::size_t> guard_index;
  for (std::size_t g = 0; g < classes.guards.size(); ++g) guard_index[eqclass::guard_key(classes.guards[g])] = g;

  Abstraction a;
  fsm::Mealy& f = a.full;
  for (const auto& c : classes.classes) f.inputs.push_back(c.id);
  for (const auto& s : m.states) f.states.push_back(s.name);
  f.initial = static_cast<int>(m.initial);
  std::map<std::string, int> out_index;
  for (const auto& t : m.transitions) {
    auto label = model::output_label(t.outputs);
    if (out_index.emplace(label, static_cast<int>(f.outputs.size())).second) f.outputs.push_back(label);
  }

  a.fired.assign(m.states.size(), std::vector<std::size_t>(classes.classes.size()));
  f.delta.assign(m.states.size(), std::vector<int>(classes.classes.size()));
  f.lambda.assign(m.states.size(), std::vector<int>(classes.classes.size()));
  for (std::size_t s = 0; s < m.states.size(); ++s) {
    auto out = m.outgoing(s);
    for (std::size_t c = 0; c < classes.classes.size(); ++c) {
      const auto& cls = classes.classes[c];
      std::vector<std::size_t> hits;
      for (auto i : out) {
        auto it = guard_index.find(eqclass::guard_key(m.transitions[i].guard));
        if (it == guard_index.end()) throw AbstractionError("class table does not belong to this machine");
        if (cls.signs[it->second]) hits.push_back(i);
      }
      if (hits.size() != 1)
        throw AbstractionError("state " + m.states[s].name + ", class " + cls.id + ": " + std::to_string(hits.size()) +
                               " transitions enabled");
      const auto& t = m.transitions[hits[0]];
      a.fired[s][c] = hits[0];
      f.delta[s][c] = static_cast<int>(t.target);
      f.lambda[s][c] = out_index.at(model::output_label(t.outputs));
    }
  }
  a.minimal = fsm::minimize(f);

  // Map machine states to minimal states by following access words.
  auto cover = fsm::state_cover(f);
  a.block_of.assign(m.states.size(), -1);
  for (std::size_t s = 0; s < m.states.size(); ++s) {
    bool reachable = s == m.initial || !cover[s].empty();
    if (reachable) a.block_of[s] = a.minimal.reach(cover[s]);
  }
  return a;
}

}  // namespace mbt::abstraction
