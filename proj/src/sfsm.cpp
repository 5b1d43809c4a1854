#include "mbt/sfsm.hpp"

#include <fstream>
#include <queue>
#include <set>
#include <sstream>

namespace mbt::model {

using logic::VarDecl;
using logic::VarKind;

std::string_view role_name(Role r) {
  switch (r) {
    case Role::Input: return "input";
    case Role::Observable: return "observable";
    case Role::Output: return "output";
  }
  return "?";
}

std::string_view tag_name(Tag t) { return t == Tag::Normal ? "normal" : "robustness"; }

std::string_view issue_kind_name(Issue::Kind k) {
  switch (k) {
    case Issue::Kind::Determinism: return "determinism";
    case Issue::Kind::Completeness: return "completeness";
    case Issue::Kind::Reachability: return "reachability";
    case Issue::Kind::UnsatisfiableGuard: return "unsatisfiable-guard";
  }
  return "?";
}

std::string output_label(const std::vector<OutputAssignment>& outs) {
  std::string s;
  for (const auto& o : outs) {
    if (!s.empty()) s += ",";
    s += o.var + ":=" + o.value;
  }
  return s.empty() ? "-" : s;
}

void Sfsm::declare(VarDecl d, Role r) {
  roles_[d.name] = r;
  if (r != Role::Output) inputs_.add(d);
  all_.add(std::move(d));
}

Role Sfsm::role(std::string_view var) const {
  auto it = roles_.find(var);
  if (it == roles_.end()) throw ModelError("undeclared variable '" + std::string(var) + "'");
  return it->second;
}

std::optional<std::size_t> Sfsm::state_index(std::string_view n) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].name == n) return i;
  return std::nullopt;
}

std::size_t Sfsm::state_at(std::string_view n) const {
  auto i = state_index(n);
  if (!i) throw ModelError("unknown state '" + std::string(n) + "'");
  return *i;
}

std::vector<std::size_t> Sfsm::outgoing(std::size_t s) const {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < transitions.size(); ++i)
    if (transitions[i].source == s) r.push_back(i);
  return r;
}

StepResult Sfsm::step(std::size_t s, const Valuation& u) const {
  std::optional<std::size_t> hit;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto& t = transitions[i];
    if (t.source != s || !t.guard.evaluate(u)) continue;
    if (hit) throw ModelError("nondeterminism in state " + states[s].name + ": " + transition_id(*hit) + " and " + transition_id(i));
    hit = i;
  }
  if (!hit) throw ModelError("no transition enabled in state " + states[s].name + " for " + u.to_string(inputs_));
  const auto& t = transitions[*hit];
  return {*hit, t.target, &t.outputs};
}

std::vector<std::size_t> Sfsm::transitions_tagged(Tag tag) const {
  std::vector<std::size_t> r;
  for (std::size_t i = 0; i < transitions.size(); ++i)
    if (transitions[i].tag == tag) r.push_back(i);
  return r;
}

std::vector<Issue> Sfsm::validate() const {
  std::vector<Issue> issues;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto& t = transitions[i];
    if (!logic::is_satisfiable(t.guard, inputs_))
      issues.push_back({Issue::Kind::UnsatisfiableGuard, states[t.source].name, transition_id(i) + " " + t.guard.to_string()});
  }
  for (std::size_t s = 0; s < states.size(); ++s) {
    auto out = outgoing(s);
    for (std::size_t a = 0; a < out.size(); ++a)
      for (std::size_t b = a + 1; b < out.size(); ++b) {
        const auto& ga = transitions[out[a]].guard;
        const auto& gb = transitions[out[b]].guard;
        if (logic::is_satisfiable(ga && gb, inputs_))
          issues.push_back({Issue::Kind::Determinism, states[s].name,
                            transition_id(out[a]) + " " + ga.to_string() + " overlaps " + transition_id(out[b]) + " " + gb.to_string()});
      }
    std::vector<Predicate> gs;
    for (auto i : out) gs.push_back(transitions[i].guard);
    Predicate uncovered = Predicate::disj(gs).negated();
    if (auto w = logic::find_model(uncovered, inputs_))
      issues.push_back({Issue::Kind::Completeness, states[s].name, "no transition for " + w->to_string(inputs_)});
  }
  std::vector<bool> seen(states.size(), false);
  std::queue<std::size_t> q;
  if (!states.empty()) {
    seen[initial] = true;
    q.push(initial);
  }
  while (!q.empty()) {
    auto s = q.front();
    q.pop();
    for (auto i : outgoing(s)) {
      auto t = transitions[i].target;
      if (!seen[t]) {
        seen[t] = true;
        q.push(t);
      }
    }
  }
  for (std::size_t s = 0; s < states.size(); ++s)
    if (!seen[s]) issues.push_back({Issue::Kind::Reachability, states[s].name, "not reachable from " + states[initial].name});
  return issues;
}

// ------------------------------------------------------------------ format

namespace {

std::vector<std::string> words(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> w;
  for (std::string t; is >> t;) w.push_back(t);
  return w;
}

int paren_balance(const std::string& s) {
  int d = 0;
  for (char ch : s) {
    if (ch == ';') break;
    if (ch == '(') ++d;
    if (ch == ')') --d;
  }
  return d;
}

bool is_number(const std::string& s) {
  try {
    logic::parse_rational(s);
    return true;
  } catch (...) {
    return false;
  }
}

sexpr::Node expand(const sexpr::Node& n, const std::map<std::string, sexpr::Node>& macros) {
  if (n.is_atom()) {
    auto it = macros.find(n.text);
    return it == macros.end() ? n : it->second;
  }
  sexpr::Node r = n;
  for (auto& c : r.items) c = expand(c, macros);
  return r;
}

struct Reader {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  std::size_t lineno = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ModelError("line " + std::to_string(lineno) + ": " + msg);
  }

  // Next non-blank line with '#' comments removed.
  std::optional<std::string> next() {
    while (pos < lines.size()) {
      std::string l = lines[pos++];
      lineno = pos;
      if (auto h = l.find('#'); h != std::string::npos) l.erase(h);
      if (l.find_first_not_of(" \t\r") != std::string::npos) return l;
    }
    return std::nullopt;
  }

  bool peek_indented() {
    std::size_t p = pos;
    while (p < lines.size()) {
      std::string l = lines[p];
      if (auto h = l.find('#'); h != std::string::npos) l.erase(h);
      if (l.find_first_not_of(" \t\r") == std::string::npos) {
        ++p;
        continue;
      }
      return l[0] == ' ' || l[0] == '\t';
    }
    return false;
  }

  // Continues `first` over following lines until parentheses balance.
  std::string expression(std::string first) {
    while (paren_balance(first) > 0) {
      auto l = next();
      if (!l) fail("unbalanced parentheses");
      first += " " + *l;
    }
    if (paren_balance(first) != 0) fail("unbalanced parentheses");
    return first;
  }
};

std::string after_keyword(const std::string& line, const std::string& kw) {
  auto p = line.find(kw);
  return line.substr(p + kw.size());
}

}  // namespace

Sfsm parse_model(const std::string& text) {
  Reader r;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) r.lines.push_back(l);

  Sfsm m;
  std::map<std::string, sexpr::Node> macros;
  bool have_initial = false;
  struct PendingTransition {
    std::string src, dst;
    Tag tag;
    std::string guard;
    std::vector<OutputAssignment> outs;
    std::size_t line;
  };
  std::vector<PendingTransition> pending;

  while (auto line = r.next()) {
    auto w = words(*line);
    const std::string& kw = w[0];
    if (kw == "machine") {
      if (w.size() != 2) r.fail("expected: machine NAME");
      m.name = w[1];
    } else if (kw == "const") {
      if (w.size() != 3) r.fail("expected: const NAME VALUE");
      try {
        m.constants[w[1]] = logic::parse_rational(w[2]);
      } catch (const std::exception& e) {
        r.fail(e.what());
      }
    } else if (kw == "var") {
      if (w.size() < 4) r.fail("expected: var NAME ROLE TYPE ...");
      VarDecl d;
      d.name = w[1];
      Role role;
      if (w[2] == "input") role = Role::Input;
      else if (w[2] == "observable") role = Role::Observable;
      else if (w[2] == "output") role = Role::Output;
      else r.fail("unknown role '" + w[2] + "'");
      if (w[3] == "bool") {
        d.kind = VarKind::Boolean;
        if (w.size() != 4) r.fail("bool takes no arguments");
      } else if (w[3] == "real") {
        d.kind = VarKind::Real;
        std::size_t k = 4;
        if (w.size() >= 6 && is_number(w[4]) && is_number(w[5])) {
          d.bounds = logic::Bound{logic::parse_rational(w[4]), logic::parse_rational(w[5])};
          if (d.bounds->lo > d.bounds->hi) r.fail("empty bounds for '" + d.name + "'");
          k = 6;
        }
        if (k < w.size()) d.unit = w[k++];
        if (k != w.size()) r.fail("trailing tokens");
      } else if (w[3] == "enum") {
        d.kind = VarKind::Enumerated;
        d.values.assign(w.begin() + 4, w.end());
        if (d.values.empty()) r.fail("enum needs values");
      } else {
        r.fail("unknown type '" + w[3] + "'");
      }
      try {
        m.declare(std::move(d), role);
      } catch (const std::exception& e) {
        r.fail(e.what());
      }
    } else if (kw == "state") {
      if (w.size() < 2) r.fail("expected: state NAME [initial] [end]");
      if (m.state_index(w[1])) r.fail("duplicate state '" + w[1] + "'");
      State s{w[1], false};
      for (std::size_t k = 2; k < w.size(); ++k) {
        if (w[k] == "initial") {
          if (have_initial) r.fail("second initial state");
          have_initial = true;
          m.initial = m.states.size();
        } else if (w[k] == "end") {
          s.end = true;
        } else {
          r.fail("unknown state flag '" + w[k] + "'");
        }
      }
      m.states.push_back(s);
    } else if (kw == "define") {
      if (w.size() < 3) r.fail("expected: define NAME PREDICATE");
      std::string body = r.expression(after_keyword(after_keyword(*line, "define"), w[1]));
      try {
        macros[w[1]] = expand(sexpr::parse(body), macros);
      } catch (const std::exception& e) {
        r.fail(e.what());
      }
    } else if (kw == "transition") {
      if (w.size() != 5 || w[2] != "->") r.fail("expected: transition SRC -> DST normal|robustness");
      PendingTransition t;
      t.src = w[1];
      t.dst = w[3];
      if (w[4] == "normal") t.tag = Tag::Normal;
      else if (w[4] == "robustness") t.tag = Tag::Robustness;
      else r.fail("unknown tag '" + w[4] + "'");
      t.line = r.lineno;
      while (r.peek_indented()) {
        auto body = *r.next();
        auto bw = words(body);
        if (bw[0] == "guard") {
          t.guard = r.expression(after_keyword(body, "guard"));
        } else if (bw[0] == "output") {
          if (bw.size() != 3) r.fail("expected: output VAR VALUE");
          t.outs.push_back({bw[1], bw[2]});
        } else {
          r.fail("unexpected '" + bw[0] + "' in transition");
        }
      }
      if (t.guard.empty()) r.fail("transition without guard");
      pending.push_back(std::move(t));
    } else {
      r.fail("unknown keyword '" + kw + "'");
    }
  }
  if (m.states.empty()) throw ModelError("model declares no states");
  if (!have_initial) throw ModelError("model has no initial state");

  for (const auto& p : pending) {
    auto where = [&](const std::string& msg) { return ModelError("line " + std::to_string(p.line) + ": " + msg); };
    auto src = m.state_index(p.src);
    auto dst = m.state_index(p.dst);
    if (!src) throw where("unknown state '" + p.src + "'");
    if (!dst) throw where("unknown state '" + p.dst + "'");
    Transition t;
    t.source = *src;
    t.target = *dst;
    t.tag = p.tag;
    try {
      t.guard = logic::predicate_from_sexpr(expand(sexpr::parse(p.guard), macros), m.guard_domain(), m.constants);
    } catch (const std::exception& e) {
      throw where(e.what());
    }
    for (const auto& o : p.outs) {
      const VarDecl* d = m.variables().find(o.var);
      if (!d || m.role(o.var) != Role::Output) throw where("'" + o.var + "' is not an output variable");
      if (d->kind == VarKind::Enumerated &&
          std::find(d->values.begin(), d->values.end(), o.value) == d->values.end())
        throw where("'" + o.value + "' is not a value of '" + o.var + "'");
    }
    t.outputs = p.outs;
    m.transitions.push_back(std::move(t));
  }
  return m;
}

Sfsm load_model(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

Sfsm load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path);
  return load_model(in);
}

std::string save_model(const Sfsm& m) {
  std::ostringstream os;
  os << "machine " << (m.name.empty() ? "unnamed" : m.name) << "\n\n";
  for (const auto& [k, v] : m.constants) os << "const " << k << " " << logic::format_rational(v) << "\n";
  if (!m.constants.empty()) os << "\n";
  for (const auto& d : m.variables().all()) {
    os << "var " << d.name << " " << role_name(m.role(d.name)) << " ";
    switch (d.kind) {
      case VarKind::Boolean: os << "bool"; break;
      case VarKind::Real:
        os << "real";
        if (d.bounds) os << " " << logic::format_rational(d.bounds->lo) << " " << logic::format_rational(d.bounds->hi);
        if (!d.unit.empty()) os << " " << d.unit;
        break;
      case VarKind::Enumerated:
        os << "enum";
        for (const auto& v : d.values) os << " " << v;
        break;
    }
    os << "\n";
  }
  os << "\n";
  for (std::size_t i = 0; i < m.states.size(); ++i) {
    os << "state " << m.states[i].name;
    if (i == m.initial) os << " initial";
    if (m.states[i].end) os << " end";
    os << "\n";
  }
  for (const auto& t : m.transitions) {
    os << "\ntransition " << m.states[t.source].name << " -> " << m.states[t.target].name << " " << tag_name(t.tag) << "\n";
    os << "  guard " << t.guard.to_string() << "\n";
    for (const auto& o : t.outputs) os << "  output " << o.var << " " << o.value << "\n";
  }
  return os.str();
}

}  // namespace mbt::model
