#include "mbt/fsm.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace mbt::fsm {

Word Mealy::run(const Word& w, std::optional<int> from) const {
  int s = from.value_or(initial);
  Word out;
  out.reserve(w.size());
  for (int x : w) {
    out.push_back(lambda[s][x]);
    s = delta[s][x];
  }
  return out;
}

int Mealy::reach(const Word& w, std::optional<int> from) const {
  int s = from.value_or(initial);
  for (int x : w) s = delta[s][x];
  return s;
}

void Mealy::check() const {
  if (states.empty()) throw std::invalid_argument("machine has no states");
  if (initial < 0 || initial >= size()) throw std::invalid_argument("initial state out of range");
  if (static_cast<int>(delta.size()) != size() || static_cast<int>(lambda.size()) != size())
    throw std::invalid_argument("transition table size mismatch");
  for (int s = 0; s < size(); ++s) {
    if (static_cast<int>(delta[s].size()) != alphabet() || static_cast<int>(lambda[s].size()) != alphabet())
      throw std::invalid_argument("row " + std::to_string(s) + " is not total");
    for (int x = 0; x < alphabet(); ++x) {
      if (delta[s][x] < 0 || delta[s][x] >= size()) throw std::invalid_argument("target out of range");
      if (lambda[s][x] < 0 || lambda[s][x] >= static_cast<int>(outputs.size())) throw std::invalid_argument("output out of range");
    }
  }
}

bool operator==(const Mealy& a, const Mealy& b) {
  return a.inputs == b.inputs && a.outputs == b.outputs && a.states == b.states && a.initial == b.initial &&
         a.delta == b.delta && a.lambda == b.lambda;
}

namespace {

// Reorders states breadth-first from the initial state; unreachable states are dropped.
Mealy renumber(const Mealy& f) {
  std::vector<int> order;
  std::vector<int> index(f.size(), -1);
  std::deque<int> q{f.initial};
  index[f.initial] = 0;
  order.push_back(f.initial);
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (int x = 0; x < f.alphabet(); ++x) {
      int t = f.delta[s][x];
      if (index[t] < 0) {
        index[t] = static_cast<int>(order.size());
        order.push_back(t);
        q.push_back(t);
      }
    }
  }
  Mealy g;
  g.inputs = f.inputs;
  g.outputs = f.outputs;
  g.initial = 0;
  for (int s : order) {
    g.states.push_back(f.states[s]);
    std::vector<int> d, l;
    for (int x = 0; x < f.alphabet(); ++x) {
      d.push_back(index[f.delta[s][x]]);
      l.push_back(f.lambda[s][x]);
    }
    g.delta.push_back(std::move(d));
    g.lambda.push_back(std::move(l));
  }
  return g;
}

}  // namespace

Mealy trim(const Mealy& f) {
  std::vector<bool> seen(f.size(), false);
  std::deque<int> q{f.initial};
  seen[f.initial] = true;
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (int t : f.delta[s])
      if (!seen[t]) {
        seen[t] = true;
        q.push_back(t);
      }
  }
  std::vector<int> index(f.size(), -1);
  Mealy g;
  g.inputs = f.inputs;
  g.outputs = f.outputs;
  for (int s = 0; s < f.size(); ++s)
    if (seen[s]) {
      index[s] = static_cast<int>(g.states.size());
      g.states.push_back(f.states[s]);
    }
  g.initial = index[f.initial];
  for (int s = 0; s < f.size(); ++s) {
    if (!seen[s]) continue;
    std::vector<int> d;
    for (int t : f.delta[s]) d.push_back(index[t]);
    g.delta.push_back(std::move(d));
    g.lambda.push_back(f.lambda[s]);
  }
  return g;
}

Mealy minimize(const Mealy& input) {
  Mealy f = trim(input);
  int n = f.size();
  // Moore-style refinement: start from output rows, split by successor blocks.
  std::vector<int> block(n);
  {
    std::map<std::vector<int>, int> ids;
    for (int s = 0; s < n; ++s) block[s] = ids.emplace(f.lambda[s], static_cast<int>(ids.size())).first->second;
  }
  while (true) {
    std::map<std::vector<int>, int> ids;
    std::vector<int> next(n);
    for (int s = 0; s < n; ++s) {
      std::vector<int> sig{block[s]};
      for (int t : f.delta[s]) sig.push_back(block[t]);
      next[s] = ids.emplace(sig, static_cast<int>(ids.size())).first->second;
    }
    bool stable = std::set<int>(next.begin(), next.end()).size() == std::set<int>(block.begin(), block.end()).size();
    block = std::move(next);
    if (stable) break;
  }
  int nb = *std::max_element(block.begin(), block.end()) + 1;
  Mealy q;
  q.inputs = f.inputs;
  q.outputs = f.outputs;
  q.states.assign(nb, "");
  q.delta.assign(nb, {});
  q.lambda.assign(nb, {});
  for (int s = 0; s < n; ++s) {
    int b = block[s];
    q.states[b] += (q.states[b].empty() ? "" : "|") + f.states[s];
    if (q.delta[b].empty()) {
      for (int t : f.delta[s]) q.delta[b].push_back(block[t]);
      q.lambda[b] = f.lambda[s];
    }
  }
  q.initial = block[f.initial];
  return renumber(q);
}

std::optional<Word> counterexample(const Mealy& f, const Mealy& g) {
  if (f.alphabet() != g.alphabet()) throw AlphabetMismatch("input alphabets differ in size");
  // Breadth-first over the product machine; parents recover the shortest word.
  std::map<std::pair<int, int>, std::pair<std::pair<int, int>, int>> parent;
  std::deque<std::pair<int, int>> q;
  auto start = std::make_pair(f.initial, g.initial);
  parent[start] = {start, -1};
  q.push_back(start);
  while (!q.empty()) {
    auto [a, b] = q.front();
    q.pop_front();
    for (int x = 0; x < f.alphabet(); ++x) {
      if (f.outputs[f.lambda[a][x]] != g.outputs[g.lambda[b][x]]) {
        Word w{x};
        auto cur = std::make_pair(a, b);
        while (parent[cur].second >= 0) {
          w.push_back(parent[cur].second);
          cur = parent[cur].first;
        }
        std::reverse(w.begin() + 1, w.end());
        std::rotate(w.begin(), w.begin() + 1, w.end());
        return w;
      }
      auto nxt = std::make_pair(f.delta[a][x], g.delta[b][x]);
      if (parent.emplace(nxt, std::make_pair(std::make_pair(a, b), x)).second) q.push_back(nxt);
    }
  }
  return std::nullopt;
}

bool equivalent(const Mealy& f, const Mealy& g) { return !counterexample(f, g); }

std::vector<Word> state_cover(const Mealy& f) {
  std::vector<Word> cover(f.size());
  std::vector<bool> seen(f.size(), false);
  std::deque<int> q{f.initial};
  seen[f.initial] = true;
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (int x = 0; x < f.alphabet(); ++x) {
      int t = f.delta[s][x];
      if (seen[t]) continue;
      seen[t] = true;
      cover[t] = cover[s];
      cover[t].push_back(x);
      q.push_back(t);
    }
  }
  return cover;
}

std::optional<Word> distinguishing_trace(const Mealy& f, int s1, int s2) {
  Mealy a = f, b = f;
  a.initial = s1;
  b.initial = s2;
  return counterexample(a, b);
}

namespace {

void collect(const Mealy& f, int p, int q, int left, Word& prefix, std::vector<Word>& out) {
  for (int x = 0; x < f.alphabet(); ++x) {
    bool differ = f.lambda[p][x] != f.lambda[q][x];
    prefix.push_back(x);
    if (left == 1) {
      if (differ) out.push_back(prefix);
    } else if (!differ && f.delta[p][x] != f.delta[q][x]) {
      collect(f, f.delta[p][x], f.delta[q][x], left - 1, prefix, out);
    }
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Word> distinguishing_words(const Mealy& f, int s1, int s2, int len) {
  std::vector<Word> out;
  if (s1 == s2 || len <= 0) return out;
  Word prefix;
  collect(f, s1, s2, len, prefix, out);
  return out;
}

std::string word_text(const Mealy& f, const Word& w) {
  std::string s;
  for (int x : w) s += (s.empty() ? "" : ".") + f.inputs[x];
  return s.empty() ? "eps" : s;
}

std::string render(const Mealy& f) {
  std::ostringstream os;
  os << "inputs";
  for (const auto& i : f.inputs) os << " " << i;
  os << "\noutputs";
  for (const auto& o : f.outputs) os << " " << o;
  os << "\n";
  for (int s = 0; s < f.size(); ++s) os << "state " << s << " " << f.states[s] << (s == f.initial ? " initial" : "") << "\n";
  for (int s = 0; s < f.size(); ++s)
    for (int x = 0; x < f.alphabet(); ++x)
      os << s << " " << f.inputs[x] << " -> " << f.delta[s][x] << " / " << f.outputs[f.lambda[s][x]] << "\n";
  return os.str();
}

Mealy parse(const std::string& text) {
  Mealy f;
  std::istringstream is(text);
  std::map<std::string, int> in_index, out_index;
  std::string line;
  auto fail = [&](const std::string& msg) { throw std::invalid_argument("fsm: " + msg + ": " + line); };
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "inputs") {
      for (std::string t; ls >> t;) {
        in_index[t] = static_cast<int>(f.inputs.size());
        f.inputs.push_back(t);
      }
    } else if (head == "outputs") {
      for (std::string t; ls >> t;) {
        out_index[t] = static_cast<int>(f.outputs.size());
        f.outputs.push_back(t);
      }
    } else if (head == "state") {
      int id;
      std::string name, flag;
      if (!(ls >> id >> name) || id != f.size()) fail("bad state line");
      if (ls >> flag) {
        if (flag != "initial") fail("unknown flag");
        f.initial = id;
      }
      f.states.push_back(name);
      f.delta.emplace_back(f.inputs.size(), -1);
      f.lambda.emplace_back(f.inputs.size(), -1);
    } else {
      int s, t;
      std::string x, arrow, slash, o;
      s = std::stoi(head);
      if (!(ls >> x >> arrow >> t >> slash >> o) || arrow != "->" || slash != "/") fail("bad transition line");
      if (s < 0 || s >= f.size() || !in_index.count(x) || !out_index.count(o)) fail("unknown symbol");
      f.delta[s][in_index[x]] = t;
      f.lambda[s][in_index[x]] = out_index[o];
    }
  }
  f.check();
  return f;
}

}  // namespace mbt::fsm
