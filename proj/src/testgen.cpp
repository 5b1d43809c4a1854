#include "mbt/testgen.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mbt::testgen {

// ------------------------------------------------------------------ tree

TestTree::TestTree() : nodes_(1) {}

int TestTree::add(int node, const Word& suffix) {
  for (int x : suffix) {
    auto& ch = nodes_[static_cast<std::size_t>(node)].children;
    auto it = std::lower_bound(ch.begin(), ch.end(), std::make_pair(x, -1));
    if (it != ch.end() && it->first == x) {
      node = it->second;
      continue;
    }
    int fresh = static_cast<int>(nodes_.size());
    ch.insert(it, {x, fresh});
    nodes_.emplace_back();
    node = fresh;
  }
  return node;
}

int TestTree::add(const Word& w) { return add(0, w); }

int TestTree::find(int node, const Word& suffix) const {
  for (int x : suffix) {
    const auto& ch = nodes_[static_cast<std::size_t>(node)].children;
    auto it = std::lower_bound(ch.begin(), ch.end(), std::make_pair(x, -1));
    if (it == ch.end() || it->first != x) return -1;
    node = it->second;
  }
  return node;
}

int TestTree::find(const Word& w) const { return find(0, w); }

std::vector<Word> TestTree::leaves() const {
  std::vector<Word> out;
  Word path;
  std::function<void(int)> walk = [&](int n) {
    const auto& ch = nodes_[static_cast<std::size_t>(n)].children;
    if (ch.empty()) {
      if (n != 0) out.push_back(path);
      return;
    }
    for (auto [x, c] : ch) {
      path.push_back(x);
      walk(c);
      path.pop_back();
    }
  };
  walk(0);
  return out;
}

std::size_t TestTree::leaf_count() const {
  std::size_t k = 0;
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (nodes_[i].children.empty()) ++k;
  return k;
}

// ------------------------------------------------------------- generation

namespace {

// All words of length 1..k in length-then-lexicographic order.
std::vector<Word> words_up_to(int alphabet, int k) {
  std::vector<Word> out;
  std::vector<Word> layer{Word{}};
  for (int len = 1; len <= k; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer)
      for (int x = 0; x < alphabet; ++x) {
        Word e = w;
        e.push_back(x);
        next.push_back(e);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

int child_of(const TestTree& t, int n, int x) {
  const auto& ch = t.node(n).children;
  auto it = std::lower_bound(ch.begin(), ch.end(), std::make_pair(x, -1));
  return (it == ch.end() || it->first != x) ? -1 : it->second;
}

// True if some common extension of nodes a and b separates states p and q.
bool separated(const Mealy& f, const TestTree& t, int a, int b, int p, int q) {
  for (auto [x, ca] : t.node(a).children) {
    int cb = child_of(t, b, x);
    if (cb < 0) continue;
    if (f.lambda[p][x] != f.lambda[q][x]) return true;
    int np = f.delta[p][x], nq = f.delta[q][x];
    if (np != nq && separated(f, t, ca, cb, np, nq)) return true;
  }
  return false;
}

// Tree paths below `n` that separate p and q, ending at the first differing output.
void tree_candidates(const Mealy& f, const TestTree& t, int n, int p, int q, Word& path, std::vector<Word>& out) {
  for (auto [x, c] : t.node(n).children) {
    path.push_back(x);
    if (f.lambda[p][x] != f.lambda[q][x]) {
      out.push_back(path);
    } else if (f.delta[p][x] != f.delta[q][x]) {
      tree_candidates(f, t, c, f.delta[p][x], f.delta[q][x], path, out);
    }
    path.pop_back();
  }
}

std::size_t missing(const TestTree& t, int n, const Word& w) {
  std::size_t matched = 0;
  for (int x : w) {
    n = child_of(t, n, x);
    if (n < 0) break;
    ++matched;
  }
  return w.size() - matched;
}

class HBuilder {
 public:
  HBuilder(const Mealy& f) : f_(f) {}

  void distinguish(const Word& u, const Word& w) {
    int p = f_.reach(u), q = f_.reach(w);
    if (p == q) return;
    int nu = tree.add(u), nw = tree.add(w);
    if (separated(f_, tree, nu, nw, p, q)) return;
    auto shortest = fsm::distinguishing_trace(f_, p, q);
    if (!shortest) return;  // equivalent states; f is not minimal
    std::vector<Word> cands = fsm::distinguishing_words(f_, p, q, static_cast<int>(shortest->size()));
    Word path;
    tree_candidates(f_, tree, nu, p, q, path, cands);
    tree_candidates(f_, tree, nw, q, p, path, cands);
    const Word* best = nullptr;
    std::size_t best_cost = 0;
    for (const auto& g : cands) {
      std::size_t cost = missing(tree, nu, g) + missing(tree, nw, g);
      if (!best || cost < best_cost || (cost == best_cost && g.size() < best->size())) {
        best = &g;
        best_cost = cost;
      }
    }
    Word chosen = *best;
    tree.add(nu, chosen);
    tree.add(nw, chosen);
  }

  TestTree tree;

 private:
  const Mealy& f_;
};

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

void check_bound(const Mealy& f, int m) {
  if (m < f.size()) throw ParameterError("state bound " + std::to_string(m) + " is below the machine size " + std::to_string(f.size()));
}

}  // namespace

AbstractSuite suite_from_words(const Mealy& f, const std::vector<Word>& words) {
  TestTree t;
  for (const auto& w : words) t.add(w);
  AbstractSuite s;
  for (auto& w : t.leaves()) s.push_back({w, f.run(w)});
  return s;
}

AbstractSuite h_method(const Mealy& f, int m) {
  check_bound(f, m);
  auto V = fsm::state_cover(f);
  auto T = words_up_to(f.alphabet(), m - f.size() + 1);
  HBuilder h(f);
  for (const auto& v : V) {
    h.tree.add(v);
    for (const auto& b : T) h.tree.add(concat(v, b));
  }
  for (std::size_t i = 0; i < V.size(); ++i)
    for (std::size_t j = i + 1; j < V.size(); ++j) h.distinguish(V[i], V[j]);
  for (const auto& a : V)
    for (const auto& b : T) {
      Word u = concat(a, b);
      for (const auto& w : V) h.distinguish(u, w);
      for (std::size_t k = 1; k < b.size(); ++k) h.distinguish(concat(a, Word(b.begin(), b.begin() + static_cast<long>(k))), u);
    }
  AbstractSuite s;
  for (auto& w : h.tree.leaves()) s.push_back({w, f.run(w)});
  return s;
}

AbstractSuite w_method(const Mealy& f, int m) {
  check_bound(f, m);
  std::set<Word> wset;
  for (int p = 0; p < f.size(); ++p)
    for (int q = p + 1; q < f.size(); ++q)
      if (auto w = fsm::distinguishing_trace(f, p, q)) wset.insert(*w);
  auto V = fsm::state_cover(f);
  auto T = words_up_to(f.alphabet(), m - f.size() + 1);
  std::vector<Word> words;
  for (const auto& v : V) {
    std::vector<Word> mids{v};
    for (const auto& b : T) mids.push_back(concat(v, b));
    for (const auto& p : mids) {
      if (wset.empty()) words.push_back(p);
      for (const auto& w : wset) words.push_back(concat(p, w));
    }
  }
  return suite_from_words(f, words);
}

std::size_t max_length(const AbstractSuite& s) {
  std::size_t m = 0;
  for (const auto& c : s) m = std::max(m, c.inputs.size());
  return m;
}

std::vector<std::size_t> failing_cases(const AbstractSuite& s, const Mealy& impl) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (impl.run(s[i].inputs) != s[i].outputs) out.push_back(i);
  return out;
}

bool kills(const AbstractSuite& s, const Mealy& impl) {
  for (const auto& c : s) {
    int st = impl.initial;
    for (std::size_t k = 0; k < c.inputs.size(); ++k) {
      int x = c.inputs[k];
      if (impl.lambda[st][x] != c.outputs[k]) return true;
      st = impl.delta[st][x];
    }
  }
  return false;
}

std::string render(const AbstractSuite& s, const Mealy& f) {
  std::ostringstream os;
  for (const auto& c : s) {
    for (std::size_t k = 0; k < c.inputs.size(); ++k)
      os << (k ? " " : "") << f.inputs[c.inputs[k]] << "/" << f.outputs[c.outputs[k]];
    os << "\n";
  }
  return os.str();
}

// --------------------------------------------------------------- concrete

ConcreteSuite concretize(const AbstractSuite& s, const Mealy& f, const eqclass::ClassTable& classes) {
  ConcreteSuite out;
  out.reserve(s.size());
  for (const auto& c : s) {
    ConcreteTestCase cc;
    for (std::size_t k = 0; k < c.inputs.size(); ++k) {
      const auto& id = f.inputs[c.inputs[k]];
      cc.steps.push_back({id, classes.at(id).representative, f.outputs[c.outputs[k]]});
    }
    out.push_back(std::move(cc));
  }
  return out;
}

std::string render(const ConcreteSuite& s, const logic::Declarations& decls) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << "case " << i + 1 << "\n";
    for (const auto& st : s[i].steps) os << "  " << st.class_id << " " << st.input.to_string(decls) << " / " << st.expected << "\n";
  }
  return os.str();
}

std::string_view verdict_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Pass: return "pass";
    case Verdict::Kind::Fail: return "fail";
    case Verdict::Kind::Error: return "error";
  }
  return "?";
}

Verdict run_case(const ConcreteTestCase& c, std::size_t index, Sut& sut) {
  Verdict v;
  v.index = index;
  try {
    sut.reset();
  } catch (const std::exception& e) {
    v.kind = Verdict::Kind::Error;
    v.observed = e.what();
    return v;
  }
  for (std::size_t k = 0; k < c.steps.size(); ++k) {
    try {
      auto label = model::output_label(sut.step(c.steps[k].input));
      if (label != c.steps[k].expected) {
        v.kind = Verdict::Kind::Fail;
        v.step = k;
        v.expected = c.steps[k].expected;
        v.observed = label;
        return v;
      }
    } catch (const std::exception& e) {
      v.kind = Verdict::Kind::Error;
      v.step = k;
      v.expected = c.steps[k].expected;
      v.observed = e.what();
      return v;
    }
  }
  return v;
}

std::vector<Verdict> run_suite(const ConcreteSuite& s, Sut& sut) {
  std::vector<Verdict> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(run_case(s[i], i, sut));
  return out;
}

std::vector<Verdict> run_suite_parallel(const ConcreteSuite& s, const SutFactory& make) {
  std::vector<Verdict> out(s.size());
  long n = static_cast<long>(s.size());
#pragma omp parallel
  {
    auto sut = make();
#pragma omp for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = run_case(s[static_cast<std::size_t>(i)], static_cast<std::size_t>(i), *sut);
  }
  return out;
}

}  // namespace mbt::testgen
