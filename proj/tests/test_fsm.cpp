#include <doctest.h>

#include <random>
#include <set>

#include "mbt/abstraction.hpp"
#include "mbt/fsm.hpp"
#include "random_fsm.hpp"
#include "train_fixture.hpp"

using namespace mbt;
using namespace mbt::fsm;
using fixture::train;

namespace {

// s1 and s2 behave identically; s2 is a copy of s1.
const char* const kDuplicate = R"(inputs a b
outputs 0 1
state 0 s0 initial
state 1 s1
state 2 s2
0 a -> 1 / 0
0 b -> 2 / 1
1 a -> 0 / 1
1 b -> 1 / 0
2 a -> 0 / 1
2 b -> 2 / 0
)";

int pairwise_distinct(const Mealy& f) {
  int bad = 0;
  for (int p = 0; p < f.size(); ++p)
    for (int q = p + 1; q < f.size(); ++q) bad += !distinguishing_trace(f, p, q).has_value();
  return bad;
}

}  // namespace

TEST_CASE("text format round trip") {
  auto f = parse(kDuplicate);
  CHECK(f.size() == 3);
  CHECK(render(parse(render(f))) == render(f));
  CHECK_THROWS(parse("inputs a\noutputs 0\nstate 0 s initial\n"));
  CHECK_THROWS(parse("inputs a\noutputs 0\nstate 0 s initial\n0 a -> 3 / 0\n"));
}

TEST_CASE("minimize merges duplicate states") {
  auto f = parse(kDuplicate);
  auto g = minimize(f);
  CHECK(g.size() == 2);
  CHECK(g.states[1] == "s1|s2");
  CHECK(equivalent(f, g));
  CHECK(minimize(g) == g);
}

TEST_CASE("counterexample is shortest and replays") {
  auto f = parse(kDuplicate);
  auto g = f;
  g.lambda[2][0] = 0;  // s2 a now outputs 0
  auto w = counterexample(f, g);
  REQUIRE(w);
  CHECK(word_text(f, *w) == "b.a");
  CHECK(f.run(*w) != g.run(*w));
  CHECK(f.run(Word(w->begin(), w->end() - 1)) == g.run(Word(w->begin(), w->end() - 1)));
  CHECK_FALSE(counterexample(f, f));

  Mealy narrow = f;
  narrow.inputs.pop_back();
  for (auto& r : narrow.delta) r.pop_back();
  for (auto& r : narrow.lambda) r.pop_back();
  CHECK_THROWS_AS(counterexample(f, narrow), AlphabetMismatch);
}

TEST_CASE("state cover and distinguishing traces") {
  auto f = minimize(parse(kDuplicate));
  auto cover = state_cover(f);
  CHECK(cover[0].empty());
  for (int s = 0; s < f.size(); ++s) CHECK(f.reach(cover[s]) == s);
  auto d = distinguishing_trace(f, 0, 1);
  REQUIRE(d);
  CHECK(d->size() == 1);
  CHECK(f.run(*d, 0) != f.run(*d, 1));

  Mealy one;
  one.inputs = {"x"};
  one.outputs = {"o"};
  one.states = {"only"};
  one.delta = {{0}};
  one.lambda = {{0}};
  auto c1 = state_cover(one);
  REQUIRE(c1.size() == 1);
  CHECK(c1[0].empty());
}

TEST_CASE("train abstraction shape") {
  const auto& a = train().abs;
  const auto& f = a.minimal;
  CHECK(f.size() == 6);
  CHECK(f.alphabet() == 28);
  CHECK(std::set<std::string>(f.outputs.begin(), f.outputs.end()) == std::set<std::string>{"a:=0", "a:=a+", "a:=a-"});
  CHECK(f.outputs.size() == 3);
  CHECK(a.full.size() == 9);
  CHECK(f.states[0] == "POWER_OFF|WAIT_FOR_MA|HALTED");
  CHECK(pairwise_distinct(f) == 0);

  auto cover = state_cover(f);
  std::size_t longest = 0;
  for (int s = 0; s < f.size(); ++s) {
    CHECK(f.reach(cover[s]) == s);
    longest = std::max(longest, cover[s].size());
  }
  CHECK(longest == 2);

  std::size_t longest_dist = 0;
  for (int p = 0; p < f.size(); ++p)
    for (int q = p + 1; q < f.size(); ++q) {
      auto w = distinguishing_trace(f, p, q);
      REQUIRE(w);
      CHECK(f.run(*w, p) != f.run(*w, q));
      longest_dist = std::max(longest_dist, w->size());
    }
  CHECK(longest_dist <= 2);
}

TEST_CASE("output mutant of the train machine is caught") {
  const auto& f = train().abs.minimal;
  auto g = f;
  g.lambda[3][4] = (g.lambda[3][4] + 1) % 3;
  auto w = counterexample(f, g);
  REQUIRE(w);
  // Diameter is 2, so a single changed output is reachable within 3 steps.
  CHECK(w->size() <= 3);
  CHECK(f.run(*w) != g.run(*w));
}

TEST_CASE("property: minimize on random machines") {
  std::mt19937 rng(17);
  for (int k = 0; k < 100; ++k) {
    int n = 1 + static_cast<int>(rng() % 8), in = 1 + static_cast<int>(rng() % 6);
    auto f = fixture::random_mealy(rng, n, in, 1 + static_cast<int>(rng() % 3));
    auto g = minimize(f);
    CHECK(equivalent(f, g));
    CHECK(g.size() <= trim(f).size());
    CHECK(pairwise_distinct(g) == 0);
    CHECK(minimize(g) == g);
    auto cover = state_cover(g);
    for (int s = 0; s < g.size(); ++s) CHECK(g.reach(cover[s]) == s);
  }
}

TEST_CASE("property: equivalence is an equivalence relation") {
  std::mt19937 rng(23);
  for (int k = 0; k < 200; ++k) {
    // Small alphabets make equivalent pairs common enough to matter.
    std::vector<Mealy> m;
    for (int i = 0; i < 3; ++i) m.push_back(fixture::random_mealy(rng, 1 + static_cast<int>(rng() % 3), 1, 1 + static_cast<int>(rng() % 2)));
    for (const auto& a : m) CHECK(equivalent(a, a));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(equivalent(m[i], m[j]) == equivalent(m[j], m[i]));
        for (int l = 0; l < 3; ++l)
          if (equivalent(m[i], m[j]) && equivalent(m[j], m[l])) CHECK(equivalent(m[i], m[l]));
      }
    // A minimised copy always joins the class of its source.
    CHECK(equivalent(m[0], minimize(m[0])));
  }
}

TEST_CASE("abstraction: one-state machine") {
  auto m = model::parse_model(R"(machine one
var p input bool
var a output enum 0 a+
state ONLY initial
transition ONLY -> ONLY normal
  guard (or (= p 0) (= p 1))
  output a 0
)");
  auto t = eqclass::input_classes(m);
  CHECK(t.classes.size() == 1);
  auto a = abstraction::abstract(m, t);
  CHECK(a.minimal.size() == 1);
  CHECK(a.minimal.outputs == std::vector<std::string>{"a:=0"});
}

TEST_CASE("abstraction: stepping agrees with the machine") {
  const auto& m = train().model;
  const auto& t = train().classes;
  const auto& a = train().abs;
  std::mt19937 rng(5);
  for (int k = 0; k < 2000; ++k) {
    auto u = logic::random_valuation(t.domain, rng, 10);
    std::size_t s = rng() % m.states.size();
    auto c = t.classify(u);
    REQUIRE(c);
    auto r = m.step(s, u);
    CHECK(r.transition == a.fired[s][*c]);
    CHECK(a.full.states[a.full.delta[s][*c]] == m.states[r.target].name);
    CHECK(a.full.outputs[a.full.lambda[s][*c]] == model::output_label(*r.outputs));
  }
}

TEST_CASE("property: simulation over representative sequences") {
  const auto& m = train().model;
  const auto& t = train().classes;
  const auto& f = train().abs.minimal;
  const auto& blocks = train().abs.block_of;
  std::mt19937 rng(8);
  for (int k = 0; k < 1000; ++k) {
    std::size_t s = m.initial;
    int q = f.initial;
    int len = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < len; ++i) {
      int c = static_cast<int>(rng() % t.classes.size());
      auto r = m.step(s, t.classes[static_cast<std::size_t>(c)].representative);
      CHECK(model::output_label(*r.outputs) == f.outputs[f.lambda[q][c]]);
      s = r.target;
      q = f.delta[q][c];
      CHECK(blocks[s] == q);
    }
  }
}
