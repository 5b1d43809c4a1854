#include <doctest.h>

#include "mbt/mutation.hpp"
#include "train_fixture.hpp"

using namespace mbt;
using namespace mbt::mutation;
static const fixture::Train& fx() { return fixture::train(); }

namespace {

int differing_cells(const fsm::Mealy& a, const fsm::Mealy& b, bool outputs) {
  int n = 0;
  for (int s = 0; s < a.size(); ++s)
    for (int x = 0; x < a.alphabet(); ++x) n += outputs ? a.lambda[s][x] != b.lambda[s][x] : a.delta[s][x] != b.delta[s][x];
  return n;
}

SymbolicSource source() { return {&fx().model, &fx().classes, &fx().abs}; }

}  // namespace

TEST_CASE("operators") {
  const auto& f = fx().abs.minimal;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto o = output_swap(f, seed);
    CHECK(differing_cells(f, o.machine, true) == 1);
    CHECK(differing_cells(f, o.machine, false) == 0);
    CHECK_FALSE(fsm::equivalent(f, o.machine));

    auto r = retarget(f, seed);
    CHECK(differing_cells(f, r.machine, false) == 1);
    CHECK(differing_cells(f, r.machine, true) == 0);

    auto s = state_split(f, seed);
    CHECK(s.machine.size() == f.size() + 1);
    CHECK_NOTHROW(s.machine.check());

    auto g = guard_flip(source(), seed);
    CHECK(g.machine.alphabet() == f.alphabet());
    CHECK_NOTHROW(g.machine.check());
  }
}

TEST_CASE("generation is reproducible and respects the bound") {
  const auto& f = fx().abs.minimal;
  auto src = source();
  auto a = generate_mutants(f, 7, 60, 5, &src);
  auto b = generate_mutants(f, 7, 60, 5, &src);
  REQUIRE(a.size() == 60);
  bool split = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == i + 1);
    CHECK(a[i].machine == b[i].machine);
    CHECK(a[i].description == b[i].description);
    CHECK(a[i].machine.size() <= 7);
    split |= a[i].op == Operator::StateSplit;
  }
  CHECK(split);
  for (const auto& m : generate_mutants(f, 6, 60, 5)) CHECK(m.op != Operator::StateSplit);
  CHECK_THROWS_AS(generate_mutants(f, 5, 1, 1), MutationError);
}

TEST_CASE("equivalent mutants are not killed") {
  // Retargeting into an equivalent duplicate state changes nothing observable.
  auto f = fsm::parse(R"(inputs a b
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
)");
  auto ref = fsm::minimize(f);
  Mutant same{1, Operator::Retarget, f, 0, ""};
  same.machine.delta[0][0] = 2;
  Mutant swapped{2, Operator::OutputSwap, f, 0, ""};
  swapped.machine.lambda[1][1] = 1;
  auto suite = testgen::h_method(ref, 3);
  auto rep = kill_report(suite, ref, {same, swapped});
  REQUIRE(rep.results.size() == 2);
  CHECK(rep.results[0].equivalent);
  CHECK_FALSE(rep.results[0].killed);
  CHECK_FALSE(rep.results[1].equivalent);
  CHECK(rep.results[1].killed);
  CHECK(rep.kill_rate() == 1.0);
  CHECK(rep.false_alarms == 0);
}

TEST_CASE("train suites kill every non-equivalent mutant") {
  const auto& f = fx().abs.minimal;
  auto src = source();
  for (int m : {6, 7}) {
    INFO("m=", m);
    auto mutants = generate_mutants(f, m, 150, 99, &src);
    for (const auto& suite : {testgen::h_method(f, m), testgen::w_method(f, m)}) {
      auto rep = kill_report(suite, f, mutants);
      CHECK(rep.survivors == 0);
      CHECK(rep.false_alarms == 0);
      CHECK(rep.kill_rate() == 1.0);
      auto serial = kill_report_serial(suite, f, mutants);
      CHECK(render(serial, "s") == render(rep, "s"));
    }
  }
}
