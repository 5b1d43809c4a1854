#include <doctest.h>

#include <random>

#include "mbt/testgen.hpp"
#include "mbt/train.hpp"
#include "random_fsm.hpp"
#include "train_fixture.hpp"

using namespace mbt;
using namespace mbt::testgen;
static const fixture::Train& fx() { return fixture::train(); }

namespace {

fsm::Word word(const fsm::Mealy& f, std::initializer_list<const char*> ids) {
  fsm::Word w;
  for (const char* id : ids) w.push_back(static_cast<int>(std::find(f.inputs.begin(), f.inputs.end(), id) - f.inputs.begin()));
  return w;
}

std::vector<std::string> labels(const fsm::Mealy& f, const fsm::Word& out) {
  std::vector<std::string> r;
  for (int o : out) r.push_back(f.outputs[o]);
  return r;
}

// Holds speed in SAFE_DRIVING one step too long: outputs 0 instead of a-.
class LazySafeDriving : public Sut {
 public:
  void reset() override { c_.reset(); }
  std::vector<model::OutputAssignment> step(const logic::Valuation& u) override {
    bool safe = c_.mode() == train::Mode::SafeDriving;
    auto out = c_.step(u);
    if (safe && c_.mode() == train::Mode::SafeDriving && out[0].value == "a-") out[0].value = "0";
    return out;
  }

 private:
  train::Controller c_;
};

// Does not brake back below vMax in NO_ACCEL.
class NoAccelOverspeed : public Sut {
 public:
  void reset() override { c_.reset(); }
  std::vector<model::OutputAssignment> step(const logic::Valuation& u) override {
    bool before = c_.mode() == train::Mode::NoAccel;
    auto out = c_.step(u);
    if (before && c_.mode() == train::Mode::NoAccel && out[0].value == "a-") out[0].value = "0";
    return out;
  }

 private:
  train::Controller c_;
};

std::size_t failures(const std::vector<Verdict>& v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](const Verdict& x) { return x.kind != Verdict::Kind::Pass; }));
}

}  // namespace

TEST_CASE("published concrete case: standstill then a movement authority") {
  const auto& f = fx().abs.minimal;
  auto w = word(f, {"c27", "c5"});
  CHECK(labels(f, f.run(w)) == std::vector<std::string>{"a:=0", "a:=a+"});
  auto suite = concretize({{w, f.run(w)}}, f, fx().classes);
  REQUIRE(suite.size() == 1);
  CHECK(suite[0].steps[0].input.get_real("xB") == 0);
  train::Controller c;
  CHECK(run_case(suite[0], 0, c).kind == Verdict::Kind::Pass);
}

TEST_CASE("published four-step module test") {
  const auto& f = fx().abs.minimal;
  auto w = word(f, {"c4", "c26", "c4", "c6"});
  CHECK(labels(f, f.run(w)) == std::vector<std::string>{"a:=a+", "a:=a-", "a:=a+", "a:=a+"});
}

TEST_CASE("suite shape for the train machine") {
  const auto& f = fx().abs.minimal;
  auto h = h_method(f, f.size());
  auto w = w_method(f, f.size());
  CHECK(h.size() >= 300);
  CHECK(h.size() <= 1200);
  CHECK(max_length(h) <= 5);
  CHECK(h.size() < w.size());
  CHECK(failing_cases(h, f).empty());
  CHECK(failing_cases(w, f).empty());
  CHECK_THROWS_AS(h_method(f, f.size() - 1), ParameterError);
  // Same inputs give the same suite.
  CHECK(render(h_method(f, f.size()), f) == render(h, f));
}

TEST_CASE("reference controllers pass the concrete suites") {
  const auto& t = fx();
  const auto& f = t.abs.minimal;
  for (const auto& [name, s] : std::vector<std::pair<std::string, AbstractSuite>>{{"H", h_method(f, f.size())}, {"W", w_method(f, f.size())}}) {
    INFO(name);
    auto c = concretize(s, f, t.classes);
    train::Controller hand;
    CHECK(failures(run_suite(c, hand)) == 0);
    train::ModelController interp(t.model);
    CHECK(failures(run_suite(c, interp)) == 0);
  }
}

TEST_CASE("a faulty controller fails the suite") {
  const auto& t = fx();
  const auto& f = t.abs.minimal;
  auto c = concretize(h_method(f, f.size()), f, t.classes);
  NoAccelOverspeed bad;
  auto v = run_suite(c, bad);
  CHECK(failures(v) > 0);
  for (const auto& x : v)
    if (x.kind == Verdict::Kind::Fail) {
      CHECK(x.expected == "a:=a-");
      CHECK(x.observed == "a:=0");
    }
}

TEST_CASE("a fault that needs an extra state is caught only with a larger bound") {
  // SAFE_DRIVING shares its minimal state with DRIVING, so a SAFE_DRIVING-only
  // fault makes the implementation one state larger than the reference.
  const auto& t = fx();
  const auto& f = t.abs.minimal;
  LazySafeDriving bad;
  auto at_n = run_suite(concretize(h_method(f, f.size()), f, t.classes), bad);
  CHECK(failures(at_n) == 0);
  auto at_n1 = run_suite(concretize(h_method(f, f.size() + 1), f, t.classes), bad);
  CHECK(failures(at_n1) > 0);
}

TEST_CASE("parallel execution matches serial execution") {
  const auto& t = fx();
  const auto& f = t.abs.minimal;
  auto c = concretize(w_method(f, f.size()), f, t.classes);
  LazySafeDriving bad;
  auto serial = run_suite(c, bad);
  auto parallel = run_suite_parallel(c, [] { return std::make_unique<LazySafeDriving>(); });
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].index == parallel[i].index);
    CHECK(serial[i].kind == parallel[i].kind);
    CHECK(serial[i].step == parallel[i].step);
  }
}

TEST_CASE("one-state machine suite") {
  fsm::Mealy one;
  one.inputs = {"x", "y"};
  one.outputs = {"o"};
  one.states = {"only"};
  one.delta = {{0, 0}};
  one.lambda = {{0, 0}};
  auto h = h_method(one, 1);
  CHECK(h.size() == 2);
  CHECK(max_length(h) == 1);
  auto w = w_method(one, 1);
  CHECK(w.size() == 2);
}

TEST_CASE("property: suites are complete on random machines") {
  std::mt19937 rng(31);
  for (int k = 0; k < 40; ++k) {
    auto f = fsm::minimize(fixture::random_mealy(rng, 2 + static_cast<int>(rng() % 4), 2, 2));
    int m = f.size() + 1;
    auto h = h_method(f, m);
    auto w = w_method(f, m);
    CHECK(failing_cases(h, f).empty());
    // Random mutants within the bound.
    for (int j = 0; j < 20; ++j) {
      auto g = fixture::random_mealy(rng, m, f.alphabet(), static_cast<int>(f.outputs.size()));
      g.outputs = f.outputs;
      bool eq = fsm::equivalent(f, g);
      CHECK(kills(h, g) == !eq);
      CHECK(kills(w, g) == !eq);
    }
  }
}
