#include <doctest.h>

#include <random>

#include "mbt/sfsm.hpp"
#include "train_fixture.hpp"

using namespace mbt;
using namespace mbt::model;
using fixture::train;
using logic::Rational;

namespace {

const char* const kTiny = R"(machine tiny
var pwr input bool
var v observable real 0 10
var a output enum a- 0 a+
state IDLE initial
state RUN
transition IDLE -> RUN normal
  guard (= pwr 1)
  output a a+
transition IDLE -> IDLE normal
  guard (= pwr 0)
  output a 0
transition RUN -> IDLE robustness
  guard (or (= pwr 0) (> v 5))
  output a 0
transition RUN -> RUN normal
  guard (and (= pwr 1) (<= v 5))
  output a a+
)";

Valuation valuation(bool pwr, bool omega, double x, double xB, double xStop, double c, double v) {
  Valuation u;
  u.set_bool("pwr", pwr);
  u.set_bool("omega", omega);
  u.set_real("x", logic::lift(x));
  u.set_real("xB", logic::lift(xB));
  u.set_real("xStop", logic::lift(xStop));
  u.set_real("c", logic::lift(c));
  u.set_real("v", logic::lift(v));
  return u;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST_CASE("shipped model loads and validates") {
  const auto& m = train().model;
  auto issues = m.validate();
  for (const auto& i : issues) MESSAGE(issue_kind_name(i.kind), " ", i.state, " ", i.detail);
  CHECK(issues.empty());
  CHECK(m.states.size() == 9);
  CHECK(m.states[m.initial].name == "POWER_OFF");
  CHECK(m.role("pwr") == Role::Input);
  CHECK(m.role("v") == Role::Observable);
  CHECK(m.role("a") == Role::Output);
  CHECK(m.guard_domain().size() == 7);
}

TEST_CASE("step: published reactions") {
  const auto& m = train().model;
  // Movement authority arrives while waiting.
  auto r = m.step(m.state_at("WAIT_FOR_MA"), valuation(true, false, 0, 10000, 0, 0.95, 0.01));
  CHECK(m.states[r.target].name == "DRIVING");
  CHECK(output_label(*r.outputs) == "a:=a+");

  for (std::size_t s = 0; s < m.states.size(); ++s) {
    auto off = m.step(s, valuation(false, true, 5, 100, 30, 0.2, 12));
    CHECK(m.states[off.target].name == "POWER_OFF");
    CHECK(output_label(*off.outputs) == "a:=0");
  }

  for (const char* s : {"DRIVING", "SAFE_DRIVING", "NO_ACCEL", "BRAKE_TO_TARGET", "STOP_TRAIN"}) {
    auto ob = m.step(m.state_at(s), valuation(true, true, 0, 10000, 50, 1, 12));
    CHECK(m.states[ob.target].name == "BRAKE_FOR_OBSTACLE");
    CHECK(output_label(*ob.outputs) == "a:=a-");
  }
}

TEST_CASE("step: missing or ambiguous transitions are errors") {
  auto incomplete = parse_model(replace(kTiny, "  guard (= pwr 0)\n", "  guard (and (= pwr 0) (< v 1))\n"));
  Valuation u;
  u.set_bool("pwr", false);
  u.set_real("v", Rational(3));
  CHECK_THROWS_AS(incomplete.step(0, u), ModelError);

  auto overlapping = parse_model(replace(kTiny, "  guard (= pwr 0)\n", "  guard (or (= pwr 0) (< v 1))\n"));
  u.set_bool("pwr", true);
  u.set_real("v", Rational(0));
  CHECK_THROWS_AS(overlapping.step(0, u), ModelError);
}

TEST_CASE("validate: constructed violations") {
  auto m = parse_model(kTiny);
  CHECK(m.validate().empty());

  auto det = parse_model(replace(kTiny, "  guard (= pwr 1)\n  output a a+", "  guard (= pwr 0)\n  output a a+"));
  auto issues = det.validate();
  bool found_det = false, found_compl = false;
  for (const auto& i : issues) {
    found_det |= i.kind == Issue::Kind::Determinism && i.state == "IDLE";
    found_compl |= i.kind == Issue::Kind::Completeness && i.state == "IDLE";
  }
  CHECK(found_det);
  // pwr = 1 is now uncovered in IDLE as well.
  CHECK(found_compl);

  auto unreach = parse_model(std::string(kTiny) + "state LOST\ntransition LOST -> LOST normal\n  guard (or (= pwr 0) (= pwr 1))\n  output a 0\n");
  bool found_reach = false;
  for (const auto& i : unreach.validate()) found_reach |= i.kind == Issue::Kind::Reachability && i.state == "LOST";
  CHECK(found_reach);

  auto unsat = parse_model(replace(kTiny, "(and (= pwr 1) (<= v 5))", "(and (= pwr 1) (<= v 5) (> v 7))"));
  bool found_unsat = false;
  for (const auto& i : unsat.validate()) found_unsat |= i.kind == Issue::Kind::UnsatisfiableGuard;
  CHECK(found_unsat);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_model("machine x\nstate A initial\ntransition A -> B normal\n  guard (= 1 1)\n"), ModelError);
  CHECK_THROWS_AS(parse_model("machine x\nvar v observable real 5 1\n"), std::exception);
  CHECK_THROWS_AS(parse_model("machine x\nvar p input bool\nstate A initial\ntransition A -> A sometimes\n  guard (= p 1)\n"), ModelError);
  CHECK_THROWS(parse_model(replace(kTiny, "output a a+", "output a fast")));
}

TEST_CASE("round trip is stable") {
  const auto& m = train().model;
  std::string once = save_model(m);
  auto again = parse_model(once);
  CHECK(save_model(again) == once);
  REQUIRE(again.transitions.size() == m.transitions.size());
  for (std::size_t i = 0; i < m.transitions.size(); ++i) {
    CHECK(again.transitions[i].source == m.transitions[i].source);
    CHECK(again.transitions[i].target == m.transitions[i].target);
    CHECK(again.transitions[i].tag == m.transitions[i].tag);
    CHECK(again.transitions[i].outputs == m.transitions[i].outputs);
    CHECK(logic::equivalent(again.transitions[i].guard, m.transitions[i].guard, m.guard_domain()));
  }
  auto tiny = parse_model(kTiny);
  CHECK(save_model(parse_model(save_model(tiny))) == save_model(tiny));
}

TEST_CASE("transitions_tagged partitions the transitions") {
  const auto& m = train().model;
  auto normal = m.transitions_tagged(Tag::Normal);
  auto robust = m.transitions_tagged(Tag::Robustness);
  CHECK(normal.size() + robust.size() == m.transitions.size());
  std::vector<bool> seen(m.transitions.size(), false);
  for (auto i : normal) seen[i] = true;
  for (auto i : robust) {
    CHECK_FALSE(seen[i]);
    seen[i] = true;
  }
  CHECK(std::is_sorted(normal.begin(), normal.end()));
  CHECK(std::is_sorted(robust.begin(), robust.end()));

  // Close to the destination without having passed the braking point.
  auto r = m.step(m.state_at("DRIVING"), valuation(true, false, 9999.7, 10000, 9999.9, 1, 3));
  CHECK(std::find(robust.begin(), robust.end(), r.transition) != robust.end());
  CHECK(output_label(*r.outputs) == "a:=a-");

  auto plain = parse_model(replace(kTiny, "RUN -> IDLE robustness", "RUN -> IDLE normal"));
  CHECK(plain.transitions_tagged(Tag::Normal).size() == plain.transitions.size());
  CHECK(plain.transitions_tagged(Tag::Robustness).empty());
}

TEST_CASE("property: exactly one transition enabled per state") {
  const auto& m = train().model;
  std::mt19937 rng(2024);
  auto enabled_once = [&](const Valuation& u) {
    for (std::size_t s = 0; s < m.states.size(); ++s) {
      int n = 0;
      for (auto t : m.outgoing(s)) n += m.transitions[t].guard.evaluate(u);
      if (n != 1) return false;
    }
    return true;
  };
  int bad = 0;
  // Half uniform, half snapped to the guard constants so boundary cells get hit.
  const double v_marks[] = {0, 0.5, 1, 8, 22, 30};
  const double d_marks[] = {0, 0.6, 200, 0.3, 100, 300};
  for (int k = 0; k < 10000; ++k) {
    auto u = logic::random_valuation(m.guard_domain(), rng, 10);
    if (k % 2) {
      double x = static_cast<double>(rng() % 10000) / 10;
      u.set_real("x", logic::lift(x));
      u.set_real("v", logic::lift(v_marks[rng() % 6]));
      u.set_real("xB", logic::lift(x) + logic::lift(d_marks[rng() % 6]));
      u.set_real("xStop", logic::lift(x) + logic::lift(d_marks[rng() % 6]));
      u.set_real("c", logic::lift((rng() % 3) * 0.05 + 0.85));
    }
    bad += !enabled_once(u);
  }
  CHECK(bad == 0);
}
