#include <doctest.h>

#include <random>

#include "mbt/eqclass.hpp"
#include "train_fixture.hpp"

using namespace mbt;
using namespace mbt::eqclass;
using fixture::pred;
using fixture::train;

namespace {

// Class equivalent to the given predicate, or nullptr.
const InputClass* find_equivalent(const ClassTable& t, const logic::Predicate& p) {
  const auto& d = train().model.guard_domain();
  for (const auto& c : t.classes)
    if (logic::implies(c.predicate, p, d) && logic::implies(p, c.predicate, d)) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("published classes are recovered with their ids") {
  const auto& t = train().classes;
  CHECK(t.classes.size() == 28);
  CHECK(t.guards.size() == 28);
  std::pair<const char*, const char*> published[] = {
      {"c1", fixture::kC1}, {"c3", fixture::kC3}, {"c5", fixture::kC5}, {"c9", fixture::kC9}, {"c27", fixture::kC27}};
  for (auto [id, text] : published) {
    INFO(id);
    auto* c = find_equivalent(t, pred(text));
    REQUIRE(c != nullptr);
    CHECK(c->id == id);
  }
}

TEST_CASE("class invariants") {
  const auto& t = train().classes;
  const auto& d = t.domain;
  for (std::size_t i = 0; i < t.classes.size(); ++i) {
    const auto& c = t.classes[i];
    INFO(c.id);
    CHECK(c.id == "c" + std::to_string(i + 1));
    CHECK(logic::is_satisfiable(c.predicate, d));
    CHECK(logic::equivalent(c.predicate, c.minterm, d));
    CHECK(c.predicate.evaluate(c.representative));
    CHECK(t.classify(c.representative) == i);
    for (std::size_t j = i + 1; j < t.classes.size(); ++j)
      CHECK_FALSE(logic::is_satisfiable(c.predicate && t.classes[j].predicate, d));
  }
  std::vector<logic::Predicate> all;
  for (const auto& c : t.classes) all.push_back(c.predicate);
  CHECK_FALSE(logic::is_satisfiable(!logic::Predicate::disj(all), d));
}

TEST_CASE("classify: published valuations") {
  const auto& t = train().classes;
  logic::Valuation u;
  u.set_bool("pwr", false);
  u.set_bool("omega", true);
  for (const char* n : {"x", "xB", "xStop", "c", "v"}) u.set_real(n, logic::Rational(0));
  CHECK(t.classes[*t.classify(u)].id == "c1");

  // Second concrete step of the published example.
  u.set_bool("pwr", true);
  u.set_bool("omega", false);
  u.set_real("xB", logic::Rational(10000));
  u.set_real("c", logic::parse_rational("0.95"));
  u.set_real("v", logic::parse_rational("0.01"));
  CHECK(t.classes[*t.classify(u)].id == "c5");
}

TEST_CASE("representatives are readable") {
  const auto& t = train().classes;
  const auto& r27 = t.at("c27").representative;
  for (const char* n : {"x", "xB", "xStop", "v"}) CHECK(r27.get_real(n) == 0);
  CHECK(r27.get_bool("pwr"));
  CHECK_FALSE(r27.get_bool("omega"));
  // Decimals with at most one fractional digit for every class.
  for (const auto& c : t.classes)
    for (const auto& [name, value] : c.representative.values())
      if (auto r = std::get_if<logic::Rational>(&value)) CHECK(logic::Rational(*r * 10).get_den() == 1);
}

TEST_CASE("two classes for one guard and its complement") {
  logic::Declarations d;
  d.add({"v", logic::VarKind::Real, logic::Bound{0, 10}});
  auto g = logic::parse_predicate("(> v 3)", d);
  auto t = input_classes({g, g.negated(), g}, d);
  REQUIRE(t.classes.size() == 2);
  CHECK(t.guards.size() == 2);
  CHECK(logic::equivalent(t.classes[0].predicate, g, d));
  CHECK(logic::equivalent(t.classes[1].predicate, g.negated(), d));
  CHECK(t.classes[0].representative.get_real("v") == 10);
  CHECK(t.classes[1].representative.get_real("v") == 0);
}

TEST_CASE("guard keys ignore operand order") {
  const auto& d = train().model.guard_domain();
  auto a = logic::parse_predicate("(and (= pwr 1) (> v 2) (or (= omega 1) (< c 0.5)))", d);
  auto b = logic::parse_predicate("(and (or (< c 0.5) (= omega 1)) (> v 2) (= pwr 1))", d);
  auto c = logic::parse_predicate("(and (= pwr 1) (> v 3) (or (= omega 1) (< c 0.5)))", d);
  CHECK(guard_key(a) == guard_key(b));
  CHECK(guard_key(a) != guard_key(c));
  CHECK(distinct_guards({a, b, c, a}).size() == 2);
}

TEST_CASE("property: partition on random valuations") {
  const auto& t = train().classes;
  std::mt19937 rng(99);
  int failures = 0;
  for (int k = 0; k < 10000; ++k) {
    auto u = logic::random_valuation(t.domain, rng, 10);
    int n = 0;
    for (const auto& c : t.classes) n += c.predicate.evaluate(u);
    failures += n != 1;
    if (n == 1) failures += !t.classify(u).has_value();
  }
  CHECK(failures == 0);
}

TEST_CASE("property: every class fires one guard per state") {
  const auto& m = train().model;
  const auto& t = train().classes;
  for (std::size_t s = 0; s < m.states.size(); ++s)
    for (const auto& c : t.classes) {
      int n = 0;
      for (auto tr : m.outgoing(s)) n += logic::implies(c.predicate, m.transitions[tr].guard, t.domain);
      INFO(m.states[s].name, " ", c.id);
      CHECK(n == 1);
    }
}

TEST_CASE("construction is deterministic") {
  auto again = input_classes(train().model);
  CHECK(render(again) == render(train().classes));
}
