#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "mbt/sstt.hpp"
#include "train_fixture.hpp"

using namespace mbt;
using namespace mbt::sstt;
static const fixture::Train& fx() { return fixture::train(); }

namespace {

Tree library() { return load_tree(MBT_MODELS_DIR "/train.sstt", fx().model); }

std::size_t transition(std::string_view from, std::string_view to, std::string_view guard_part) {
  const auto& m = fx().model;
  for (std::size_t i = 0; i < m.transitions.size(); ++i) {
    const auto& t = m.transitions[i];
    if (m.states[t.source].name == from && m.states[t.target].name == to &&
        t.guard.to_string().find(guard_part) != std::string::npos)
      return i;
  }
  FAIL("no such transition");
  return 0;
}

bool fires(const PathRun& r, std::size_t t) { return std::find(r.fired.begin(), r.fired.end(), t) != r.fired.end(); }

Valuation observation(const Tree& t, const std::string& assignments) {
  // Standstill at x = 0 with power off, then the listed overrides.
  Valuation u;
  u.set_bool("pwr", false);
  u.set_bool("omega", false);
  for (const char* v : {"x", "xB", "xStop", "v", "tau"}) u.set_real(v, logic::Rational(0));
  u.set_real("c", logic::Rational(1));
  u.set_real("cs", logic::Rational(1));
  u.set_enum("a", "0");
  u.set_enum("mode", "POWER_OFF");
  std::istringstream in(assignments);
  std::string name, value;
  while (in >> name >> value) {
    const auto& d = t.domain().at(name);
    if (d.kind == logic::VarKind::Boolean)
      u.set_bool(name, value == "1");
    else if (d.kind == logic::VarKind::Real)
      u.set_real(name, logic::parse_rational(value));
    else
      u.set_enum(name, value);
  }
  return augment(u, u, u.get_real("tau"));
}

// Root (power off) and WMA reached by switching on at a standstill.
Tree power_up_tree() {
  Tree t(fx().model);
  Node root{"root", t.parse("(= pwr 0)"), -1, {}, "", 0, false};
  Node wma{"wma", t.parse("(and (= v 0) (= a 0))"), -1, {}, "", 0, false};
  t.add_node(root);
  t.add_node(wma);
  t.add_edge(0, 1, t.parse("(and (= pwr 1) (= omega 0) (<= (- xB x) alpha) (= v 0))"), t.parse("(= a 0)"));
  return t;
}

}  // namespace

TEST_CASE("library tree parses and round-trips") {
  auto t = library();
  CHECK_NOTHROW(t.check());
  CHECK(t.leaves().size() == 3);
  auto again = parse_tree(render(t), fx().model);
  CHECK(render(again) == render(t));
  CHECK_THROWS_AS(parse_tree("node a\n  invariant true\nedge a -> b\n", fx().model), SsttError);
  CHECK_THROWS_AS(parse_tree("node a\n  invariant (= q 1)\n", fx().model), SsttError);
}

TEST_CASE("advance: stay, move and violation") {
  auto t = power_up_tree();
  auto off = observation(t, "");
  CHECK(advance(t, 0, off).kind == Advance::Kind::Stay);

  auto on = observation(t, "pwr 1");
  auto mv = advance(t, 0, on);
  CHECK(mv.kind == Advance::Kind::Move);
  CHECK(mv.child == 1);

  auto rolling = observation(t, "pwr 1 v 0.5");
  auto vi = advance(t, 1, rolling);
  CHECK(vi.kind == Advance::Kind::Violation);
  CHECK(vi.falsified == t.parse("(= v 0)").to_string());

  // Power on while the root invariant demands it off and no edge applies.
  CHECK(advance(t, 0, observation(t, "pwr 1 v 1")).kind == Advance::Kind::Violation);
}

TEST_CASE("advance: overlapping child guards are an authoring error") {
  auto t = power_up_tree();
  Node other{"other", Predicate::truth(), -1, {}, "", 0, false};
  int o = t.add_node(other);
  t.add_edge(0, o, t.parse("(= pwr 1)"), Predicate::truth());
  CHECK_THROWS_AS(advance(t, 0, observation(t, "pwr 1")), AmbiguityError);
  // Restricted to one edge, the same observation is unambiguous.
  CHECK(advance(t, 0, observation(t, "pwr 1"), 0).child == 1);
}

TEST_CASE("advance is deterministic") {
  auto t = library();
  auto u = observation(t, "tau 1.5");
  auto a = advance(t, 0, u);
  for (int i = 0; i < 5; ++i) {
    auto b = advance(t, 0, u);
    CHECK(b.kind == a.kind);
    CHECK(b.edge == a.edge);
  }
}

TEST_CASE("stimulus solving") {
  auto t = library();
  auto u = observation(t, "pwr 1 mode WAIT_FOR_MA");
  auto s = solve_stimulus(t, t.parse("(and (> (- xB x) alpha) (<= xB 10000))"), u);
  REQUIRE(s);
  REQUIRE(s->xB);
  CHECK(*s->xB == 10000);
  CHECK_FALSE(s->pwr);

  // Already satisfied: nothing changes.
  auto same = solve_stimulus(t, t.parse("(= pwr 1)"), u);
  REQUIRE(same);
  CHECK(same->empty());

  // Depends on an observable that cannot be set.
  CHECK_FALSE(solve_stimulus(t, t.parse("(and (= omega 1) (> v 3))"), u));
  CHECK_FALSE(solve_stimulus(t, t.parse("(and (= pwr 1) (= pwr 0))"), u));

  auto conf = solve_stimulus(t, stimulus_for(t, transition("DRIVING", "SAFE_DRIVING", ""), {}), u);
  REQUIRE(conf);
  REQUIRE(conf->cs);
  CHECK(*conf->cs < (4 * 0.9 - 0.9) / 3);
  CHECK(*conf->cs >= 0.5);
}

TEST_CASE("library paths pass with the expected requirement statuses") {
  auto t = library();
  auto reqs = load_requirements(MBT_MODELS_DIR "/train.req", t);
  reqs.push_back(parse_requirements("requirement never\n  then false\n", t)[0]);
  auto idx = [&](std::string_view id) {
    return static_cast<std::size_t>(std::find_if(reqs.begin(), reqs.end(), [&](const auto& r) { return r.id == id; }) - reqs.begin());
  };
  const train::SimConfig cfg;
  std::map<std::string, PathRun> runs;
  for (int l : t.leaves()) {
    auto r = run_path(t, l, cfg, &reqs);
    INFO(r.path, " ", r.diagnostic);
    CHECK(r.verdict == PathRun::Verdict::Pass);
    CHECK(r.requirements[idx("speed_limit")].status() == ReqStatus::NonVacuous);
    CHECK(r.requirements[idx("never")].status() == ReqStatus::Violated);
    runs[r.path] = std::move(r);
  }
  const auto& brake = idx("obstacle_brake");
  CHECK(runs.at("nominal").requirements[brake].status() == ReqStatus::Vacuous);
  CHECK(runs.at("obstacle").requirements[brake].status() == ReqStatus::NonVacuous);
  CHECK(fires(runs.at("obstacle"), transition("DRIVING", "BRAKE_FOR_OBSTACLE", "")));
  CHECK(runs.at("low_confidence").requirements[idx("low_confidence_slowdown")].status() == ReqStatus::NonVacuous);
  const auto& lc = runs.at("low_confidence").log;
  CHECK(std::any_of(lc.begin(), lc.end(), [](const train::Cycle& c) { return c.state == "SAFE_DRIVING"; }));

  // Nominal arrival stops within alpha of the authority.
  const auto& last = runs.at("nominal").log.back();
  CHECK(std::abs(last.xB - last.x) <= 0.6);
  // Reruns are identical.
  auto again = run_path(t, t.find("arrived"), cfg, &reqs);
  CHECK(again.fired == runs.at("nominal").fired);
  CHECK(again.nodes == runs.at("nominal").nodes);
}

TEST_CASE("online runs report invariant violations and infeasible stimuli") {
  const auto& m = fx().model;
  auto bad = parse_tree(R"(node root
  invariant true
node moving leaf moving hold 5
  invariant (= v 0)
edge root -> moving
  guard (>= tau 1)
  stimulus (and (= pwr 1) (> (- xB x) delta) (<= xB 1000))
)",
                        m);
  auto r = run_path(bad, 1, {});
  CHECK(r.verdict == PathRun::Verdict::Fail);
  CHECK(r.diagnostic.find("(= v 0)") != std::string::npos);

  auto stuck = parse_tree(R"(node root
  invariant true
node never leaf never
  invariant true
edge root -> never
  guard (>= tau 1)
  stimulus (> v 5)
)",
                          m);
  auto s = run_path(stuck, 1, {});
  CHECK(s.verdict == PathRun::Verdict::Infeasible);
}

TEST_CASE("grow reaches SAFE_DRIVING through a confidence intrusion") {
  auto t = library();
  auto target = transition("DRIVING", "SAFE_DRIVING", "");
  const train::SimConfig cfg;
  auto g = grow(t, {target}, cfg);
  REQUIRE(g.leaf >= 0);
  CHECK(g.target == target);
  CHECK_NOTHROW(t.check());
  auto r = run_path(t, g.leaf, cfg);
  CHECK(r.verdict == PathRun::Verdict::Pass);
  CHECK(fires(r, target));
  CHECK(std::any_of(r.log.begin(), r.log.end(), [](const train::Cycle& c) { return c.c < 0.9; }));
  bool intrusion = false;
  for (int e : t.path_to(g.leaf))
    for (const auto& v : t.edge(e).stimulus.variables()) intrusion |= v == "cs";
  CHECK(intrusion);
}

TEST_CASE("grow preconditions") {
  auto t = library();
  CHECK_THROWS_AS(grow(t, {}, {}), SsttError);
  auto robust = fx().model.transitions_tagged(model::Tag::Robustness);
  CHECK_THROWS_AS(grow(t, {robust.begin(), robust.end()}, {}), SsttError);
}

TEST_CASE("property: grow keeps a tree whose paths achieve their targets") {
  // From a bare root: every grown path is validated and the structure stays a tree.
  const auto& m = fx().model;
  Tree t(m);
  t.add_node({"root", t.parse("(= mode POWER_OFF)"), -1, {}, "", 0, false});
  auto normal = m.transitions_tagged(model::Tag::Normal);
  std::set<std::size_t> uncovered(normal.begin(), normal.end());
  const train::SimConfig cfg;
  for (int k = 0; k < 8 && !uncovered.empty(); ++k) {
    auto g = grow(t, uncovered, cfg);
    REQUIRE(g.leaf >= 0);
    CHECK_NOTHROW(t.check());
    CHECK(t.edges().size() + 1 == t.nodes().size());
    auto r = run_path(t, g.leaf, cfg);
    CHECK(r.verdict == PathRun::Verdict::Pass);
    CHECK(fires(r, g.target));
    for (auto c : g.covers) {
      CHECK(fires(r, c));
      CHECK(m.transitions[c].tag == model::Tag::Normal);
      uncovered.erase(c);
    }
  }
  // Every earlier leaf still passes after later growth.
  for (int l : t.leaves()) CHECK(run_path(t, l, cfg).verdict == PathRun::Verdict::Pass);
}
