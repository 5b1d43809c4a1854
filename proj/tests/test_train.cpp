#include <doctest.h>

#include <cmath>
#include <random>

#include "mbt/simulation.hpp"
#include "train_fixture.hpp"

using namespace mbt;
using namespace mbt::train;
static const fixture::Train& fx() { return fixture::train(); }

namespace {

const Constants k;

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)}); }

SensorReading exact(double pos) {
  SensorReading r;
  r.x = {pos, pos, pos};
  r.c = {1, 1, 1};
  return r;
}

Scenario nominal(double ma = 10000) {
  Scenario s;
  s.name = "nominal";
  s.duration = 700;
  ScenarioEvent on{1, {}};
  on.stimulus.pwr = true;
  ScenarioEvent auth{2, {}};
  auth.stimulus.xB = ma;
  s.events = {on, auth};
  return s;
}

bool observed_moving(const Cycle& c) { return logic::lift(c.v) > 0; }

}  // namespace

TEST_CASE("constants") {
  CHECK_NOTHROW(k.check());
  Constants bad = k;
  bad.v_safe = 30;
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
  bad = k;
  bad.a_minus = 1;
  CHECK_THROWS_AS(bad.check(), std::invalid_argument);
}

TEST_CASE("initial state") {
  auto s = initial_state(42);
  CHECK(s.x == 42);
  CHECK(s.x4 == 42);
  CHECK(s.xStop == 42);
  CHECK(s.xB == 42);
  CHECK(s.c == 1);
  CHECK(s.v == 0);
  CHECK(s.a == 0);
}

TEST_CASE("env_step") {
  EnvState e;
  auto n = env_step(e, 1, k);
  CHECK(n.pos == doctest::Approx(0.005));
  CHECK(n.vel == doctest::Approx(0.1));
  CHECK(n.t == doctest::Approx(0.1));

  e.vel = 3;
  n = env_step(e, 0, k);
  CHECK(n.pos == doctest::Approx(0.3));
  CHECK(n.vel == 3);

  e.vel = 0.05;
  n = env_step(e, -1, k);
  CHECK(n.vel == 0);
  // Stops after 0.05 s having covered v^2 / 2.
  CHECK(n.pos == doctest::Approx(0.00125));
  e.vel = 0;
  CHECK(env_step(e, -1, k).pos == 0);
}

TEST_CASE("stopping distance spot values") {
  CHECK(delta_stop(22, 0, k) == doctest::Approx(22));
  CHECK(x_stop(100, 22, 0, k) == doctest::Approx(344.2));
  CHECK(x_stop_expanded(100, 22, 0, k) == doctest::Approx(344.2));
  // 242 m after the current cycle.
  CHECK(x_stop(0, 22, 0, k) - 22 * k.dt == doctest::Approx(242));
  CHECK(delta_stop(0, 0, k) == 0);
  CHECK(x_stop(7, 0, 0, k) == 7);
}

TEST_CASE("c0_update") {
  auto s = initial_state(0);
  auto n = c0_update(s, exact(0), k);
  CHECK(n.x == 0);
  CHECK(n.v == 0);
  CHECK(n.c == doctest::Approx((3 + k.c4) / 4));

  Constants equal = k;
  equal.c4 = 1;
  s.x = 10;
  s.x4 = 10;
  SensorReading r;
  r.x = {10, 11, 13};
  r.c = {1, 1, 1};
  n = c0_update(s, r, equal);
  CHECK(n.c == 1);
  CHECK(n.x == doctest::Approx((10 + 11 + 13 + 10) / 4.0));

  Constants zero = k;
  zero.c4 = 0;
  r.c = {0, 0, 0};
  CHECK_THROWS_AS(c0_update(s, r, zero), DegenerateWeights);

  // Intruded confidences of 0.8 give 0.825 below cMin.
  r.c = {0.8, 0.8, 0.8};
  r.x = {10, 10, 10};
  n = c0_update(s, r, k);
  CHECK(n.c == doctest::Approx(0.825));
  CHECK(n.c < k.c_min);
}

TEST_CASE("property: speed identity and stopping-position forms") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0, 1e5), vel(0, 30), pick(0, 1);
  const double accel[] = {k.a_minus, 0, k.a_plus};
  int bad_identity = 0, bad_forms = 0;
  for (int i = 0; i < 10000; ++i) {
    TrainState s;
    s.x = s.x4 = pos(rng);
    s.v = vel(rng);
    s.a = accel[rng() % 3];
    double truth = s.x + s.v * k.dt + s.a / 2 * k.dt * k.dt;
    auto n = c0_update(s, exact(truth), k);
    bad_identity += !close(n.v, 2 * (n.x - s.x) / k.dt - s.v, 1e-9);
    bad_identity += !close(n.v, s.v + s.a * k.dt, 1e-6);
    bad_forms += !close(x_stop(s.x, s.v, s.a, k), x_stop_expanded(s.x, s.v, s.a, k), 1e-9);
  }
  CHECK(bad_identity == 0);
  CHECK(bad_forms == 0);
}

TEST_CASE("estimator tracks exact sensors") {
  EnvState e;
  e.vel = 2;
  auto s = initial_state(0);
  s.v = 2;
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    s.a = i < 500 ? 0.5 : 0;
    e = env_step(e, s.a, k);
    s = c0_update(s, exact(e.pos), k);
    worst = std::max(worst, std::abs(s.x - e.pos));
  }
  CHECK(worst < 1e-6);
  CHECK(s.v == doctest::Approx(e.vel));
}

TEST_CASE("sensor model") {
  EnvState e;
  e.pos = 123;
  std::mt19937_64 rng(1);
  auto r = sense(e, {}, {}, k, rng);
  CHECK(r.x == std::array<double, 3>{123, 123, 123});

  SensorProfile noisy{{0.5, 0.9, 1}};
  std::mt19937_64 a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    auto ra = sense(e, noisy, {}, k, a);
    auto rb = sense(e, noisy, {}, k, b);
    CHECK(ra.x == rb.x);
    CHECK(std::abs(ra.x[0] - 123) <= 5);
    CHECK(std::abs(ra.x[1] - 123) <= 1 + 1e-9);
    CHECK(ra.x[2] == 123);
  }

  Intrusion in;
  CHECK_FALSE(in.active());
  in.c = {0.8, 0.8, 0.8};
  in.x[1] = 99;
  CHECK(in.active());
  r = sense(e, {}, in, k, rng);
  CHECK(r.c == std::array<double, 3>{0.8, 0.8, 0.8});
  CHECK(r.x[1] == 99);
  CHECK(r.x[0] == 123);
}

TEST_CASE("controller: published reactions") {
  Controller c;
  logic::Valuation u;
  u.set_bool("pwr", true);
  u.set_bool("omega", false);
  for (const char* n : {"x", "xB", "xStop", "v"}) u.set_real(n, logic::Rational(0));
  u.set_real("c", logic::Rational(1));
  CHECK(c.step(u)[0].value == "0");
  CHECK(c.mode() == Mode::WaitForMa);
  u.set_real("xB", logic::Rational(10000));
  CHECK(c.step(u)[0].value == "a+");
  CHECK(c.mode() == Mode::Driving);

  // Low confidence while driving fast: slow down to vSafe.
  u.set_real("v", logic::Rational(15));
  u.set_real("c", logic::parse_rational("0.825"));
  CHECK(c.step(u)[0].value == "a-");
  CHECK(c.mode() == Mode::SafeDriving);

  // Within delta of the destination no acceleration.
  u.set_real("c", logic::Rational(1));
  u.set_real("xStop", logic::Rational(9900));
  u.set_real("x", logic::Rational(9700));
  CHECK(c.step(u)[0].value == "0");
  CHECK(c.mode() == Mode::NoAccel);
}

TEST_CASE("simulation stays conformant with the model") {
  auto rows = run_scenario(&fx().model, nominal());
  std::size_t nonconf = 0;
  for (const auto& r : rows) nonconf += !r.conform;
  CHECK(nonconf == 0);
  CHECK(rows.size() == 7000);
}

TEST_CASE("end-to-end: halts at the destination") {
  auto rows = run_scenario(&fx().model, nominal());
  double vmax = 0;
  for (const auto& r : rows) vmax = std::max(vmax, r.trueVel);
  const auto& last = rows.back();
  CHECK(std::abs(last.xB - last.x) <= k.alpha);
  CHECK(std::abs(last.xB - last.truePos) <= k.alpha);
  CHECK(vmax <= k.v_max + 0.2);
  CHECK(last.trueVel == 0);
  CHECK(last.state == "WAIT_FOR_MA");
}

TEST_CASE("standstill stability") {
  Scenario s;
  s.duration = 60;
  ScenarioEvent on{1, {}};
  on.stimulus.pwr = true;
  s.events = {on};
  for (const auto& r : run_scenario(&fx().model, s)) {
    CHECK(r.a == 0);
    CHECK(r.truePos == 0);
  }
}

TEST_CASE("obstacle response") {
  auto s = nominal();
  ScenarioEvent ob{120, {}};
  ob.stimulus.omega = true;
  s.events.push_back(ob);
  s.duration = 200;
  auto rows = run_scenario(&fx().model, s);
  int braking_misses = 0;
  double hit = -1, v_hit = 0, halted = -1;
  for (const auto& r : rows) {
    if (r.omega && observed_moving(r)) braking_misses += r.a != k.a_minus;
    if (r.omega && hit < 0) hit = r.t, v_hit = r.trueVel;
    if (hit >= 0 && halted < 0 && r.trueVel == 0) halted = r.t;
  }
  CHECK(braking_misses == 0);
  REQUIRE(halted > 0);
  CHECK(halted - hit <= v_hit / -k.a_minus + k.dt + 1e-9);
  CHECK(rows.back().state == "HALTED");
}

TEST_CASE("scenario files") {
  auto lib = parse_scenarios(R"(
scenario a
  seed 9
  sensors 1 0.95 1
  duration 30
  at 1 pwr 1
  at 2 ma 500      # comment
  at 5 obstacle 3
  at 6 confidence 0.8 2
scenario b
  at 0.5 pwr 1
)");
  REQUIRE(lib.size() == 2);
  CHECK(lib[0].config.seed == 9);
  CHECK(lib[0].config.sensors.c[1] == 0.95);
  CHECK(lib[0].events.size() == 6);
  CHECK(lib[0].events.back().at == 8);
  CHECK(parse_scenarios(render(lib[0]))[0].events.size() == lib[0].events.size());
  CHECK(render(parse_scenarios(render(lib[0]))[0]) == render(lib[0]));
  CHECK_THROWS_AS(parse_scenarios("at 1 pwr 1\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenarios("scenario x\n at 1 warp 9\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenarios("scenario x\n vmax 30\n"), ScenarioError);
  CHECK_THROWS_AS(parse_scenarios("scenario x\n at 1 confidence 2\n"), ScenarioError);
  CHECK_NOTHROW(load_scenarios(MBT_MODELS_DIR "/train.scenario"));

  // Same seed, same trace.
  auto noisy = lib[0];
  auto r1 = run_scenario(nullptr, noisy);
  auto r2 = run_scenario(nullptr, noisy);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(trace_row(r1[i]) == trace_row(r2[i]));
  CHECK(trace_header() == "t,truePos,x,c,v,a,state,xB,xStop,omega");
}

TEST_CASE("noisy sensors drive the speed estimate out of the model domain") {
  Scenario s = nominal();
  s.config.sensors.c = {0.95, 0.95, 0.95};
  s.duration = 60;
  auto rows = run_scenario(&fx().model, s);
  auto bad = std::find_if(rows.begin(), rows.end(), [](const Cycle& c) { return !c.conform; });
  REQUIRE(bad != rows.end());
  CHECK(bad->model_label.rfind("error:", 0) == 0);
}
