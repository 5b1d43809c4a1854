#include "mbt/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mbt::train {

bool Stimulus::empty() const {
  if (pwr || omega || xB || cs || clear_intrusion) return false;
  for (const auto& x : xs)
    if (x) return false;
  return true;
}

Simulation::Simulation(const model::Sfsm* model, SimConfig cfg)
    : model_(model), cfg_(cfg), rng_(cfg.seed), sut_(cfg.k) {
  env_.pos = cfg_.xA;
  env_.xB = cfg_.xA;
  env_.pwr = false;
  ts_ = initial_state(cfg_.xA);
  if (model_) model_state_ = model_->initial;
  last_.truePos = last_.x = last_.xB = last_.xStop = cfg_.xA;
  last_.state = std::string(mode_name(sut_.mode()));
}

const Cycle& Simulation::step(const Stimulus& s) {
  const Constants& k = cfg_.k;
  env_ = env_step(env_, ts_.a, k);

  if (s.pwr) env_.pwr = *s.pwr;
  if (s.omega) env_.omega = *s.omega;
  if (s.xB) env_.xB = *s.xB;
  if (s.clear_intrusion) intrusion_ = {};
  if (s.cs) intrusion_.c.fill(*s.cs);
  for (int i = 0; i < 3; ++i)
    if (s.xs[i]) intrusion_.x[i] = s.xs[i];

  auto reading = sense(env_, cfg_.sensors, intrusion_, k, rng_);
  ts_.xB = env_.xB;
  ts_ = c0_update(ts_, reading, k);
  auto u = observe(ts_, env_);

  Mode before = sut_.mode();
  auto outs = sut_.step(u);
  Cycle row;
  row.sut_label = model::output_label(outs);
  if (model_) {
    try {
      auto r = model_->step(model_state_, u);
      model_state_ = r.target;
      row.transition = r.transition;
      row.model_label = model::output_label(*r.outputs);
      row.conform = row.model_label == row.sut_label &&
                    model_->states[model_state_].name == mode_name(sut_.mode());
    } catch (const model::ModelError& e) {
      // Observation outside the model's domain, e.g. a negative speed estimate.
      row.model_label = std::string("error: ") + e.what();
      row.conform = false;
    }
  }
  std::string a = outs.empty() ? "0" : outs.front().value;
  ts_.a = accel_value(a, k);
  if (sut_.mode() == Mode::NoAccel && before != Mode::NoAccel) ts_.vConst = ts_.v;

  row.t = env_.t;
  row.truePos = env_.pos;
  row.trueVel = env_.vel;
  row.x = ts_.x;
  row.c = ts_.c;
  row.v = ts_.v;
  row.a = ts_.a;
  row.state = std::string(mode_name(sut_.mode()));
  row.xB = ts_.xB;
  row.xStop = ts_.xStop;
  row.omega = env_.omega;
  row.pwr = env_.pwr;
  reported_c_ = (reading.c[0] + reading.c[1] + reading.c[2]) / 3;
  last_ = std::move(row);
  ++cycles_;
  return last_;
}

logic::Valuation Simulation::observation() const {
  auto u = observe(ts_, env_);
  const Constants& k = cfg_.k;
  u.set_enum("a", ts_.a == k.a_plus ? "a+" : ts_.a == k.a_minus ? "a-" : "0");
  u.set_enum("mode", model_ ? model_->states[model_state_].name : std::string(mode_name(sut_.mode())));
  u.set_real("cs", logic::lift(reported_c_));
  return u;
}

logic::Declarations observation_domain(const model::Sfsm& m) {
  logic::Declarations d = m.guard_domain();
  for (const auto& v : m.variables().all())
    if (m.role(v.name) == model::Role::Output) d.add(v);
  logic::VarDecl mode{"mode", logic::VarKind::Enumerated, std::nullopt, {}, ""};
  for (const auto& s : m.states) mode.values.push_back(s.name);
  d.add(mode);
  d.add({"cs", logic::VarKind::Real, logic::Bound{0, 1}, {}, ""});
  return d;
}

std::string trace_header() { return "t,truePos,x,c,v,a,state,xB,xStop,omega"; }

std::string trace_row(const Cycle& c) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(1) << c.t << std::setprecision(6) << ',' << c.truePos << ',' << c.x << ','
    << c.c << ',' << c.v << ',' << std::setprecision(0) << c.a << ',' << c.state << ',' << std::setprecision(6)
    << c.xB << ',' << c.xStop << ',' << (c.omega ? 1 : 0);
  return o.str();
}

// ---------------------------------------------------------------- scenarios

std::uint64_t cycle_of(double t, const Constants& k) {
  return t <= 0 ? 0 : static_cast<std::uint64_t>(std::llround(t / k.dt));
}

namespace {

double number(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    double d = std::stod(tok, &used);
    if (used == tok.size() && std::isfinite(d)) return d;
  } catch (const std::exception&) {
  }
  throw ScenarioError("line " + std::to_string(line) + ": bad number '" + tok + "'");
}

std::string fmt(double d) {
  std::ostringstream o;
  o << std::setprecision(12) << d;
  return o.str();
}

}  // namespace

std::vector<Scenario> parse_scenarios(const std::string& text) {
  std::vector<Scenario> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  auto fail = [&](const std::string& msg) { throw ScenarioError("line " + std::to_string(line) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "scenario") {
      if (tok.size() != 2) fail("expected 'scenario NAME'");
      out.emplace_back().name = tok[1];
      continue;
    }
    if (out.empty()) fail("'" + kw + "' before any scenario");
    Scenario& s = out.back();
    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (tok.size() < lo || tok.size() > hi) fail("wrong number of fields for '" + kw + "'");
    };
    if (kw == "seed") {
      arity(2, 2);
      s.config.seed = std::stoull(tok[1]);
    } else if (kw == "xA") {
      arity(2, 2);
      s.config.xA = number(tok[1], line);
    } else if (kw == "sensors") {
      arity(4, 4);
      for (int i = 0; i < 3; ++i) s.config.sensors.c[i] = number(tok[i + 1], line);
    } else if (kw == "duration") {
      arity(2, 2);
      s.duration = number(tok[1], line);
    } else if (kw == "vmax") {
      arity(2, 2);
      if (number(tok[1], line) != s.config.k.v_max) fail("only the constant speed limit vMax is supported");
    } else if (kw == "at") {
      if (tok.size() < 3) fail("expected 'at T EVENT ...'");
      double t = number(tok[1], line);
      const std::string& ev = tok[2];
      ScenarioEvent e{t, {}};
      std::optional<ScenarioEvent> end;
      if (ev == "pwr") {
        arity(4, 4);
        e.stimulus.pwr = tok[3] == "1";
        if (tok[3] != "0" && tok[3] != "1") fail("pwr takes 0 or 1");
      } else if (ev == "ma") {
        arity(4, 4);
        e.stimulus.xB = number(tok[3], line);
      } else if (ev == "obstacle") {
        arity(3, 4);
        e.stimulus.omega = true;
        if (tok.size() == 4) end = ScenarioEvent{t + number(tok[3], line), {}}, end->stimulus.omega = false;
      } else if (ev == "confidence") {
        arity(4, 5);
        e.stimulus.cs = number(tok[3], line);
        if (*e.stimulus.cs < 0 || *e.stimulus.cs > 1) fail("confidence outside [0, 1]");
        if (tok.size() == 5) end = ScenarioEvent{t + number(tok[4], line), {}}, end->stimulus.clear_intrusion = true;
      } else if (ev == "position") {
        arity(5, 6);
        double i = number(tok[3], line);
        if (i != 1 && i != 2 && i != 3) fail("sensor index must be 1, 2 or 3");
        e.stimulus.xs[static_cast<std::size_t>(i) - 1] = number(tok[4], line);
        if (tok.size() == 6) end = ScenarioEvent{t + number(tok[5], line), {}}, end->stimulus.clear_intrusion = true;
      } else if (ev == "obstacle-clear") {
        arity(3, 3);
        e.stimulus.omega = false;
      } else if (ev == "clear") {
        arity(3, 3);
        e.stimulus.clear_intrusion = true;
      } else {
        fail("unknown event '" + ev + "'");
      }
      s.events.push_back(e);
      if (end) s.events.push_back(*end);
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  for (auto& s : out) {
    std::stable_sort(s.events.begin(), s.events.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
    try {
      s.config.k.check();
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(s.name + ": " + e.what());
    }
  }
  return out;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenarios(ss.str());
}

std::string render(const Scenario& s) {
  std::ostringstream o;
  o << "scenario " << s.name << "\n";
  o << "  seed " << s.config.seed << "\n";
  o << "  xA " << fmt(s.config.xA) << "\n";
  o << "  sensors " << fmt(s.config.sensors.c[0]) << ' ' << fmt(s.config.sensors.c[1]) << ' '
    << fmt(s.config.sensors.c[2]) << "\n";
  o << "  duration " << fmt(s.duration) << "\n";
  for (const auto& e : s.events) {
    const auto& st = e.stimulus;
    std::string at = "  at " + fmt(e.at) + ' ';
    if (st.pwr) o << at << "pwr " << (*st.pwr ? 1 : 0) << "\n";
    if (st.xB) o << at << "ma " << fmt(*st.xB) << "\n";
    if (st.omega) o << at << (*st.omega ? "obstacle" : "obstacle-clear") << "\n";
    if (st.clear_intrusion) o << at << "clear\n";
    if (st.cs) o << at << "confidence " << fmt(*st.cs) << "\n";
    for (int i = 0; i < 3; ++i)
      if (st.xs[i]) o << at << "position " << i + 1 << ' ' << fmt(*st.xs[i]) << "\n";
  }
  return o.str();
}

std::vector<Cycle> run_scenario(const model::Sfsm* model, const Scenario& s) {
  Simulation sim(model, s.config);
  std::vector<Cycle> out;
  const std::uint64_t n = cycle_of(s.duration, s.config.k);
  std::size_t next = 0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    Stimulus st;
    while (next < s.events.size() && cycle_of(s.events[next].at, s.config.k) <= i) {
      const auto& e = s.events[next++].stimulus;
      if (e.pwr) st.pwr = e.pwr;
      if (e.omega) st.omega = e.omega;
      if (e.xB) st.xB = e.xB;
      if (e.clear_intrusion) {
        st.clear_intrusion = true;
        st.cs.reset();
        st.xs = {};
      }
      if (e.cs) st.cs = e.cs;
      for (int k = 0; k < 3; ++k)
        if (e.xs[k]) st.xs[k] = e.xs[k];
    }
    out.push_back(sim.step(st));
  }
  return out;
}

}  // namespace mbt::train
