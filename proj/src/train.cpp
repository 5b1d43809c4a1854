#include "mbt/train.hpp"

#include <cmath>

namespace mbt::train {

using logic::Rational;

void Constants::check() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("train constants: ") + what);
  };
  need(a_minus < 0 && a_plus > 0, "need a- < 0 < a+");
  need(v_min < v_safe && v_safe < v_max, "need vMin < vSafe < vMax");
  need(c_min > 0 && c_min <= 1, "need 0 < cMin <= 1");
  need(alpha > 0 && delta > 0 && dt > 0, "need alpha, delta, dt > 0");
  need(c4 >= 0 && c4 <= 1, "need c4 in [0, 1]");
}

TrainState initial_state(double xA) {
  TrainState s;
  s.x = s.x4 = s.xStop = s.xB = s.x_prev = xA;
  return s;
}

EnvState env_step(EnvState e, double a, const Constants& k) {
  double v1 = e.vel + a * k.dt;
  if (v1 < 0) {
    // Comes to rest after tau < dt.
    double tau = a < 0 ? -e.vel / a : 0;
    e.pos += e.vel * tau + a / 2 * tau * tau;
    e.vel = 0;
  } else {
    e.pos += e.vel * k.dt + a / 2 * k.dt * k.dt;
    e.vel = v1;
  }
  e.t += k.dt;
  return e;
}

double delta_stop(double v, double a, const Constants& k) { return -(v + a * k.dt) / k.a_minus; }

double x_stop_expanded(double x, double v, double a, const Constants& k) {
  double d = delta_stop(v, a, k);
  return x + v * k.dt + a / 2 * k.dt * k.dt + (v + a * k.dt) * d + k.a_minus / 2 * d * d;
}

double x_stop(double x, double v, double a, const Constants& k) {
  double d = delta_stop(v, a, k);
  return x + v * k.dt + a / 2 * k.dt * k.dt - k.a_minus / 2 * d * d;
}

TrainState c0_update(const TrainState& s, const SensorReading& r, const Constants& k) {
  TrainState n = s;
  n.x4 = s.x + s.v * k.dt + s.a / 2 * k.dt * k.dt;
  double wsum = k.c4, xsum = k.c4 * n.x4;
  for (int i = 0; i < 3; ++i) {
    wsum += r.c[i];
    xsum += r.c[i] * r.x[i];
  }
  if (wsum <= 0) throw DegenerateWeights("all position confidences are zero");
  n.x = xsum / wsum;
  n.v = 2 * (n.x - s.x) / k.dt - s.v;
  n.c = wsum / 4;
  n.xStop = x_stop(n.x, n.v, n.a, k);
  n.x_prev = n.x;
  n.v_prev = n.v;
  return n;
}

bool Intrusion::active() const {
  for (int i = 0; i < 3; ++i)
    if (x[i] || c[i]) return true;
  return false;
}

SensorReading sense(const EnvState& e, const SensorProfile& p, const Intrusion& in, const Constants& k, std::mt19937_64& rng) {
  SensorReading r;
  for (int i = 0; i < 3; ++i) {
    double bound = (1 - p.c[i]) * k.noise_k;
    double eta = bound > 0 ? std::uniform_real_distribution<double>(-bound, bound)(rng) : 0.0;
    r.x[i] = in.x[i].value_or(e.pos + eta);
    r.c[i] = in.c[i].value_or(p.c[i]);
  }
  return r;
}

// ------------------------------------------------------------- controller

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::PowerOff: return "POWER_OFF";
    case Mode::WaitForMa: return "WAIT_FOR_MA";
    case Mode::Driving: return "DRIVING";
    case Mode::SafeDriving: return "SAFE_DRIVING";
    case Mode::NoAccel: return "NO_ACCEL";
    case Mode::BrakeToTarget: return "BRAKE_TO_TARGET";
    case Mode::StopTrain: return "STOP_TRAIN";
    case Mode::BrakeForObstacle: return "BRAKE_FOR_OBSTACLE";
    case Mode::Halted: return "HALTED";
  }
  return "?";
}

logic::Valuation observe(const TrainState& s, const EnvState& e) {
  logic::Valuation u;
  u.set_bool("pwr", e.pwr);
  u.set_bool("omega", e.omega);
  u.set_real("x", logic::lift(s.x));
  u.set_real("xB", logic::lift(s.xB));
  u.set_real("xStop", logic::lift(s.xStop));
  u.set_real("c", logic::lift(s.c));
  u.set_real("v", logic::lift(s.v));
  return u;
}

double accel_value(const std::string& v, const Constants& k) {
  if (v == "a+") return k.a_plus;
  if (v == "a-") return k.a_minus;
  if (v == "0") return 0;
  throw std::invalid_argument("unknown acceleration '" + v + "'");
}

Controller::Controller(Constants k) : k_(k) { k_.check(); }

void Controller::reset() { mode_ = Mode::PowerOff; }

namespace {

enum class Cmd { Minus, Zero, Plus };

struct Inputs {
  bool pwr, omega;
  Rational v;
  bool ma, far, ahead, conf_ok;
};

std::vector<model::OutputAssignment> label(Cmd c) {
  switch (c) {
    case Cmd::Minus: return {{"a", "a-"}};
    case Cmd::Zero: return {{"a", "0"}};
    case Cmd::Plus: return {{"a", "a+"}};
  }
  return {};
}

// Speed regulation towards a target: below accelerates, at holds, above brakes.
Cmd regulate(const Rational& v, const Rational& target) {
  if (v < target) return Cmd::Plus;
  if (v == target) return Cmd::Zero;
  return Cmd::Minus;
}

}  // namespace

std::vector<model::OutputAssignment> Controller::step(const logic::Valuation& u) {
  const Rational alpha = logic::lift(k_.alpha), delta = logic::lift(k_.delta), c_min = logic::lift(k_.c_min);
  const Rational v_min = logic::lift(k_.v_min), v_safe = logic::lift(k_.v_safe), v_max = logic::lift(k_.v_max);
  Inputs in{u.get_bool("pwr"), u.get_bool("omega"), u.get_real("v"), false, false, false, false};
  const Rational& x = u.get_real("x");
  const Rational& xB = u.get_real("xB");
  const Rational& xStop = u.get_real("xStop");
  in.ma = xB - x > alpha;
  in.far = xB - xStop > delta;
  in.ahead = xB - xStop > 0;
  in.conf_ok = u.get_real("c") >= c_min;
  const bool moving = in.v > 0;

  auto go = [&](Mode m, Cmd c) {
    mode_ = m;
    return label(c);
  };

  // Entry choice of the active states.
  auto choose = [&](Mode lost_ma_moving) {
    if (!in.ma) return moving ? go(lost_ma_moving, Cmd::Minus) : go(Mode::WaitForMa, Cmd::Zero);
    if (in.far) {
      if (in.conf_ok) return go(Mode::Driving, regulate(in.v, v_max));
      return go(Mode::SafeDriving, regulate(in.v, v_safe));
    }
    if (in.ahead) return moving ? go(Mode::NoAccel, Cmd::Zero) : go(Mode::BrakeToTarget, Cmd::Plus);
    return go(Mode::BrakeToTarget, regulate(in.v, v_min));
  };

  if (!in.pwr) return go(Mode::PowerOff, Cmd::Zero);

  if (mode_ == Mode::BrakeForObstacle) {
    if (moving) return go(Mode::BrakeForObstacle, Cmd::Minus);
    return go(Mode::Halted, Cmd::Zero);
  }
  if (in.omega) return moving ? go(Mode::BrakeForObstacle, Cmd::Minus) : go(Mode::Halted, Cmd::Zero);

  switch (mode_) {
    case Mode::PowerOff:
    case Mode::WaitForMa:
    case Mode::Halted:
      return choose(Mode::WaitForMa);
    case Mode::Driving:
    case Mode::SafeDriving:
      return choose(Mode::StopTrain);
    case Mode::NoAccel:
      if (!in.ma) return moving ? go(Mode::StopTrain, Cmd::Minus) : go(Mode::WaitForMa, Cmd::Zero);
      if (in.ahead) {
        if (!moving) return go(Mode::BrakeToTarget, Cmd::Plus);
        return go(Mode::NoAccel, in.v > v_max ? Cmd::Minus : Cmd::Zero);
      }
      return go(Mode::BrakeToTarget, regulate(in.v, v_min));
    case Mode::BrakeToTarget:
      if (!in.ma) return moving ? go(Mode::StopTrain, Cmd::Minus) : go(Mode::WaitForMa, Cmd::Zero);
      return go(Mode::BrakeToTarget, regulate(in.v, v_min));
    case Mode::StopTrain:
      if (moving) return go(Mode::StopTrain, Cmd::Minus);
      return choose(Mode::StopTrain);
    case Mode::BrakeForObstacle:
      break;
  }
  return go(Mode::WaitForMa, Cmd::Zero);
}

std::vector<model::OutputAssignment> ModelController::step(const logic::Valuation& u) {
  auto r = m_.step(s_, u);
  s_ = r.target;
  last_ = r.transition;
  return *r.outputs;
}

}  // namespace mbt::train
