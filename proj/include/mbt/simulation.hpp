#pragma once

// Closed-loop train simulation: physics, sensors, estimator and the
// hand-written controller, with the controller model replayed in lockstep.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "mbt/sfsm.hpp"
#include "mbt/train.hpp"

namespace mbt::train {

/// Test stimuli applied at the start of a cycle, before the sensors are read.
struct Stimulus {
  std::optional<bool> pwr;
  std::optional<bool> omega;
  std::optional<double> xB;
  std::optional<double> cs;  // reported confidence of all three sensors
  std::array<std::optional<double>, 3> xs;  // reported positions
  bool clear_intrusion = false;
  bool empty() const;
};

inline constexpr std::size_t kNoTransition = std::numeric_limits<std::size_t>::max();

/// One trace row.
struct Cycle {
  double t = 0;
  double truePos = 0;
  double trueVel = 0;
  double x = 0;
  double c = 1;
  double v = 0;
  double a = 0;
  std::string state;  // controller mode after the step
  double xB = 0;
  double xStop = 0;
  bool omega = false;
  bool pwr = false;
  std::size_t transition = kNoTransition;  // model transition fired in lockstep
  std::string sut_label;
  std::string model_label;
  bool conform = true;
};

struct SimConfig {
  Constants k;
  double xA = 0;
  SensorProfile sensors;
  std::uint64_t seed = 1;
};

/// Single-owner mutable simulation; copies are independent (used for dry runs).
class Simulation {
 public:
  /// `model` may be null, which disables the lockstep replay.
  Simulation(const model::Sfsm* model, SimConfig cfg);

  const Cycle& step(const Stimulus& s = {});

  const Cycle& last() const { return last_; }
  const EnvState& env() const { return env_; }
  const TrainState& state() const { return ts_; }
  const Intrusion& intrusion() const { return intrusion_; }
  const Constants& constants() const { return cfg_.k; }
  Mode mode() const { return sut_.mode(); }
  std::size_t model_state() const { return model_state_; }
  const model::Sfsm* model() const { return model_; }
  std::uint64_t cycles() const { return cycles_; }

  /// Observation after the last step: the controller inputs, the command
  /// `a`, the model state `mode` and the applied confidence override `cs`.
  logic::Valuation observation() const;

 private:
  const model::Sfsm* model_;
  SimConfig cfg_;
  EnvState env_;
  TrainState ts_;
  Intrusion intrusion_;
  std::mt19937_64 rng_;
  Controller sut_;
  std::size_t model_state_ = 0;
  Cycle last_;
  double reported_c_ = 1;
  std::uint64_t cycles_ = 0;
};

/// Declarations of observation(): controller inputs plus `a`, `mode`, `cs`.
logic::Declarations observation_domain(const model::Sfsm& m);

std::string trace_header();
std::string trace_row(const Cycle& c);

// ---------------------------------------------------------------- scenarios

struct ScenarioEvent {
  double at = 0;  // s
  Stimulus stimulus;
};

/// Timed stimulus script for one simulation run.
struct Scenario {
  std::string name;
  SimConfig config;
  double duration = 600;  // s
  std::vector<ScenarioEvent> events;  // sorted by time
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line format, one scenario per `scenario NAME` block:
///   seed N | xA X | sensors C1 C2 C3 | duration T | vmax V
///   at T pwr 0|1 | at T ma X | at T obstacle [DURATION] | at T obstacle-clear
///   at T confidence C [DURATION] | at T position I X [DURATION] | at T clear
std::vector<Scenario> parse_scenarios(const std::string& text);
std::vector<Scenario> load_scenarios(const std::string& path);
std::string render(const Scenario& s);

/// Cycle index at which an event time takes effect.
std::uint64_t cycle_of(double t, const Constants& k);

/// Runs the script to its duration and returns every cycle.
std::vector<Cycle> run_scenario(const model::Sfsm* model, const Scenario& s);

}  // namespace mbt::train
