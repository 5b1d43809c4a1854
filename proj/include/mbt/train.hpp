#pragma once

// The autonomous freight train: kinematics, the C0 position/speed estimator,
// position sensors, and a hand-written C1 controller.

#include <array>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbt/predicate.hpp"
#include "mbt/sfsm.hpp"
#include "mbt/testgen.hpp"

namespace mbt::train {

struct Constants {
  double a_plus = 1;    // m/s^2
  double a_minus = -1;  // m/s^2
  double dt = 0.1;      // s
  double c_min = 0.9;
  double v_safe = 8;   // m/s
  double v_max = 22;   // m/s
  double v_min = 1;    // m/s
  double delta = 200;  // m
  double alpha = 0.6;  // m
  double c4 = 0.9;     // confidence of the dead-reckoning estimate
  double noise_k = 10; // m, sensor noise bound at confidence 0

  /// Throws std::invalid_argument when the ordering constraints fail.
  void check() const;
};

struct TrainState {
  double x = 0;      // aggregated position estimate
  double c = 1;      // overall confidence
  double x4 = 0;     // dead-reckoning estimate
  double v = 0;      // speed estimate
  double a = 0;      // commanded acceleration
  double xStop = 0;  // predicted stopping position
  double xB = 0;     // movement authority
  double x_prev = 0;
  double v_prev = 0;
  double vConst = 0;  // speed held in NO_ACCEL
};

TrainState initial_state(double xA);

struct SensorReading {
  std::array<double, 3> x{};
  std::array<double, 3> c{};
};

struct EnvState {
  double pos = 0;
  double vel = 0;
  bool omega = false;
  double xB = 0;
  double vMaxCmd = 22;
  bool pwr = true;
  double t = 0;
  double t0 = 0;
};

/// One cycle of constant-acceleration motion. A braking train stops inside
/// the cycle instead of reversing.
EnvState env_step(EnvState e, double a, const Constants& k);

class DegenerateWeights : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Estimator cycle: x4, x, v, c, xStop, then the snapshots.
TrainState c0_update(const TrainState& s, const SensorReading& r, const Constants& k);

double delta_stop(double v, double a, const Constants& k);
/// Stopping position written out as motion over the stopping interval.
double x_stop_expanded(double x, double v, double a, const Constants& k);
/// Simplified form used by the estimator.
double x_stop(double x, double v, double a, const Constants& k);

struct SensorProfile {
  std::array<double, 3> c{1, 1, 1};  // true sensor quality
};

/// Test-side override of what the sensors report.
struct Intrusion {
  std::array<std::optional<double>, 3> x;
  std::array<std::optional<double>, 3> c;
  bool active() const;
};

/// Each sensor reports pos + noise with |noise| <= (1 - c_i) * K, then the
/// intrusion replaces individual values.
SensorReading sense(const EnvState& e, const SensorProfile& p, const Intrusion& in, const Constants& k, std::mt19937_64& rng);

// ------------------------------------------------------------- controller

enum class Mode { PowerOff, WaitForMa, Driving, SafeDriving, NoAccel, BrakeToTarget, StopTrain, BrakeForObstacle, Halted };

std::string_view mode_name(Mode m);

/// Controller inputs seen at one cycle; reals are lifted to the 1e-9 grid.
logic::Valuation observe(const TrainState& s, const EnvState& e);

/// Hand-written C1 controller.
class Controller : public testgen::Sut {
 public:
  explicit Controller(Constants k = {});
  void reset() override;
  std::vector<model::OutputAssignment> step(const logic::Valuation& u) override;
  Mode mode() const { return mode_; }

 private:
  Constants k_;
  Mode mode_ = Mode::PowerOff;
};

/// Interprets an SFSM; one instance per thread.
class ModelController : public testgen::Sut {
 public:
  explicit ModelController(const model::Sfsm& m) : m_(m), s_(m.initial) {}
  void reset() override { s_ = m_.initial; }
  std::vector<model::OutputAssignment> step(const logic::Valuation& u) override;
  std::size_t state() const { return s_; }
  /// Transition fired by the last step.
  std::size_t last_transition() const { return last_; }

 private:
  const model::Sfsm& m_;
  std::size_t s_;
  std::size_t last_ = 0;
};

/// Numeric acceleration for an output label value ("a-", "0", "a+").
double accel_value(const std::string& v, const Constants& k);

}  // namespace mbt::train
