#pragma once

// Online system-test campaign: a coordinator owning the scenario tree and the
// coverage ledger, and executor threads that run tree paths against the
// simulated train and talk to it by messages only.

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mbt/sstt.hpp"

namespace mbt::agents {

struct CampaignConfig {
  std::size_t sim_executors = 4;
  std::size_t wall_clock_executors = 1;
  std::uint64_t seed = 1;
  double coverage_target = 100;     // percent of normal transitions
  std::size_t max_scenarios = 200;  // runs over the whole campaign
  double pace = 0.01;               // wall-clock s per simulated s
  train::SensorProfile sensors;
  sstt::GrowOptions grow;
  sstt::RunOptions run;

  /// Throws std::invalid_argument on an unusable configuration.
  void check() const;
};

struct Message {
  enum class Kind { AssignPath, StepReport, RunVerdict, CoverageDelta, RequestNewPath, GrowNotification, Stall };
  Kind kind = Kind::StepReport;
  std::size_t executor = 0;
  std::size_t run = 0;
  // AssignPath
  std::shared_ptr<const sstt::Tree> tree;
  int leaf = -1;
  // StepReport
  std::uint64_t cycle = 0;
  int node = 0;
  // CoverageDelta
  std::size_t transition = 0;
  double t = 0;
  // RunVerdict
  std::shared_ptr<sstt::PathRun> result;
  // GrowNotification
  std::vector<std::string> paths;
};

std::string_view kind_name(Message::Kind k);

/// Unbounded FIFO shared by several producers and one consumer.
class Mailbox {
 public:
  void post(Message m);
  Message take();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> q_;
};

struct LedgerEntry {
  std::size_t transition = 0;
  model::Tag tag = model::Tag::Normal;
  std::vector<std::size_t> runs;  // covering run ids, ascending
};

struct Ledger {
  std::vector<LedgerEntry> entries;  // one per model transition
  std::size_t normal() const;
  std::size_t covered_normal() const;
  /// Covered normal transitions over all normal transitions, in percent.
  double percent() const;
  std::vector<std::size_t> uncovered_normal() const;
};

struct RunRecord {
  std::size_t id = 0;
  std::size_t round = 0;
  std::string path;
  bool grown = false;
  std::optional<std::size_t> target;  // transition a grown path was built for
  sstt::PathRun::Verdict verdict = sstt::PathRun::Verdict::Pass;
  std::string diagnostic;
  std::uint64_t cycles = 0;
  std::vector<sstt::ReqStatus> requirements;
  std::size_t new_transitions = 0;  // first covered by this run
};

struct CampaignReport {
  Ledger ledger;
  std::vector<RunRecord> runs;  // by id
  std::vector<std::string> requirement_ids;
  std::vector<sstt::ReqStatus> requirements;  // over all runs
  std::vector<double> coverage_after_round;
  std::vector<std::string> grown;  // leaf names in growth order
  bool target_met = false;
  std::string stall;  // non-empty when growth could not reach the target
  std::string tree;   // final tree, rendered

  bool all_passed() const;
};

struct ExecutorTiming {
  std::size_t id = 0;
  bool wall_clock = false;
  std::size_t runs = 0;
  std::uint64_t cycles = 0;
  double busy = 0;          // s
  double mean_period = 0;   // s per cycle, wall-clock executors
  double target_period = 0;
  bool cadence_ok = true;   // mean period within 10 % of the target
};

struct CampaignTiming {
  double wall = 0;  // s
  double grow = 0;  // s spent growing
  std::vector<ExecutorTiming> executors;
  std::size_t grown_to_wall_clock = 0;
  std::size_t runs_on_wall_clock = 0;
};

/// Protocol bookkeeping, used to check the message contract.
struct MessageStats {
  std::vector<std::size_t> count;  // by kind
  std::size_t unanswered_requests = 0;
  std::size_t unmatched_verdicts = 0;
};

struct CampaignResult {
  CampaignReport report;
  CampaignTiming timing;
  MessageStats messages;
};

/// Runs rounds until the coverage target, the scenario limit or a stall. Round
/// 0 runs every path of `tree`; later rounds run the paths grown for the
/// transitions still uncovered. The plan does not depend on the executor count.
CampaignResult run_campaign(const model::Sfsm& m, sstt::Tree tree, const std::vector<sstt::Requirement>& reqs,
                            const CampaignConfig& cfg);

std::string render(const CampaignReport& r, const model::Sfsm& m);
std::string to_json(const CampaignReport& r, const model::Sfsm& m);
/// Ledger table only: transition, tag, status and covering runs.
std::string render_ledger(const Ledger& l, const model::Sfsm& m);
std::string render(const CampaignTiming& t);

}  // namespace mbt::agents
