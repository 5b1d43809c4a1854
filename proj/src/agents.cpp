#include "mbt/agents.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace mbt::agents {

using Clock = std::chrono::steady_clock;
using sstt::PathRun;

void CampaignConfig::check() const {
  if (sim_executors + wall_clock_executors == 0) throw std::invalid_argument("at least one executor is needed");
  if (coverage_target < 0 || coverage_target > 100) throw std::invalid_argument("coverage target must lie in [0, 100]");
  if (pace <= 0) throw std::invalid_argument("pace must be positive");
}

std::string_view kind_name(Message::Kind k) {
  switch (k) {
    case Message::Kind::AssignPath: return "assign-path";
    case Message::Kind::StepReport: return "step-report";
    case Message::Kind::RunVerdict: return "run-verdict";
    case Message::Kind::CoverageDelta: return "coverage-delta";
    case Message::Kind::RequestNewPath: return "request-new-path";
    case Message::Kind::GrowNotification: return "grow-notification";
    case Message::Kind::Stall: return "stall";
  }
  return "?";
}

void Mailbox::post(Message m) {
  {
    std::lock_guard<std::mutex> lk(mu_);
    q_.push_back(std::move(m));
  }
  cv_.notify_one();
}

Message Mailbox::take() {
  std::unique_lock<std::mutex> lk(mu_);
  cv_.wait(lk, [&] { return !q_.empty(); });
  Message m = std::move(q_.front());
  q_.pop_front();
  return m;
}

std::size_t Ledger::normal() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const LedgerEntry& e) { return e.tag == model::Tag::Normal; }));
}

std::size_t Ledger::covered_normal() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const LedgerEntry& e) {
    return e.tag == model::Tag::Normal && !e.runs.empty();
  }));
}

double Ledger::percent() const {
  std::size_t n = normal();
  return n == 0 ? 100.0 : 100.0 * static_cast<double>(covered_normal()) / static_cast<double>(n);
}

std::vector<std::size_t> Ledger::uncovered_normal() const {
  std::vector<std::size_t> r;
  for (const auto& e : entries)
    if (e.tag == model::Tag::Normal && e.runs.empty()) r.push_back(e.transition);
  return r;
}

bool CampaignReport::all_passed() const {
  for (const auto& r : runs)
    if (r.verdict == PathRun::Verdict::Fail) return false;
  for (auto s : requirements)
    if (s == sstt::ReqStatus::Violated) return false;
  return true;
}

namespace {

Message make(Message::Kind k) {
  Message m;
  m.kind = k;
  return m;
}

struct Shared {
  const std::vector<sstt::Requirement>* reqs;
  train::SimConfig sim;
  sstt::RunOptions run;
  double pace;
  Mailbox* coordinator;
};

void executor(std::size_t id, bool wall_clock, const Shared& sh, Mailbox& inbox, ExecutorTiming& timing) {
  timing.id = id;
  timing.wall_clock = wall_clock;
  const double period = sh.sim.k.dt * sh.pace;
  timing.target_period = wall_clock ? period : 0;
  double paced_time = 0;
  std::uint64_t paced_cycles = 0;

  Message req;
  req.kind = Message::Kind::RequestNewPath;
  req.executor = id;
  sh.coordinator->post(req);
  for (;;) {
    Message m = inbox.take();
    if (m.kind == Message::Kind::Stall) break;
    if (m.kind != Message::Kind::AssignPath) continue;

    auto start = Clock::now();
    sstt::OnlineRun run(*m.tree, m.leaf, sh.sim, sh.reqs, sh.run);
    std::size_t reported = 0;
    std::uint64_t k = 0;
    for (bool more = true; more;) {
      more = run.step();
      const auto& res = run.result();
      for (; reported < res.log.size(); ++reported) {
        const auto& c = res.log[reported];
        Message s;
        s.kind = Message::Kind::StepReport;
        s.executor = id;
        s.run = m.run;
        s.cycle = reported + 1;
        s.node = res.nodes.back();
        sh.coordinator->post(std::move(s));
        if (c.transition != train::kNoTransition) {
          Message d;
          d.kind = Message::Kind::CoverageDelta;
          d.executor = id;
          d.run = m.run;
          d.transition = c.transition;
          d.t = c.t;
          sh.coordinator->post(std::move(d));
        }
      }
      if (wall_clock) std::this_thread::sleep_until(start + std::chrono::duration<double>(period * static_cast<double>(++k)));
    }
    double busy = std::chrono::duration<double>(Clock::now() - start).count();
    auto result = std::make_shared<PathRun>(run.take());
    timing.runs += 1;
    timing.cycles += result->log.size();
    timing.busy += busy;
    if (wall_clock) {
      paced_time += busy;
      paced_cycles += k;
    }

    Message v;
    v.kind = Message::Kind::RunVerdict;
    v.executor = id;
    v.run = m.run;
    v.result = std::move(result);
    sh.coordinator->post(std::move(v));
    sh.coordinator->post(req);
  }
  if (wall_clock && paced_cycles > 0) {
    timing.mean_period = paced_time / static_cast<double>(paced_cycles);
    timing.cadence_ok = std::abs(timing.mean_period - period) <= 0.1 * period;
  }
}

struct Planned {
  int leaf = -1;
  std::string path;
  bool grown = false;
  std::optional<std::size_t> target;
  std::size_t round = 0;
};

class Coordinator {
 public:
  Coordinator(const model::Sfsm& m, sstt::Tree tree, const std::vector<sstt::Requirement>& reqs, const CampaignConfig& cfg)
      : m_(m), tree_(std::move(tree)), reqs_(reqs), cfg_(cfg) {
    n_ = cfg.sim_executors + cfg.wall_clock_executors;
    stats_.count.assign(7, 0);
    for (std::size_t i = 0; i < m.transitions.size(); ++i) report_.ledger.entries.push_back({i, m.transitions[i].tag, {}});
    for (const auto& r : reqs) report_.requirement_ids.push_back(r.id);
    sim_.xA = 0;
    sim_.sensors = cfg.sensors;
    sim_.seed = cfg.seed;
  }

  CampaignResult run() {
    auto t0 = Clock::now();
    Shared sh{&reqs_, sim_, cfg_.run, cfg_.pace, &inbox_};
    std::vector<std::unique_ptr<Mailbox>> boxes;
    for (std::size_t i = 0; i < n_; ++i) boxes.push_back(std::make_unique<Mailbox>());
    timing_.executors.resize(n_);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < n_; ++i)
      threads.emplace_back(executor, i, is_wall(i), std::cref(sh), std::ref(*boxes[i]), std::ref(timing_.executors[i]));
    boxes_ = &boxes;

    campaign();

    // Every executor ends waiting for work; release it.
    while (idle_.size() < n_) handle(take());
    for (auto e : idle_) send(e, make(Message::Kind::Stall));
    idle_.clear();
    for (auto& t : threads) t.join();

    stats_.unanswered_requests = requests_ - answers_;
    stats_.unmatched_verdicts = 0;
    for (const auto& [run, n] : verdicts_per_run_) stats_.unmatched_verdicts += n != 1 || !assigned_.count(run);
    stats_.unmatched_verdicts += assigned_.size() - verdicts_per_run_.size();

    finish_requirements();
    report_.tree = sstt::render(tree_);
    timing_.wall = std::chrono::duration<double>(Clock::now() - t0).count();
    return {std::move(report_), std::move(timing_), std::move(stats_)};
  }

 private:
  bool is_wall(std::size_t e) const { return e >= cfg_.sim_executors; }

  void campaign() {
    std::vector<Planned> plan;
    for (int l : tree_.leaves()) plan.push_back({l, tree_.node(l).leaf, false, std::nullopt, 0});
    for (std::size_t round = 0;; ++round) {
      if (report_.ledger.percent() >= cfg_.coverage_target) {
        report_.target_met = true;
        return;
      }
      if (planned_ >= cfg_.max_scenarios) return;
      if (plan.empty()) plan = grow_round(round);
      if (plan.empty()) return;
      if (planned_ + plan.size() > cfg_.max_scenarios) plan.resize(cfg_.max_scenarios - planned_);
      execute_round(plan, round);
      report_.coverage_after_round.push_back(report_.ledger.percent());
      plan.clear();
    }
  }

  void execute_round(const std::vector<Planned>& plan, std::size_t round) {
    auto snapshot = std::make_shared<const sstt::Tree>(tree_);
    pending_.clear();
    std::size_t first = planned_ + 1;
    for (const auto& p : plan) {
      RunRecord r;
      r.id = ++planned_;
      r.round = round;
      r.path = p.path;
      r.grown = p.grown;
      r.target = p.target;
      report_.runs.push_back(r);
      pending_.push_back({r.id, p.leaf, p.grown});
    }
    snapshot_ = snapshot;
    std::size_t outstanding = plan.size();
    dispatch();
    while (outstanding > 0) {
      Message m = take();
      bool verdict = m.kind == Message::Kind::RunVerdict;
      handle(std::move(m));
      outstanding -= verdict;
    }
    // Commit in run id order so the ledger does not depend on scheduling.
    for (std::size_t id = first; id <= planned_; ++id) {
      auto& rec = report_.runs[id - 1];
      const auto& res = *results_.at(id);
      rec.verdict = res.verdict;
      rec.diagnostic = res.diagnostic;
      rec.cycles = res.log.size();
      rec.requirements = sstt::requirement_coverage(res);
      std::set<std::size_t> fired(deltas_[id].begin(), deltas_[id].end());
      for (auto t : fired) {
        auto& e = report_.ledger.entries[t];
        if (e.runs.empty() && e.tag == model::Tag::Normal) ++rec.new_transitions;
        e.runs.push_back(id);
      }
      deltas_.erase(id);
    }
  }

  std::vector<Planned> grow_round(std::size_t round) {
    auto t0 = Clock::now();
    auto unc = report_.ledger.uncovered_normal();
    std::set<std::size_t> remaining(unc.begin(), unc.end());
    std::vector<Planned> out;
    std::string reports;
    while (!remaining.empty() && planned_ + out.size() < cfg_.max_scenarios) {
      auto g = sstt::grow(tree_, remaining, sim_, cfg_.grow);
      if (g.leaf < 0) {
        reports += g.report;
        break;
      }
      reports += g.report;
      for (auto it = remaining.begin(); it != remaining.end() && *it < g.target;) it = remaining.erase(it);
      remaining.erase(g.target);
      for (auto c : g.covers) remaining.erase(c);
      out.push_back({g.leaf, tree_.node(g.leaf).leaf, true, g.target, round});
      report_.grown.push_back(tree_.node(g.leaf).leaf);
    }
    timing_.grow += std::chrono::duration<double>(Clock::now() - t0).count();
    if (out.empty()) {
      std::ostringstream s;
      s << "no feasible path for";
      for (auto t : unc) s << ' ' << model::Sfsm::transition_id(t);
      s << "\n" << reports;
      report_.stall = s.str();
      return out;
    }
    Message note = make(Message::Kind::GrowNotification);
    for (const auto& p : out) note.paths.push_back(p.path);
    for (std::size_t e = 0; e < n_; ++e) send(e, note);
    return out;
  }

  Message take() {
    Message m = inbox_.take();
    ++stats_.count[static_cast<std::size_t>(m.kind)];
    return m;
  }

  void send(std::size_t e, Message m) {
    ++stats_.count[static_cast<std::size_t>(m.kind)];
    if (m.kind == Message::Kind::AssignPath || m.kind == Message::Kind::Stall) ++answers_;
    (*boxes_)[e]->post(std::move(m));
  }

  void handle(Message m) {
    switch (m.kind) {
      case Message::Kind::RequestNewPath:
        ++requests_;
        idle_.push_back(m.executor);
        dispatch();
        break;
      case Message::Kind::CoverageDelta:
        deltas_[m.run].push_back(m.transition);
        break;
      case Message::Kind::RunVerdict:
        ++verdicts_per_run_[m.run];
        results_[m.run] = m.result;
        break;
      default:
        break;
    }
  }

  // Hands pending runs to waiting executors; wall-clock executors get grown paths first.
  void dispatch() {
    for (auto it = idle_.begin(); it != idle_.end() && !pending_.empty();) {
      std::size_t e = *it;
      auto pick = pending_.begin();
      if (is_wall(e)) {
        auto g = std::find_if(pending_.begin(), pending_.end(), [](const Pending& p) { return p.grown; });
        if (g != pending_.end()) pick = g;
      }
      Message a = make(Message::Kind::AssignPath);
      a.executor = e;
      a.run = pick->id;
      a.tree = snapshot_;
      a.leaf = pick->leaf;
      assigned_.insert(pick->id);
      if (is_wall(e)) {
        ++timing_.runs_on_wall_clock;
        timing_.grown_to_wall_clock += pick->grown;
      }
      pending_.erase(pick);
      send(e, std::move(a));
      it = idle_.erase(it);
    }
  }

  void finish_requirements() {
    for (std::size_t i = 0; i < reqs_.size(); ++i) {
      bool any = false, violated = false;
      for (const auto& r : report_.runs) {
        if (i >= r.requirements.size()) continue;
        violated |= r.requirements[i] == sstt::ReqStatus::Violated;
        any |= r.requirements[i] == sstt::ReqStatus::NonVacuous;
      }
      report_.requirements.push_back(violated ? sstt::ReqStatus::Violated
                                              : any ? sstt::ReqStatus::NonVacuous : sstt::ReqStatus::Vacuous);
    }
  }

  struct Pending {
    std::size_t id;
    int leaf;
    bool grown;
  };

  const model::Sfsm& m_;
  sstt::Tree tree_;
  const std::vector<sstt::Requirement>& reqs_;
  const CampaignConfig& cfg_;
  train::SimConfig sim_;
  std::size_t n_ = 0;
  Mailbox inbox_;
  std::vector<std::unique_ptr<Mailbox>>* boxes_ = nullptr;
  std::shared_ptr<const sstt::Tree> snapshot_;
  std::deque<Pending> pending_;
  std::deque<std::size_t> idle_;
  std::size_t planned_ = 0;
  std::map<std::size_t, std::vector<std::size_t>> deltas_;
  std::map<std::size_t, std::shared_ptr<PathRun>> results_;
  std::map<std::size_t, std::size_t> verdicts_per_run_;
  std::set<std::size_t> assigned_;
  std::size_t requests_ = 0, answers_ = 0;
  CampaignReport report_;
  CampaignTiming timing_;
  MessageStats stats_;
};

std::string pct(double p) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", p);
  return b;
}

std::string run_list(const std::vector<std::size_t>& runs) {
  std::string s;
  for (auto r : runs) s += (s.empty() ? "" : ",") + std::to_string(r);
  return s;
}

}  // namespace

CampaignResult run_campaign(const model::Sfsm& m, sstt::Tree tree, const std::vector<sstt::Requirement>& reqs,
                            const CampaignConfig& cfg) {
  cfg.check();
  tree.check();
  Coordinator c(m, std::move(tree), reqs, cfg);
  return c.run();
}

std::string render_ledger(const Ledger& l, const model::Sfsm& m) {
  std::ostringstream o;
  for (const auto& e : l.entries) {
    const auto& t = m.transitions[e.transition];
    o << model::Sfsm::transition_id(e.transition) << ' ' << m.states[t.source].name << " -> " << m.states[t.target].name
      << ' ' << model::tag_name(e.tag) << ' ';
    if (!e.runs.empty())
      o << "covered " << run_list(e.runs);
    else
      o << (e.tag == model::Tag::Robustness ? "exempt" : "uncovered");
    o << "\n";
  }
  o << "coverage " << l.covered_normal() << "/" << l.normal() << " normal transitions " << pct(l.percent()) << "%\n";
  return o.str();
}

std::string render(const CampaignReport& r, const model::Sfsm& m) {
  std::ostringstream o;
  o << "campaign runs=" << r.runs.size() << " rounds=" << r.coverage_after_round.size()
    << " target_met=" << (r.target_met ? "yes" : "no") << "\n";
  for (std::size_t i = 0; i < r.coverage_after_round.size(); ++i)
    o << "round " << i << " coverage " << pct(r.coverage_after_round[i]) << "%\n";
  o << "\nruns\n";
  for (const auto& x : r.runs) {
    o << "run " << x.id << " round " << x.round << " path " << x.path << " " << sstt::verdict_name(x.verdict)
      << " cycles " << x.cycles << " new " << x.new_transitions;
    if (x.target) o << " target " << model::Sfsm::transition_id(*x.target);
    if (!x.diagnostic.empty()) o << " : " << x.diagnostic;
    o << "\n";
  }
  o << "\nrequirements\n";
  for (std::size_t i = 0; i < r.requirement_ids.size(); ++i) {
    std::size_t nv = 0, va = 0, vi = 0;
    for (const auto& x : r.runs) {
      if (i >= x.requirements.size()) continue;
      nv += x.requirements[i] == sstt::ReqStatus::NonVacuous;
      va += x.requirements[i] == sstt::ReqStatus::Vacuous;
      vi += x.requirements[i] == sstt::ReqStatus::Violated;
    }
    o << r.requirement_ids[i] << ' ' << sstt::req_status_name(r.requirements[i]) << " (runs non-vacuous " << nv
      << ", vacuous " << va << ", violated " << vi << ")\n";
  }
  o << "\nledger\n" << render_ledger(r.ledger, m);
  if (!r.stall.empty()) o << "\nstall\n" << r.stall;
  return o.str();
}

std::string to_json(const CampaignReport& r, const model::Sfsm& m) {
  using nlohmann::json;
  json j;
  j["target_met"] = r.target_met;
  j["coverage_after_round"] = r.coverage_after_round;
  j["grown"] = r.grown;
  j["stall"] = r.stall;
  for (const auto& x : r.runs) {
    json run{{"id", x.id},
             {"round", x.round},
             {"path", x.path},
             {"grown", x.grown},
             {"verdict", sstt::verdict_name(x.verdict)},
             {"diagnostic", x.diagnostic},
             {"cycles", x.cycles},
             {"new_transitions", x.new_transitions}};
    if (x.target) run["target"] = model::Sfsm::transition_id(*x.target);
    json reqs = json::object();
    for (std::size_t i = 0; i < x.requirements.size(); ++i) reqs[r.requirement_ids[i]] = sstt::req_status_name(x.requirements[i]);
    run["requirements"] = reqs;
    j["runs"].push_back(run);
  }
  j["requirements"] = json::object();
  for (std::size_t i = 0; i < r.requirement_ids.size(); ++i)
    j["requirements"][r.requirement_ids[i]] = sstt::req_status_name(r.requirements[i]);
  json ledger = json::array();
  for (const auto& e : r.ledger.entries) {
    const auto& t = m.transitions[e.transition];
    ledger.push_back({{"transition", model::Sfsm::transition_id(e.transition)},
                      {"source", m.states[t.source].name},
                      {"target", m.states[t.target].name},
                      {"tag", model::tag_name(e.tag)},
                      {"status", !e.runs.empty() ? "covered" : e.tag == model::Tag::Robustness ? "exempt" : "uncovered"},
                      {"runs", e.runs}});
  }
  j["ledger"] = ledger;
  j["coverage"] = {{"covered", r.ledger.covered_normal()}, {"normal", r.ledger.normal()}, {"percent", r.ledger.percent()}};
  return j.dump(2) + "\n";
}

std::string render(const CampaignTiming& t) {
  std::ostringstream o;
  char b[160];
  std::snprintf(b, sizeof b, "wall %.3f s, growing %.3f s\n", t.wall, t.grow);
  o << b;
  for (const auto& e : t.executors) {
    std::snprintf(b, sizeof b, "executor %zu %s runs %zu cycles %llu busy %.3f s", e.id, e.wall_clock ? "wall-clock" : "sim",
                  e.runs, static_cast<unsigned long long>(e.cycles), e.busy);
    o << b;
    if (e.wall_clock && e.runs > 0) {
      std::snprintf(b, sizeof b, " period %.6f s (target %.6f s) cadence %s", e.mean_period, e.target_period,
                    e.cadence_ok ? "ok" : "off");
      o << b;
    }
    o << "\n";
  }
  o << "wall-clock runs " << t.runs_on_wall_clock << ", of which grown " << t.grown_to_wall_clock << "\n";
  return o.str();
}

}  // namespace mbt::agents
