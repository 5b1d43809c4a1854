#pragma once

// Symbolic scenario test trees: invariant-labelled nodes, guarded edges with
// symbolic stimuli, online execution against the simulated train, growth
// towards uncovered model transitions, and requirement coverage.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mbt/sfsm.hpp"
#include "mbt/simulation.hpp"

namespace mbt::sstt {

using logic::Predicate;
using logic::Valuation;

/// Variables a stimulus may set.
inline const std::vector<std::string> kControllables{"pwr", "omega", "cs", "xB"};

struct Edge {
  int from = 0;
  int to = 0;
  Predicate guard;     // over the observation
  Predicate stimulus;  // over controllables, observables fixed when solved
};

struct Node {
  std::string id;
  Predicate invariant;
  int parent_edge = -1;
  std::vector<int> out;  // edge indices in file order
  std::string leaf;      // path name; non-empty marks a leaf
  double hold = 0;       // s a leaf must be held before the run passes
  bool reconstructed = false;
};

class SsttError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Observation declarations: model inputs and observables, `a`, `mode`, `cs`,
/// the elapsed node time `tau` and entry snapshots `<var>_0` of every real.
logic::Declarations tree_domain(const model::Sfsm& m);

class Tree {
 public:
  explicit Tree(const model::Sfsm& m);

  const model::Sfsm& model() const { return *model_; }
  const logic::Declarations& domain() const { return domain_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const Edge& edge(int i) const { return edges_[static_cast<std::size_t>(i)]; }
  int find(std::string_view id) const;

  int add_node(Node n);
  int add_edge(int from, int to, Predicate guard, Predicate stimulus);

  /// Leaf node indices in node order.
  std::vector<int> leaves() const;
  /// Edge indices from the root to `node`.
  std::vector<int> path_to(int node) const;
  /// Throws SsttError unless the structure is a tree rooted at node 0.
  void check() const;

  Predicate parse(std::string_view text) const;

 private:
  const model::Sfsm* model_;
  logic::Declarations domain_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

/// Line format:
///   node ID [leaf NAME] [hold SECONDS] [reconstructed]
///     invariant PREDICATE
///   edge FROM -> TO
///     guard PREDICATE
///     stimulus PREDICATE
Tree parse_tree(const std::string& text, const model::Sfsm& m);
Tree load_tree(const std::string& path, const model::Sfsm& m);
std::string render(const Tree& t);

// ---------------------------------------------------------------- stepping

/// Observation with `tau` and the entry snapshots added.
Valuation augment(const Valuation& obs, const Valuation& entry, const logic::Rational& tau);

struct Advance {
  enum class Kind { Stay, Move, Violation };
  Kind kind = Kind::Stay;
  int edge = -1;
  int child = -1;
  std::string falsified;  // violated invariant literal
};

class AmbiguityError : public SsttError {
 public:
  using SsttError::SsttError;
};

/// One observation at `node`: take the unique enabled child edge, else stay
/// while the invariant holds. `only_edge` restricts the children considered.
Advance advance(const Tree& t, int node, const Valuation& augmented, std::optional<int> only_edge = std::nullopt);

/// First literal of `p` that is false under `u` ("" if `p` holds).
std::string falsified_literal(const Predicate& p, const Valuation& u);

/// Solves a stimulus for the current observation. Controllables already
/// satisfying it are kept; otherwise the smallest set of controllables is
/// freed and set by find_model within their declared bounds. nullopt when
/// unsatisfiable.
std::optional<train::Stimulus> solve_stimulus(const Tree& t, const Predicate& stimulus, const Valuation& augmented);

// ------------------------------------------------------------ requirements

struct Requirement {
  std::string id;
  Predicate when;
  Predicate then;
};

std::vector<Requirement> parse_requirements(const std::string& text, const Tree& t);
std::vector<Requirement> load_requirements(const std::string& path, const Tree& t);

enum class ReqStatus { NonVacuous, Vacuous, Violated };
std::string_view req_status_name(ReqStatus s);

/// Running tally over the observations of one run.
struct ReqTally {
  std::size_t antecedent_steps = 0;
  std::size_t violations = 0;
  double first_violation = -1;  // s
  ReqStatus status() const;
};

// -------------------------------------------------------------- execution

struct RunOptions {
  std::uint64_t max_node_cycles = 20000;  // per node
};

struct PathRun {
  std::string path;  // leaf name
  int leaf = -1;
  enum class Verdict { Pass, Fail, Infeasible } verdict = Verdict::Pass;
  std::string diagnostic;
  std::vector<int> nodes;                // visited, root first
  std::vector<train::Cycle> log;         // one row per cycle
  std::vector<std::size_t> fired;        // model transition per cycle
  std::vector<ReqTally> requirements;    // per requirement
};

std::string_view verdict_name(PathRun::Verdict v);

/// Status per requirement of a completed run.
std::vector<ReqStatus> requirement_coverage(const PathRun& run);

/// Online execution of the root-to-leaf path: each cycle applies the pending
/// stimulus, steps the simulation, checks the lockstep oracle, then advances
/// along the path and solves the stimulus of a crossed edge.
class OnlineRun {
 public:
  OnlineRun(const Tree& t, int leaf, train::SimConfig cfg, const std::vector<Requirement>* reqs = nullptr,
            RunOptions opt = {});
  /// One cycle; false once the run has a verdict.
  bool step();
  bool done() const { return done_; }
  const PathRun& result() const { return run_; }
  PathRun take() { return std::move(run_); }
  const train::Simulation& sim() const { return sim_; }

 private:
  void finish(PathRun::Verdict v, std::string why);

  const Tree* tree_;
  std::vector<int> path_;  // edge indices
  std::size_t pos_ = 0;    // edges crossed
  int node_ = 0;
  train::Simulation sim_;
  const std::vector<Requirement>* reqs_;
  RunOptions opt_;
  Valuation entry_;
  std::uint64_t entry_cycle_ = 0;
  train::Stimulus pending_;
  bool done_ = false;
  PathRun run_;
};

PathRun run_path(const Tree& t, int leaf, const train::SimConfig& cfg, const std::vector<Requirement>* reqs = nullptr,
                 RunOptions opt = {});

// ------------------------------------------------------------------- grow

struct GrowOptions {
  std::uint64_t max_wait_cycles = 8000;  // per path transition
  std::size_t max_paths = 40;            // candidate model paths per target
  std::size_t max_length = 7;            // transitions per candidate path
  double leaf_hold = 2;                  // s
};

struct GrowResult {
  int leaf = -1;                       // -1 if infeasible
  std::size_t target = 0;              // transition the path was built for
  std::vector<std::size_t> covers;     // uncovered transitions the dry run fired
  std::string report;                  // infeasibility reason
};

/// Adds a path from the root that fires the first uncovered normal transition
/// it can reach (robustness transitions are never targeted), ending in a
/// model end state. The path is validated by a dry run before it is kept.
/// Throws SsttError if `uncovered` holds no normal transition.
GrowResult grow(Tree& t, const std::set<std::size_t>& uncovered, const train::SimConfig& cfg, GrowOptions opt = {});

/// Stimulus constraint for firing `transition`: its guard with `c` expressed
/// through the reported confidence `cs`, keeping only literals over
/// controllables. Authorities are kept within 2 km ahead and confidences at
/// or above 0.5.
Predicate stimulus_for(const Tree& t, std::size_t transition, const train::Constants& k);

}  // namespace mbt::sstt
