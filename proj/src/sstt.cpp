#include "mbt/sstt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

namespace mbt::sstt {

using logic::Rational;
using logic::VarKind;

logic::Declarations tree_domain(const model::Sfsm& m) {
  logic::Declarations d = train::observation_domain(m);
  std::vector<logic::VarDecl> snaps;
  for (const auto& v : d.all())
    if (v.kind == VarKind::Real) snaps.push_back({v.name + "_0", VarKind::Real, v.bounds, {}, v.unit});
  d.add({"tau", VarKind::Real, logic::Bound{0, 1000000}, {}, "s"});
  for (auto& s : snaps) d.add(std::move(s));
  return d;
}

// ------------------------------------------------------------------ tree

Tree::Tree(const model::Sfsm& m) : model_(&m), domain_(tree_domain(m)) {}

int Tree::find(std::string_view id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].id == id) return static_cast<int>(i);
  return -1;
}

int Tree::add_node(Node n) {
  if (n.id.empty()) n.id = "n" + std::to_string(nodes_.size());
  if (find(n.id) >= 0) throw SsttError("duplicate node " + n.id);
  n.parent_edge = -1;
  n.out.clear();
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size() - 1);
}

int Tree::add_edge(int from, int to, Predicate guard, Predicate stimulus) {
  auto n = static_cast<int>(nodes_.size());
  if (from < 0 || from >= n || to < 0 || to >= n) throw SsttError("edge endpoint out of range");
  if (to == 0) throw SsttError("edge into the root");
  if (nodes_[static_cast<std::size_t>(to)].parent_edge >= 0)
    throw SsttError("node " + nodes_[static_cast<std::size_t>(to)].id + " has two parents");
  if (!nodes_[static_cast<std::size_t>(from)].leaf.empty())
    throw SsttError("leaf " + nodes_[static_cast<std::size_t>(from)].id + " has a child");
  for (const auto& v : stimulus.variables())
    if (domain_.find(v) == nullptr) throw SsttError("stimulus mentions unknown variable " + v);
  edges_.push_back({from, to, std::move(guard), std::move(stimulus)});
  int e = static_cast<int>(edges_.size() - 1);
  nodes_[static_cast<std::size_t>(from)].out.push_back(e);
  nodes_[static_cast<std::size_t>(to)].parent_edge = e;
  return e;
}

std::vector<int> Tree::leaves() const {
  std::vector<int> r;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!nodes_[i].leaf.empty()) r.push_back(static_cast<int>(i));
  return r;
}

std::vector<int> Tree::path_to(int node) const {
  std::vector<int> p;
  while (node != 0) {
    int e = nodes_.at(static_cast<std::size_t>(node)).parent_edge;
    if (e < 0) throw SsttError("node " + nodes_[static_cast<std::size_t>(node)].id + " is detached");
    p.push_back(e);
    node = edges_[static_cast<std::size_t>(e)].from;
  }
  std::reverse(p.begin(), p.end());
  return p;
}

void Tree::check() const {
  if (nodes_.empty()) throw SsttError("empty tree");
  if (!nodes_[0].leaf.empty()) throw SsttError("root is a leaf");
  std::set<std::string> names;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (i > 0 && n.parent_edge < 0) throw SsttError("node " + n.id + " is detached");
    if (i > 0 && n.leaf.empty() && n.out.empty()) throw SsttError("inner node " + n.id + " has no children");
    if (!n.leaf.empty() && !names.insert(n.leaf).second) throw SsttError("duplicate path name " + n.leaf);
    path_to(static_cast<int>(i));  // cycles show up as a detached walk
  }
  // Every node reaches the root in at most |nodes| steps.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    int cur = static_cast<int>(i);
    for (std::size_t k = 0; cur != 0; ++k) {
      if (k > nodes_.size()) throw SsttError("cycle through node " + nodes_[i].id);
      cur = edges_[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(cur)].parent_edge)].from;
    }
  }
}

Predicate Tree::parse(std::string_view text) const { return logic::parse_predicate(text, domain_, model_->constants); }

namespace {

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  auto h = s.find('#');
  return trim(h == std::string::npos ? s : s.substr(0, h));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SsttError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double d) {
  std::ostringstream o;
  o << d;
  return o.str();
}

}  // namespace

Tree parse_tree(const std::string& text, const model::Sfsm& m) {
  Tree t(m);
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  struct PendingEdge {
    std::string from, to;
    std::optional<Predicate> guard, stimulus;
    int line;
  };
  std::vector<PendingEdge> pending;
  std::vector<std::pair<Node, int>> nodes;
  enum { None, InNode, InEdge } ctx = None;
  auto fail = [&](const std::string& why) { throw SsttError("line " + std::to_string(line) + ": " + why); };

  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip_comment(raw);
    if (s.empty()) continue;
    std::istringstream ls(s);
    std::string kw;
    ls >> kw;
    std::string rest;
    std::getline(ls, rest);
    rest = trim(rest);
    try {
      if (kw == "node") {
        std::istringstream rs(rest);
        Node n;
        rs >> n.id;
        if (n.id.empty()) fail("node without id");
        std::string w;
        while (rs >> w) {
          if (w == "leaf") {
            if (!(rs >> n.leaf)) fail("leaf without name");
          } else if (w == "hold") {
            if (!(rs >> n.hold) || n.hold < 0) fail("bad hold");
          } else if (w == "reconstructed") {
            n.reconstructed = true;
          } else {
            fail("unknown node attribute " + w);
          }
        }
        nodes.emplace_back(std::move(n), line);
        ctx = InNode;
      } else if (kw == "invariant") {
        if (ctx != InNode) fail("invariant outside a node");
        nodes.back().first.invariant = t.parse(rest);
      } else if (kw == "edge") {
        std::istringstream rs(rest);
        PendingEdge e;
        std::string arrow;
        rs >> e.from >> arrow >> e.to;
        if (arrow != "->" || e.to.empty()) fail("expected: edge FROM -> TO");
        e.line = line;
        pending.push_back(std::move(e));
        ctx = InEdge;
      } else if (kw == "guard" || kw == "stimulus") {
        if (ctx != InEdge) fail(kw + " outside an edge");
        (kw == "guard" ? pending.back().guard : pending.back().stimulus) = t.parse(rest);
      } else {
        fail("unknown keyword " + kw);
      }
    } catch (const logic::ParseError& e) {
      fail(e.what());
    }
  }
  for (auto& [n, l] : nodes) {
    line = l;
    try {
      t.add_node(std::move(n));
    } catch (const SsttError& e) {
      fail(e.what());
    }
  }
  for (auto& e : pending) {
    line = e.line;
    int from = t.find(e.from), to = t.find(e.to);
    if (from < 0) fail("unknown node " + e.from);
    if (to < 0) fail("unknown node " + e.to);
    try {
      t.add_edge(from, to, e.guard.value_or(Predicate::truth()), e.stimulus.value_or(Predicate::truth()));
    } catch (const SsttError& x) {
      fail(x.what());
    }
  }
  t.check();
  return t;
}

Tree load_tree(const std::string& path, const model::Sfsm& m) { return parse_tree(read_file(path), m); }

std::string render(const Tree& t) {
  std::ostringstream o;
  for (const auto& n : t.nodes()) {
    o << "node " << n.id;
    if (!n.leaf.empty()) o << " leaf " << n.leaf;
    if (n.hold > 0) o << " hold " << fmt(n.hold);
    if (n.reconstructed) o << " reconstructed";
    o << "\n  invariant " << n.invariant.to_string() << "\n";
  }
  for (const auto& e : t.edges()) {
    o << "edge " << t.node(e.from).id << " -> " << t.node(e.to).id << "\n";
    o << "  guard " << e.guard.to_string() << "\n";
    o << "  stimulus " << e.stimulus.to_string() << "\n";
  }
  return o.str();
}

// ---------------------------------------------------------------- stepping

Valuation augment(const Valuation& obs, const Valuation& entry, const Rational& tau) {
  Valuation u = obs;
  u.set_real("tau", tau);
  for (const auto& [name, v] : obs.values())
    if (std::holds_alternative<Rational>(v)) u.set(name + "_0", entry.has(name) ? entry.get(name) : v);
  return u;
}

std::string falsified_literal(const Predicate& p, const Valuation& u) {
  using K = Predicate::Kind;
  switch (p.kind()) {
    case K::True: return "";
    case K::False: return "false";
    case K::Lit: return p.evaluate(u) ? "" : p.to_string();
    case K::And:
      for (const auto& c : p.children())
        if (auto s = falsified_literal(c, u); !s.empty()) return s;
      return "";
    case K::Or:
      if (p.evaluate(u)) return "";
      return falsified_literal(p.children().front(), u);
  }
  return "";
}

Advance advance(const Tree& t, int node, const Valuation& u, std::optional<int> only_edge) {
  const Node& n = t.node(node);
  std::vector<int> enabled;
  for (int e : n.out)
    if ((!only_edge || *only_edge == e) && t.edge(e).guard.evaluate(u)) enabled.push_back(e);
  if (enabled.size() > 1) {
    std::string ids;
    for (int e : enabled) ids += " " + t.node(t.edge(e).to).id;
    throw AmbiguityError("node " + n.id + ": several edges enabled, towards" + ids);
  }
  Advance r;
  if (enabled.size() == 1) {
    r.kind = Advance::Kind::Move;
    r.edge = enabled[0];
    r.child = t.edge(r.edge).to;
    return r;
  }
  r.falsified = falsified_literal(n.invariant, u);
  r.kind = r.falsified.empty() ? Advance::Kind::Stay : Advance::Kind::Violation;
  return r;
}

std::optional<train::Stimulus> solve_stimulus(const Tree& t, const Predicate& stimulus, const Valuation& u) {
  Valuation fixed, current;
  for (const auto& [name, v] : u.values()) {
    bool ctl = std::find(kControllables.begin(), kControllables.end(), name) != kControllables.end();
    (ctl ? current : fixed).set(name, v);
  }
  Predicate r = stimulus.restricted(fixed);
  if (r.evaluate(current)) return train::Stimulus{};

  auto vars = r.variables();
  std::vector<std::string> free;
  for (const auto& c : kControllables)
    if (std::find(vars.begin(), vars.end(), c) != vars.end()) free.push_back(c);

  // Subsets by size, then in controllable order.
  const std::size_t n = free.size();
  std::vector<unsigned> masks;
  for (unsigned m = 1; m < (1u << n); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](unsigned a, unsigned b) { return __builtin_popcount(a) < __builtin_popcount(b); });

  for (unsigned mask : masks) {
    Valuation keep;
    logic::Declarations d;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i))
        d.add(t.domain().at(free[i]));
      else
        keep.set(free[i], current.get(free[i]));
    }
    auto model = logic::find_model(r.restricted(keep), d);
    if (!model) continue;
    train::Stimulus s;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      const auto& name = free[i];
      if (name == "pwr") s.pwr = model->get_bool(name);
      if (name == "omega") s.omega = model->get_bool(name);
      if (name == "xB") s.xB = model->get_double(name);
      if (name == "cs") s.cs = model->get_double(name);
    }
    return s;
  }
  return std::nullopt;
}

// ------------------------------------------------------------ requirements

std::vector<Requirement> parse_requirements(const std::string& text, const Tree& t) {
  std::vector<Requirement> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::set<std::string> ids;
  std::vector<std::pair<bool, bool>> seen;  // when, then
  auto fail = [&](const std::string& why) { throw SsttError("requirements line " + std::to_string(line) + ": " + why); };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip_comment(raw);
    if (s.empty()) continue;
    std::istringstream ls(s);
    std::string kw, rest;
    ls >> kw;
    std::getline(ls, rest);
    rest = trim(rest);
    try {
      if (kw == "requirement") {
        if (rest.empty()) fail("requirement without id");
        if (!ids.insert(rest).second) fail("duplicate requirement " + rest);
        out.push_back({rest, Predicate::truth(), Predicate::truth()});
        seen.emplace_back(false, false);
      } else if (kw == "when" || kw == "then") {
        if (out.empty()) fail(kw + " outside a requirement");
        (kw == "when" ? out.back().when : out.back().then) = t.parse(rest);
        (kw == "when" ? seen.back().first : seen.back().second) = true;
      } else {
        fail("unknown keyword " + kw);
      }
    } catch (const logic::ParseError& e) {
      fail(e.what());
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!seen[i].second) throw SsttError("requirement " + out[i].id + " has no consequent");
  return out;
}

std::vector<Requirement> load_requirements(const std::string& path, const Tree& t) {
  return parse_requirements(read_file(path), t);
}

std::string_view req_status_name(ReqStatus s) {
  switch (s) {
    case ReqStatus::NonVacuous: return "non-vacuous";
    case ReqStatus::Vacuous: return "vacuous";
    case ReqStatus::Violated: return "violated";
  }
  return "?";
}

ReqStatus ReqTally::status() const {
  if (violations > 0) return ReqStatus::Violated;
  return antecedent_steps > 0 ? ReqStatus::NonVacuous : ReqStatus::Vacuous;
}

// -------------------------------------------------------------- execution

std::string_view verdict_name(PathRun::Verdict v) {
  switch (v) {
    case PathRun::Verdict::Pass: return "pass";
    case PathRun::Verdict::Fail: return "fail";
    case PathRun::Verdict::Infeasible: return "infeasible";
  }
  return "?";
}

std::vector<ReqStatus> requirement_coverage(const PathRun& run) {
  std::vector<ReqStatus> r;
  for (const auto& t : run.requirements) r.push_back(t.status());
  return r;
}

OnlineRun::OnlineRun(const Tree& t, int leaf, train::SimConfig cfg, const std::vector<Requirement>* reqs, RunOptions opt)
    : tree_(&t), path_(t.path_to(leaf)), sim_(&t.model(), std::move(cfg)), reqs_(reqs), opt_(opt) {
  if (t.node(leaf).leaf.empty()) throw SsttError("node " + t.node(leaf).id + " is not a leaf");
  entry_ = sim_.observation();
  run_.path = t.node(leaf).leaf;
  run_.leaf = leaf;
  run_.nodes.push_back(0);
  if (reqs_) run_.requirements.resize(reqs_->size());
}

void OnlineRun::finish(PathRun::Verdict v, std::string why) {
  run_.verdict = v;
  run_.diagnostic = std::move(why);
  done_ = true;
}

bool OnlineRun::step() {
  if (done_) return false;
  const train::Cycle& c = sim_.step(pending_);
  pending_ = {};
  run_.log.push_back(c);
  run_.fired.push_back(c.transition);
  const double dt = sim_.constants().dt;
  const std::uint64_t in_node = sim_.cycles() - entry_cycle_;
  Valuation obs = sim_.observation();
  Valuation u = augment(obs, entry_, Rational(static_cast<long>(in_node)) * logic::lift(dt));
  std::string at = "t=" + fmt(c.t);

  if (reqs_)
    for (std::size_t i = 0; i < reqs_->size(); ++i) {
      const auto& r = (*reqs_)[i];
      if (!r.when.evaluate(u)) continue;
      auto& tally = run_.requirements[i];
      ++tally.antecedent_steps;
      if (!r.then.evaluate(u)) {
        if (tally.violations++ == 0) tally.first_violation = c.t;
      }
    }

  if (!c.conform) {
    finish(PathRun::Verdict::Fail, at + " lockstep mismatch in " + tree_->node(node_).id + ": controller " + c.state +
                                       " " + c.sut_label + ", model " + c.model_label);
    return false;
  }

  const Node& here = tree_->node(node_);
  if (pos_ == path_.size()) {
    if (auto lit = falsified_literal(here.invariant, u); !lit.empty()) {
      finish(PathRun::Verdict::Fail, at + " invariant of " + here.id + " violated: " + lit);
      return false;
    }
    if (static_cast<double>(in_node) * dt + 1e-9 >= here.hold) finish(PathRun::Verdict::Pass, "");
    return !done_;
  }

  Advance adv = advance(*tree_, node_, u, path_[pos_]);
  switch (adv.kind) {
    case Advance::Kind::Violation:
      finish(PathRun::Verdict::Fail, at + " invariant of " + here.id + " violated: " + adv.falsified);
      return false;
    case Advance::Kind::Stay:
      if (in_node > opt_.max_node_cycles) {
        finish(PathRun::Verdict::Fail, at + " no edge out of " + here.id + " enabled within " +
                                           fmt(static_cast<double>(opt_.max_node_cycles) * dt) + " s");
        return false;
      }
      return true;
    case Advance::Kind::Move: break;
  }
  const Edge& e = tree_->edge(adv.edge);
  auto s = solve_stimulus(*tree_, e.stimulus, u);
  if (!s) {
    finish(PathRun::Verdict::Infeasible,
           at + " stimulus of edge " + here.id + " -> " + tree_->node(adv.child).id + " unsatisfiable: " + e.stimulus.to_string());
    return false;
  }
  pending_ = *s;
  node_ = adv.child;
  ++pos_;
  entry_ = obs;
  entry_cycle_ = sim_.cycles();
  run_.nodes.push_back(node_);
  if (pos_ == path_.size() && tree_->node(node_).hold <= 0) finish(PathRun::Verdict::Pass, "");
  return !done_;
}

PathRun run_path(const Tree& t, int leaf, const train::SimConfig& cfg, const std::vector<Requirement>* reqs, RunOptions opt) {
  OnlineRun r(t, leaf, cfg, reqs, opt);
  while (r.step()) {
  }
  return r.take();
}

// ------------------------------------------------------------------- grow

Predicate stimulus_for(const Tree& t, std::size_t transition, const train::Constants& k) {
  const auto& tr = t.model().transitions.at(transition);
  // With exact sensors the overall confidence is (3 cs + c4) / 4.
  logic::AffineExpr c;
  c.add_term("cs", Rational(3, 4));
  c.constant = logic::lift(k.c4) / 4;
  Predicate g = tr.guard.substituted({{"c", c}});

  std::vector<Predicate> keep;
  auto mentions_ctl = [](const std::vector<std::string>& vs) {
    return std::any_of(vs.begin(), vs.end(), [](const std::string& v) {
      return std::find(kControllables.begin(), kControllables.end(), v) != kControllables.end();
    });
  };
  auto conj = g.as_conjunction();
  if (conj && !conj->empty()) {
    for (const auto& l : *conj)
      if (mentions_ctl(l.atom.variables())) keep.push_back(Predicate::literal(l.atom, l.positive));
  } else if (mentions_ctl(g.variables())) {
    keep.push_back(g);
  }
  auto vs = Predicate::conj(keep).variables();
  // Solver ranges: authorities at most 2 km ahead, confidences of at least 0.5.
  if (std::find(vs.begin(), vs.end(), "xB") != vs.end()) {
    keep.push_back(t.parse("(<= (- xB x) 2000)"));
    keep.push_back(t.parse("(>= xB x)"));
  }
  if (std::find(vs.begin(), vs.end(), "cs") != vs.end()) keep.push_back(t.parse("(>= cs 0.5)"));
  return keep.empty() ? Predicate::truth() : Predicate::conj(keep);
}

namespace {

struct Step {
  std::string source;  // model state the edge leaves
  Rational delay;      // node time before the edge
  Predicate stimulus;
};

bool is_end(const model::Sfsm& m, std::size_t s) { return m.states[s].end; }

// Model transition sequences from `from` whose last element is `target`
// (or, with target == npos, which end in an end state), shortest first.
std::vector<std::vector<std::size_t>> model_paths(const model::Sfsm& m, std::size_t from, std::size_t target,
                                                  std::size_t max_len, std::size_t max_count) {
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::vector<std::size_t>> out;
  std::deque<std::pair<std::size_t, std::vector<std::size_t>>> q;
  q.push_back({from, {}});
  while (!q.empty() && out.size() < max_count) {
    auto [s, p] = std::move(q.front());
    q.pop_front();
    if (p.size() >= max_len) continue;
    for (auto i : m.outgoing(s)) {
      const auto& tr = m.transitions[i];
      if (tr.tag != model::Tag::Normal) continue;
      bool hit = target == none ? is_end(m, tr.target) && tr.source != tr.target : i == target;
      if (tr.source == tr.target && !hit) continue;  // waiting covers self-loops
      auto next = p;
      next.push_back(i);
      if (hit) {
        out.push_back(next);
        if (out.size() >= max_count) break;
        if (target != none) continue;
      }
      if (std::count(p.begin(), p.end(), i) == 0) q.push_back({tr.target, std::move(next)});
    }
  }
  return out;
}

struct Synth {
  train::Simulation sim;
  Valuation entry;
  std::uint64_t entry_cycle = 0;
  std::vector<Step> steps;
};

// Drives `st` until `transition` fires: each cycle tries the solved stimulus on
// a copy and otherwise waits, as long as waiting keeps the model in the source.
// `skip` passes over that many firing opportunities first.
bool fire(const Tree& t, Synth& st, std::size_t transition, const GrowOptions& opt, std::string& why,
          std::size_t skip = 0) {
  const auto& m = t.model();
  const auto& tr = m.transitions[transition];
  const auto& k = st.sim.constants();
  Predicate stim = stimulus_for(t, transition, k);
  const Rational dt = logic::lift(k.dt);
  for (std::uint64_t w = 0; w <= opt.max_wait_cycles; ++w) {
    if (st.sim.model_state() != tr.source) {
      why = "left " + m.states[tr.source].name;
      return false;
    }
    Rational tau = Rational(static_cast<long>(st.sim.cycles() - st.entry_cycle)) * dt;
    if (st.sim.cycles() > 0) {  // the root needs one observation before its edge
      Valuation obs = st.sim.observation();
      if (auto s = solve_stimulus(t, stim, augment(obs, st.entry, tau))) {
        train::Simulation dry = st.sim;
        const auto& c = dry.step(*s);
        if (c.transition == transition && c.conform && skip-- == 0) {
          st.steps.push_back({m.states[tr.source].name, tau, stim});
          st.sim = std::move(dry);
          st.entry = obs;
          st.entry_cycle = st.sim.cycles() - 1;
          return true;
        }
      }
    }
    train::Simulation dry = st.sim;
    const auto& c = dry.step();
    if (!c.conform) {
      why = "lockstep mismatch while waiting in " + m.states[tr.source].name;
      return false;
    }
    if (c.transition == transition && skip-- == 0) {  // fires on its own
      st.steps.push_back({m.states[tr.source].name, tau, Predicate::truth()});
      st.entry = st.sim.observation();
      st.entry_cycle = st.sim.cycles();
      st.sim = std::move(dry);
      return true;
    }
    st.sim = std::move(dry);
  }
  why = model::Sfsm::transition_id(transition) + " not fired within the waiting limit";
  return false;
}

bool at_rest(const train::Simulation& sim) {
  auto u = sim.observation();
  return sim.last().conform && sim.model()->states[sim.model_state()].end && u.get_real("v") == 0 &&
         std::get<std::string>(u.get("a")) == "0";
}

// Waits in an end state until the train stands still, then checks that it
// stays there for the leaf hold time.
bool settle(Synth& st, const GrowOptions& opt) {
  for (std::uint64_t w = 0;; ++w) {
    if (w > opt.max_wait_cycles || !st.sim.last().conform || !st.sim.model()->states[st.sim.model_state()].end) return false;
    if (at_rest(st.sim)) break;
    st.sim.step();
  }
  train::Simulation probe = st.sim;
  auto n = static_cast<std::uint64_t>(std::llround(opt.leaf_hold / probe.constants().dt));
  for (std::uint64_t i = 0; i < n; ++i) {
    probe.step();
    if (!at_rest(probe)) return false;
  }
  return true;
}

std::string path_text(const model::Sfsm& m, const std::vector<std::size_t>& p) {
  std::string s;
  for (auto i : p) s += (s.empty() ? "" : ".") + model::Sfsm::transition_id(i);
  (void)m;
  return s;
}

// Synthesizes a run along `prefix`, then completes it to a standstill in an end state.
std::optional<Synth> synthesize(const Tree& t, const std::vector<std::size_t>& prefix, const train::SimConfig& cfg,
                                const GrowOptions& opt, std::string& why) {
  const auto& m = t.model();
  Synth st{train::Simulation(&m, cfg), {}, 0, {}};
  st.entry = st.sim.observation();
  // A step that cannot fire may need the previous one to fire later, e.g.
  // entering SAFE_DRIVING fast enough to still be above vSafe afterwards.
  std::vector<Synth> before;  // state ahead of each step
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    before.push_back(st);
    if (fire(t, st, prefix[k], opt, why)) continue;
    bool ok = false;
    for (std::size_t skip : {5, 50}) {
      if (k == 0) break;
      Synth retry = before[k - 1];
      std::string w;
      if (!fire(t, retry, prefix[k - 1], opt, w, skip)) continue;
      Synth mid = retry;
      if (fire(t, retry, prefix[k], opt, w)) {
        before[k] = std::move(mid);
        st = std::move(retry);
        ok = true;
        break;
      }
    }
    if (!ok) {
      why = model::Sfsm::transition_id(prefix[k]) + ": " + why;
      return std::nullopt;
    }
  }
  if (is_end(m, st.sim.model_state())) {
    Synth copy = st;
    if (settle(copy, opt)) return copy;
  }
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  for (const auto& tail : model_paths(m, st.sim.model_state(), none, opt.max_length, opt.max_paths)) {
    Synth copy = st;
    std::string w;
    bool ok = true;
    for (auto i : tail)
      if (!fire(t, copy, i, opt, w)) {
        ok = false;
        break;
      }
    if (ok && settle(copy, opt)) return copy;
  }
  why = "no completion to a standstill in an end state from " + m.states[st.sim.model_state()].name;
  return std::nullopt;
}

std::string tau_text(const Rational& r) { return logic::format_rational(r); }

// Lowers the synthesized steps into `t`, sharing identical prefixes.
int attach(Tree& t, const Synth& st, const std::string& leaf_name, double hold) {
  const auto& m = t.model();
  Predicate envelope = t.parse("(and (>= v 0) (<= v 22.2))");
  int cur = 0;
  for (const auto& s : st.steps) {
    Predicate guard = t.parse("(and (= mode " + s.source + ") (= tau " + tau_text(s.delay) + "))");
    int next = -1;
    for (int e : t.node(cur).out) {
      const auto& ed = t.edge(e);
      const auto& child = t.node(ed.to);
      if (child.leaf.empty() && ed.guard.to_string() == guard.to_string() &&
          ed.stimulus.to_string() == s.stimulus.to_string() && child.invariant.to_string() == envelope.to_string())
        next = ed.to;
    }
    if (next < 0) {
      Node n;
      n.id = "g" + std::to_string(t.nodes().size());
      n.invariant = envelope;
      next = t.add_node(std::move(n));
      t.add_edge(cur, next, guard, s.stimulus);
    }
    cur = next;
  }
  Node leaf;
  leaf.id = "g" + std::to_string(t.nodes().size());
  leaf.invariant = t.parse("(and (= v 0) (= a 0))");
  leaf.leaf = leaf_name;
  leaf.hold = hold;
  int l = t.add_node(std::move(leaf));
  std::string end = m.states[st.sim.model_state()].name;
  t.add_edge(cur, l, t.parse("(and (= mode " + end + ") (= v 0) (= a 0))"), Predicate::truth());
  return l;
}

std::string unique_leaf_name(const Tree& t, const std::string& base) {
  std::set<std::string> used;
  for (int l : t.leaves()) used.insert(t.node(l).leaf);
  if (!used.count(base)) return base;
  for (int k = 2;; ++k)
    if (!used.count(base + "-" + std::to_string(k))) return base + "-" + std::to_string(k);
}

}  // namespace

GrowResult grow(Tree& t, const std::set<std::size_t>& uncovered, const train::SimConfig& cfg, GrowOptions opt) {
  const auto& m = t.model();
  std::vector<std::size_t> targets;
  for (auto i : uncovered)
    if (i < m.transitions.size() && m.transitions[i].tag == model::Tag::Normal) targets.push_back(i);
  if (targets.empty()) throw SsttError("no uncovered normal transition to grow towards");

  GrowResult res;
  std::ostringstream report;
  for (auto target : targets) {
    auto candidates = model_paths(m, m.initial, target, opt.max_length, opt.max_paths);
    if (candidates.empty()) {
      report << model::Sfsm::transition_id(target) << ": no model path of length <= " << opt.max_length << "\n";
      continue;
    }
    std::string last_why;
    for (const auto& p : candidates) {
      std::string why;
      auto st = synthesize(t, p, cfg, opt, why);
      if (!st) {
        last_why = path_text(m, p) + ": " + why;
        continue;
      }
      Tree copy = t;
      int leaf = attach(copy, *st, unique_leaf_name(copy, "grow-" + model::Sfsm::transition_id(target)), opt.leaf_hold);
      auto run = run_path(copy, leaf, cfg);
      bool fired = std::find(run.fired.begin(), run.fired.end(), target) != run.fired.end();
      if (run.verdict != PathRun::Verdict::Pass || !fired) {
        last_why = path_text(m, p) + ": dry run " + std::string(verdict_name(run.verdict)) + " " + run.diagnostic;
        continue;
      }
      t = std::move(copy);
      res.leaf = leaf;
      res.target = target;
      std::set<std::size_t> hit(run.fired.begin(), run.fired.end());
      for (auto i : hit)
        if (uncovered.count(i)) res.covers.push_back(i);
      return res;
    }
    report << model::Sfsm::transition_id(target) << ": " << candidates.size() << " model paths tried, last: " << last_why
           << "\n";
  }
  res.report = report.str();
  return res;
}

}  // namespace mbt::sstt
