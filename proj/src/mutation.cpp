#include "mbt/mutation.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace mbt::mutation {

std::string_view operator_name(Operator op) {
  switch (op) {
    case Operator::OutputSwap: return "output-swap";
    case Operator::Retarget: return "transition-retarget";
    case Operator::StateSplit: return "state-split";
    case Operator::GuardFlip: return "guard-literal-flip";
  }
  return "?";
}

namespace {

using Rng = std::mt19937_64;

int pick(Rng& rng, int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng)); }

std::string cell(const fsm::Mealy& f, int s, int x) { return f.states[s] + "/" + f.inputs[x]; }

int count_literals(const logic::Predicate& p) {
  using K = logic::Predicate::Kind;
  if (p.kind() == K::Lit) return 1;
  int n = 0;
  if (p.kind() == K::And || p.kind() == K::Or)
    for (const auto& c : p.children()) n += count_literals(c);
  return n;
}

// Negates the k-th literal in depth-first order.
logic::Predicate flip_literal(const logic::Predicate& p, int& k) {
  using K = logic::Predicate::Kind;
  switch (p.kind()) {
    case K::Lit:
      if (k-- == 0) return logic::Predicate::literal(p.lit().atom, !p.lit().positive);
      return p;
    case K::And:
    case K::Or: {
      std::vector<logic::Predicate> parts;
      for (const auto& c : p.children()) parts.push_back(flip_literal(c, k));
      return p.kind() == K::And ? logic::Predicate::conj(std::move(parts)) : logic::Predicate::disj(std::move(parts));
    }
    default:
      return p;
  }
}

}  // namespace

Mutant output_swap(const fsm::Mealy& f, std::uint64_t rng_seed) {
  if (f.outputs.size() < 2) throw MutationError("output-swap needs two outputs");
  Rng rng(rng_seed);
  Mutant m{0, Operator::OutputSwap, f, rng_seed, ""};
  int s = pick(rng, f.size()), x = pick(rng, f.alphabet());
  int o = f.lambda[s][x];
  int n = (o + 1 + pick(rng, static_cast<int>(f.outputs.size()) - 1)) % static_cast<int>(f.outputs.size());
  m.machine.lambda[s][x] = n;
  m.description = cell(f, s, x) + ": " + f.outputs[o] + " -> " + f.outputs[n];
  return m;
}

Mutant retarget(const fsm::Mealy& f, std::uint64_t rng_seed) {
  if (f.size() < 2) throw MutationError("retarget needs two states");
  Rng rng(rng_seed);
  Mutant m{0, Operator::Retarget, f, rng_seed, ""};
  int s = pick(rng, f.size()), x = pick(rng, f.alphabet());
  int t = f.delta[s][x];
  int n = (t + 1 + pick(rng, f.size() - 1)) % f.size();
  m.machine.delta[s][x] = n;
  m.description = cell(f, s, x) + ": -> " + f.states[n] + " (was " + f.states[t] + ")";
  return m;
}

Mutant state_split(const fsm::Mealy& f, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  Mutant m{0, Operator::StateSplit, f, rng_seed, ""};
  fsm::Mealy& g = m.machine;
  int s = pick(rng, f.size());
  int copy = g.size();
  g.states.push_back(f.states[s] + "'");
  g.delta.push_back(f.delta[s]);
  g.lambda.push_back(f.lambda[s]);

  // Redirect one incoming transition (the copy must be reachable).
  std::vector<std::pair<int, int>> incoming;
  for (int p = 0; p < f.size(); ++p)
    for (int x = 0; x < f.alphabet(); ++x)
      if (f.delta[p][x] == s) incoming.emplace_back(p, x);
  std::string how;
  if (incoming.empty() || s == f.initial) {
    g.initial = copy;
    how = "initial";
  } else {
    auto [p, x] = incoming[static_cast<std::size_t>(pick(rng, static_cast<int>(incoming.size())))];
    g.delta[p][x] = copy;
    how = cell(f, p, x);
  }
  // Alter one reaction of the copy.
  int x = pick(rng, f.alphabet());
  std::string change;
  if (f.outputs.size() > 1 && (f.size() < 2 || pick(rng, 2) == 0)) {
    int o = g.lambda[copy][x];
    g.lambda[copy][x] = (o + 1 + pick(rng, static_cast<int>(f.outputs.size()) - 1)) % static_cast<int>(f.outputs.size());
    change = "output of " + f.inputs[x];
  } else {
    int t = g.delta[copy][x];
    g.delta[copy][x] = (t + 1 + pick(rng, g.size() - 1)) % g.size();
    change = "target of " + f.inputs[x];
  }
  m.description = f.states[s] + " split via " + how + ", copy changes " + change;
  return m;
}

Mutant guard_flip(const SymbolicSource& src, std::uint64_t rng_seed) {
  if (!src.model || !src.classes || !src.abs) throw MutationError("guard flip needs the symbolic machine");
  const auto& sm = *src.model;
  const auto& ct = *src.classes;
  const auto& ab = *src.abs;
  Rng rng(rng_seed);
  std::size_t t = static_cast<std::size_t>(pick(rng, static_cast<int>(sm.transitions.size())));
  int lits = count_literals(sm.transitions[t].guard);
  if (lits == 0) throw MutationError("guard without literals");
  int which = pick(rng, lits), k = which;
  logic::Predicate flipped = flip_literal(sm.transitions[t].guard, k);

  fsm::Mealy full = ab.full;
  std::size_t s = sm.transitions[t].source;
  auto outgoing = sm.outgoing(s);
  for (std::size_t c = 0; c < ct.classes.size(); ++c) {
    const auto& u = ct.classes[c].representative;
    std::size_t chosen = ab.fired[s][c];
    for (auto i : outgoing) {
      const auto& g = i == t ? flipped : sm.transitions[i].guard;
      if (g.evaluate(u)) {
        chosen = i;
        break;
      }
    }
    const auto& tr = sm.transitions[chosen];
    auto label = model::output_label(tr.outputs);
    auto o = std::find(full.outputs.begin(), full.outputs.end(), label);
    full.delta[s][c] = static_cast<int>(tr.target);
    full.lambda[s][c] = static_cast<int>(o - full.outputs.begin());
  }
  Mutant m{0, Operator::GuardFlip, fsm::minimize(full), rng_seed, ""};
  m.description = model::Sfsm::transition_id(t) + " literal " + std::to_string(which) + " negated";
  return m;
}

std::vector<Mutant> generate_mutants(const fsm::Mealy& f, int m, std::size_t count, std::uint64_t seed,
                                     const SymbolicSource* src) {
  if (m < f.size()) throw MutationError("bound m is below the number of states");
  std::vector<Operator> ops{Operator::OutputSwap, Operator::Retarget};
  if (m > f.size()) ops.push_back(Operator::StateSplit);
  if (src && src->model) ops.push_back(Operator::GuardFlip);

  Rng rng(seed);
  std::vector<Mutant> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > count * 100 + 1000) throw MutationError("cannot draw enough mutants within the state bound");
    Operator op = ops[static_cast<std::size_t>(pick(rng, static_cast<int>(ops.size())))];
    std::uint64_t s = rng();
    Mutant mu;
    switch (op) {
      case Operator::OutputSwap: mu = output_swap(f, s); break;
      case Operator::Retarget: mu = retarget(f, s); break;
      case Operator::StateSplit: mu = state_split(f, s); break;
      case Operator::GuardFlip: mu = guard_flip(*src, s); break;
    }
    if (mu.machine.size() > m) continue;
    mu.machine.outputs = f.outputs;  // all operators keep the reference alphabet
    mu.id = out.size() + 1;
    out.push_back(std::move(mu));
  }
  return out;
}

double KillReport::kill_rate() const {
  std::size_t non_eq = results.size() - equivalent;
  return non_eq == 0 ? 1.0 : static_cast<double>(killed - false_alarms) / static_cast<double>(non_eq);
}

namespace {

MutantResult evaluate(const testgen::AbstractSuite& suite, const fsm::Mealy& reference, const Mutant& mu) {
  MutantResult r;
  r.id = mu.id;
  r.op = mu.op;
  r.states = mu.machine.size();
  r.equivalent = fsm::equivalent(reference, mu.machine);
  r.failing = testgen::failing_cases(suite, mu.machine).size();
  r.killed = r.failing > 0;
  return r;
}

KillReport summarize(std::vector<MutantResult> results) {
  KillReport rep;
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& r : results) {
    rep.equivalent += r.equivalent;
    rep.killed += r.killed;
    rep.survivors += !r.equivalent && !r.killed;
    rep.false_alarms += r.equivalent && r.killed;
  }
  rep.results = std::move(results);
  return rep;
}

}  // namespace

KillReport kill_report_serial(const testgen::AbstractSuite& suite, const fsm::Mealy& reference, const std::vector<Mutant>& mutants) {
  std::vector<MutantResult> results;
  for (const auto& mu : mutants) results.push_back(evaluate(suite, reference, mu));
  return summarize(std::move(results));
}

KillReport kill_report(const testgen::AbstractSuite& suite, const fsm::Mealy& reference, const std::vector<Mutant>& mutants) {
  std::vector<MutantResult> results(mutants.size());
  const long n = static_cast<long>(mutants.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) results[static_cast<std::size_t>(i)] = evaluate(suite, reference, mutants[static_cast<std::size_t>(i)]);
  return summarize(std::move(results));
}

std::string render(const KillReport& r, const std::string& suite_name) {
  std::ostringstream o;
  o << "suite " << suite_name << "\n";
  o << "mutant operator states equivalent killed failing\n";
  for (const auto& m : r.results)
    o << m.id << ' ' << operator_name(m.op) << ' ' << m.states << ' ' << (m.equivalent ? "yes" : "no") << ' '
      << (m.killed ? "yes" : "no") << ' ' << m.failing << "\n";
  char rate[32];
  std::snprintf(rate, sizeof rate, "%.4f", r.kill_rate());
  o << "summary mutants=" << r.results.size() << " equivalent=" << r.equivalent << " killed=" << r.killed
    << " survivors=" << r.survivors << " false_alarms=" << r.false_alarms << " kill_rate=" << rate << "\n";
  return o.str();
}

}  // namespace mbt::mutation
