#include "mbt/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "mbt/abstraction.hpp"
#include "mbt/agents.hpp"
#include "mbt/eqclass.hpp"
#include "mbt/mutation.hpp"
#include "mbt/testgen.hpp"

namespace mbt::cli {

using nlohmann::json;

namespace {

struct Output {
  std::string text;
  json data;
  int code = kOk;
};

json value_json(const logic::Value& v) {
  if (auto b = std::get_if<bool>(&v)) return *b;
  if (auto r = std::get_if<logic::Rational>(&v)) return logic::format_rational(*r);
  return std::get<std::string>(v);
}

json valuation_json(const logic::Valuation& u, const logic::Declarations& d) {
  json j = json::object();
  for (const auto& decl : d.all())
    if (u.has(decl.name)) j[decl.name] = value_json(u.get(decl.name));
  return j;
}

json mealy_json(const fsm::Mealy& f) {
  json t = json::array();
  for (int s = 0; s < f.size(); ++s)
    for (int x = 0; x < f.alphabet(); ++x)
      t.push_back({{"from", f.states[s]}, {"input", f.inputs[x]}, {"to", f.states[f.delta[s][x]]}, {"output", f.outputs[f.lambda[s][x]]}});
  return {{"states", f.states}, {"initial", f.states[f.initial]}, {"inputs", f.inputs}, {"outputs", f.outputs}, {"transitions", t}};
}

json suite_json(const testgen::AbstractSuite& s, const fsm::Mealy& f) {
  json cases = json::array();
  for (const auto& c : s) {
    json in = json::array(), out = json::array();
    for (int x : c.inputs) in.push_back(f.inputs[x]);
    for (int o : c.outputs) out.push_back(f.outputs[o]);
    cases.push_back({{"inputs", in}, {"outputs", out}});
  }
  return cases;
}

std::string pct(double p) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", p);
  return b;
}

std::string rate(double p) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4f", p);
  return b;
}

// Loaded model with its classes and abstraction, computed on demand.
struct Pipeline {
  model::Sfsm model;
  std::optional<eqclass::ClassTable> classes;
  std::optional<abstraction::Abstraction> abs;

  explicit Pipeline(const std::string& path) : model(model::load_model_file(path)) {}
  const eqclass::ClassTable& table() {
    if (!classes) classes = eqclass::input_classes(model);
    return *classes;
  }
  const abstraction::Abstraction& abstraction() {
    if (!abs) abs = abstraction::abstract(model, table());
    return *abs;
  }
  const fsm::Mealy& minimal() { return abstraction().minimal; }
};

testgen::AbstractSuite make_suite(const std::string& method, const fsm::Mealy& f, int m) {
  if (method == "h") return testgen::h_method(f, m);
  if (method == "w") return testgen::w_method(f, m);
  throw CLI::ValidationError("--method", "expected h or w");
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

// ------------------------------------------------------------------ commands

Output cmd_validate(const std::string& model_path, const std::string& sstt, const std::string& req,
                    const std::string& scenario) {
  Output o;
  auto m = model::load_model_file(model_path);
  auto issues = m.validate();
  std::ostringstream t;
  auto normal = m.transitions_tagged(model::Tag::Normal).size();
  t << "model " << m.name << " states " << m.states.size() << " transitions " << m.transitions.size() << " (normal "
    << normal << ", robustness " << m.transitions.size() - normal << ") variables " << m.variables().size() << "\n";
  json ji = json::array();
  for (const auto& i : issues) {
    t << "issue " << model::issue_kind_name(i.kind) << " " << i.state << " " << i.detail << "\n";
    ji.push_back({{"kind", model::issue_kind_name(i.kind)}, {"state", i.state}, {"detail", i.detail}});
  }
  o.data = {{"model", m.name},
            {"states", m.states.size()},
            {"transitions", m.transitions.size()},
            {"normal", normal},
            {"issues", ji}};
  if (!sstt.empty()) {
    auto tree = sstt::load_tree(sstt, m);
    t << "tree nodes " << tree.nodes().size() << " paths " << tree.leaves().size() << "\n";
    o.data["tree"] = {{"nodes", tree.nodes().size()}, {"paths", tree.leaves().size()}};
    if (!req.empty()) {
      auto reqs = sstt::load_requirements(req, tree);
      t << "requirements " << reqs.size() << "\n";
      o.data["requirements"] = reqs.size();
    }
  } else if (!req.empty()) {
    auto reqs = sstt::load_requirements(req, sstt::Tree(m));
    t << "requirements " << reqs.size() << "\n";
    o.data["requirements"] = reqs.size();
  }
  if (!scenario.empty()) {
    auto sc = train::load_scenarios(scenario);
    t << "scenarios " << sc.size() << "\n";
    o.data["scenarios"] = sc.size();
  }
  t << (issues.empty() ? "valid" : "invalid") << "\n";
  o.data["valid"] = issues.empty();
  o.text = t.str();
  o.code = issues.empty() ? kOk : kFailures;
  return o;
}

Output cmd_classes(Pipeline& p) {
  Output o;
  const auto& t = p.table();
  o.text = eqclass::render(t) + "classes " + std::to_string(t.classes.size()) + " guards " + std::to_string(t.guards.size()) + "\n";
  json cs = json::array();
  for (const auto& c : t.classes)
    cs.push_back({{"id", c.id}, {"predicate", c.predicate.to_string()}, {"representative", valuation_json(c.representative, t.domain)}});
  json gs = json::array();
  for (const auto& g : t.guards) gs.push_back(g.to_string());
  o.data = {{"classes", cs}, {"count", t.classes.size()}, {"guards", gs}};
  return o;
}

Output cmd_abstract(Pipeline& p) {
  Output o;
  const auto& a = p.abstraction();
  std::ostringstream t;
  t << fsm::render(a.minimal);
  for (std::size_t s = 0; s < a.block_of.size(); ++s)
    t << "block " << p.model.states[s].name << " " << a.minimal.states[a.block_of[s]] << "\n";
  t << "states full " << a.full.size() << " minimal " << a.minimal.size() << " inputs " << a.minimal.alphabet()
    << " outputs " << a.minimal.outputs.size() << "\n";
  o.text = t.str();
  json blocks = json::object();
  for (std::size_t s = 0; s < a.block_of.size(); ++s) blocks[p.model.states[s].name] = a.minimal.states[a.block_of[s]];
  o.data = {{"minimal", mealy_json(a.minimal)}, {"full_states", a.full.size()}, {"minimal_states", a.minimal.size()}, {"blocks", blocks}};
  return o;
}

Output cmd_gensuite(Pipeline& p, const std::string& method, int bound, bool concrete) {
  Output o;
  const auto& f = p.minimal();
  int m = bound > 0 ? bound : f.size();
  auto s = make_suite(method, f, m);
  std::ostringstream t;
  t << testgen::render(s, f);
  if (concrete) t << testgen::render(testgen::concretize(s, f, p.table()), p.table().domain);
  t << "suite " << upper(method) << " bound " << m << " cases " << s.size() << " max_length " << testgen::max_length(s) << "\n";
  o.text = t.str();
  o.data = {{"method", upper(method)}, {"bound", m}, {"cases", s.size()}, {"max_length", testgen::max_length(s)}, {"suite", suite_json(s, f)}};
  return o;
}

Output cmd_module_test(Pipeline& p, const std::string& method, int bound, const std::string& impl) {
  Output o;
  const auto& f = p.minimal();
  int m = bound > 0 ? bound : f.size();
  auto suite = testgen::concretize(make_suite(method, f, m), f, p.table());
  testgen::SutFactory make;
  if (impl == "reference")
    make = [] { return std::make_unique<train::Controller>(); };
  else if (impl == "model")
    make = [&] { return std::make_unique<train::ModelController>(p.model); };
  else
    throw CLI::ValidationError("--impl", "expected reference or model");
  auto verdicts = testgen::run_suite_parallel(suite, make);
  std::size_t pass = 0, fail = 0, error = 0;
  std::ostringstream t;
  json failures = json::array();
  for (const auto& v : verdicts) {
    pass += v.kind == testgen::Verdict::Kind::Pass;
    fail += v.kind == testgen::Verdict::Kind::Fail;
    error += v.kind == testgen::Verdict::Kind::Error;
    if (v.kind == testgen::Verdict::Kind::Pass) continue;
    t << "case " << v.index + 1 << " " << testgen::verdict_name(v.kind) << " step " << v.step + 1 << " expected "
      << v.expected << " observed " << v.observed << "\n";
    failures.push_back({{"case", v.index + 1}, {"verdict", testgen::verdict_name(v.kind)}, {"step", v.step + 1},
                        {"expected", v.expected}, {"observed", v.observed}});
  }
  t << "module-test " << upper(method) << " bound " << m << " impl " << impl << " cases " << verdicts.size()
    << " pass " << pass << " fail " << fail << " error " << error << "\n";
  o.text = t.str();
  o.data = {{"method", upper(method)}, {"bound", m}, {"impl", impl}, {"cases", verdicts.size()},
            {"pass", pass}, {"fail", fail}, {"error", error}, {"failures", failures}};
  o.code = pass == verdicts.size() ? kOk : kFailures;
  return o;
}

Output cmd_mutate(Pipeline& p, std::size_t count, std::uint64_t seed, int bound, const std::string& method) {
  Output o;
  const auto& f = p.minimal();
  int m = bound > 0 ? bound : f.size();
  mutation::SymbolicSource src{&p.model, &p.table(), &p.abstraction()};
  auto mutants = mutation::generate_mutants(f, m, count, seed, &src);
  std::vector<std::string> methods = method == "both" ? std::vector<std::string>{"h", "w"} : std::vector<std::string>{method};
  std::ostringstream t;
  o.data = {{"bound", m}, {"count", count}, {"seed", seed}};
  for (const auto& me : methods) {
    auto suite = make_suite(me, f, m);
    auto rep = mutation::kill_report(suite, f, mutants);
    t << mutation::render(rep, upper(me));
    json rs = json::array();
    for (const auto& r : rep.results)
      rs.push_back({{"id", r.id}, {"operator", mutation::operator_name(r.op)}, {"states", r.states},
                    {"equivalent", r.equivalent}, {"killed", r.killed}, {"failing", r.failing}});
    o.data["suites"][upper(me)] = {{"cases", suite.size()}, {"equivalent", rep.equivalent}, {"killed", rep.killed},
                                   {"survivors", rep.survivors}, {"false_alarms", rep.false_alarms},
                                   {"kill_rate", rep.kill_rate()}, {"results", rs}};
    if (rep.survivors > 0 || rep.false_alarms > 0) o.code = kFailures;
  }
  json desc = json::array();
  for (const auto& mu : mutants) desc.push_back({{"id", mu.id}, {"operator", mutation::operator_name(mu.op)}, {"description", mu.description}});
  o.data["mutants"] = desc;
  o.text = t.str();
  return o;
}

struct SystemTestArgs {
  std::string sstt, req, timing, tree_out;
  std::size_t executors = 4, wall_clock = 1, max_scenarios = 200;
  double coverage_target = 100, pace = 0.01;
};

Output cmd_system_test(Pipeline& p, const SystemTestArgs& a, std::uint64_t seed, std::ostream& err) {
  Output o;
  sstt::Tree tree(p.model);
  if (!a.sstt.empty())
    tree = sstt::load_tree(a.sstt, p.model);
  else
    tree.add_node({"root", tree.parse("(= mode " + p.model.states[p.model.initial].name + ")"), -1, {}, "", 0, false});
  std::vector<sstt::Requirement> reqs;
  if (!a.req.empty()) reqs = sstt::load_requirements(a.req, tree);
  agents::CampaignConfig cfg;
  cfg.sim_executors = a.executors;
  cfg.wall_clock_executors = a.wall_clock;
  cfg.seed = seed;
  cfg.coverage_target = a.coverage_target;
  cfg.max_scenarios = a.max_scenarios;
  cfg.pace = a.pace;
  auto res = agents::run_campaign(p.model, std::move(tree), reqs, cfg);
  o.text = agents::render(res.report, p.model);
  o.data = json::parse(agents::to_json(res.report, p.model));
  auto timing = agents::render(res.timing);
  if (!a.timing.empty())
    std::ofstream(a.timing) << timing;
  else
    err << timing;
  if (!a.tree_out.empty()) std::ofstream(a.tree_out) << res.report.tree;
  o.code = res.report.target_met && res.report.all_passed() ? kOk : kFailures;
  return o;
}

Output cmd_simulate(const std::string& scenario_file, const std::string& model_path, const std::string& name) {
  Output o;
  auto scenarios = train::load_scenarios(scenario_file);
  std::optional<model::Sfsm> m;
  if (!model_path.empty()) m = model::load_model_file(model_path);
  std::ostringstream t;
  o.data = json::array();
  bool conform = true, found = false;
  for (const auto& s : scenarios) {
    if (!name.empty() && s.name != name) continue;
    found = true;
    auto trace = train::run_scenario(m ? &*m : nullptr, s);
    if (name.empty()) t << "# scenario " << s.name << "\n";
    t << train::trace_header() << "\n";
    double vmax = 0;
    std::size_t bad = 0;
    for (const auto& c : trace) {
      t << train::trace_row(c) << "\n";
      vmax = std::max(vmax, c.v);
      bad += !c.conform;
    }
    conform &= bad == 0;
    const auto& last = trace.empty() ? train::Cycle{} : trace.back();
    o.data.push_back({{"scenario", s.name}, {"cycles", trace.size()}, {"final_x", last.x}, {"final_state", last.state},
                      {"max_v", vmax}, {"nonconforming_cycles", bad}});
  }
  if (!found) throw train::ScenarioError("no scenario named " + name);
  o.text = t.str();
  o.code = conform ? kOk : kFailures;
  return o;
}

Output cmd_report(Pipeline& p, const SystemTestArgs& a, std::uint64_t seed, std::size_t count, std::ostream& err) {
  Output o;
  std::ostringstream t;
  auto issues = p.model.validate();
  t << "model " << p.model.name << " " << (issues.empty() ? "valid" : "invalid") << "\n";
  t << "classes " << p.table().classes.size() << "\n";
  const auto& f = p.minimal();
  t << "abstraction states " << f.size() << "\n";
  o.data = {{"valid", issues.empty()}, {"classes", p.table().classes.size()}, {"states", f.size()}};
  bool ok = issues.empty();
  for (const std::string me : {"h", "w"}) {
    auto g = cmd_gensuite(p, me, 0, false);
    auto mt = cmd_module_test(p, me, 0, "reference");
    t << "suite " << upper(me) << " cases " << g.data["cases"] << " max_length " << g.data["max_length"] << " module-test pass "
      << mt.data["pass"] << "/" << mt.data["cases"] << "\n";
    o.data["suites"][upper(me)] = {{"cases", g.data["cases"]}, {"max_length", g.data["max_length"]}, {"pass", mt.data["pass"]}};
    ok &= mt.code == kOk;
  }
  auto mu = cmd_mutate(p, count, seed, 0, "both");
  for (const std::string me : {"H", "W"}) {
    const auto& s = mu.data["suites"][me];
    t << "mutation " << me << " mutants " << count << " equivalent " << s["equivalent"] << " survivors " << s["survivors"]
      << " false_alarms " << s["false_alarms"] << " kill_rate " << rate(s["kill_rate"].get<double>()) << "\n";
    o.data["mutation"][me] = {{"equivalent", s["equivalent"]}, {"survivors", s["survivors"]}, {"false_alarms", s["false_alarms"]}};
  }
  ok &= mu.code == kOk;
  auto st = cmd_system_test(p, a, seed, err);
  const auto& cov = st.data["coverage"];
  t << "system-test runs " << st.data["runs"].size() << " coverage " << cov["covered"] << "/" << cov["normal"] << " "
    << pct(cov["percent"].get<double>()) << "% target_met " << (st.data["target_met"].get<bool>() ? "yes" : "no") << "\n";
  for (auto it = st.data["requirements"].begin(); it != st.data["requirements"].end(); ++it)
    t << "requirement " << it.key() << " " << it.value().get<std::string>() << "\n";
  o.data["system_test"] = {{"runs", st.data["runs"].size()}, {"coverage", cov}, {"requirements", st.data["requirements"]}};
  ok &= st.code == kOk;
  o.text = t.str();
  o.code = ok ? kOk : kFailures;
  return o;
}

std::uint64_t default_seed(std::uint64_t fallback) {
  if (const char* s = std::getenv("MBT_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw CLI::ValidationError("MBT_SEED", "not an unsigned integer");
    }
  }
  return fallback;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model-based testing of the train controller: classes, complete suites, mutation and online system tests."};
  app.require_subcommand(1);
  app.fallthrough();
  std::string output, json_path;
  app.add_option("-o,--output", output, "Write the text report here instead of stdout");
  app.add_option("--json", json_path, "Write the JSON report here (default: OUTPUT.json when -o is given)");

  std::string model_path, sstt_path, req_path, scenario_path, method = "h", impl = "reference", name;
  int bound = 0;
  bool concrete = false;
  std::size_t count = 500;
  std::optional<std::uint64_t> seed;
  SystemTestArgs st;

  auto* validate = app.add_subcommand("validate", "Check a model and optional tree, requirement and scenario files");
  validate->add_option("model", model_path, "Model file")->required();
  validate->add_option("--sstt", sstt_path, "Scenario tree file");
  validate->add_option("--req", req_path, "Requirement file");
  validate->add_option("--scenario", scenario_path, "Scenario file");

  auto* classes = app.add_subcommand("classes", "Input equivalence classes");
  classes->add_option("model", model_path)->required();

  auto* abstract = app.add_subcommand("abstract", "Minimal Mealy abstraction");
  abstract->add_option("model", model_path)->required();

  auto* gensuite = app.add_subcommand("gensuite", "Generate a complete test suite");
  gensuite->add_option("model", model_path)->required();
  gensuite->add_option("--method", method, "h or w")->check(CLI::IsMember({"h", "w"}));
  gensuite->add_option("--bound", bound, "State bound m (default: minimal state count)");
  gensuite->add_flag("--concrete", concrete, "Also print the concrete suite");

  auto* module_test = app.add_subcommand("module-test", "Run the concrete suite against a controller");
  module_test->add_option("model", model_path)->required();
  module_test->add_option("--method", method)->check(CLI::IsMember({"h", "w"}));
  module_test->add_option("--bound", bound);
  module_test->add_option("--impl", impl, "reference or model")->check(CLI::IsMember({"reference", "model"}));

  std::string mutate_method = "both";
  auto* mutate = app.add_subcommand("mutate", "Mutation analysis of the H and W suites");
  mutate->add_option("model", model_path)->required();
  mutate->add_option("--count", count, "Number of mutants");
  mutate->add_option("--seed", seed, "Random seed (default: MBT_SEED or 42)");
  mutate->add_option("--bound", bound);
  mutate->add_option("--method", mutate_method, "h, w or both")->check(CLI::IsMember({"h", "w", "both"}));

  auto add_campaign = [&](CLI::App* c) {
    c->add_option("--sstt", st.sstt, "Initial scenario tree (default: bare root)");
    c->add_option("--req", st.req, "Requirement file");
    c->add_option("--executors", st.executors, "Simulation-time executors");
    c->add_option("--wall-clock", st.wall_clock, "Wall-clock paced executors");
    c->add_option("--coverage-target", st.coverage_target, "Percent of normal transitions")->check(CLI::Range(0.0, 100.0));
    c->add_option("--max-scenarios", st.max_scenarios, "Upper bound on runs");
    c->add_option("--pace", st.pace, "Wall-clock seconds per simulated second")->check(CLI::PositiveNumber);
    c->add_option("--timing", st.timing, "Write timing here (default: stderr)");
  };
  auto* system_test = app.add_subcommand("system-test", "Agent-based online system-test campaign");
  system_test->add_option("model", model_path)->required();
  system_test->add_option("--seed", seed, "Random seed (default: MBT_SEED or 1)");
  system_test->add_option("--tree-out", st.tree_out, "Write the final tree here");
  add_campaign(system_test);

  auto* report = app.add_subcommand("report", "Whole pipeline summary");
  report->add_option("model", model_path)->required();
  report->add_option("--seed", seed, "Random seed (default: MBT_SEED or 42)");
  report->add_option("--count", count, "Number of mutants");
  add_campaign(report);

  auto* simulate = app.add_subcommand("simulate", "Run scenario scripts and print CSV traces");
  simulate->add_option("scenario", scenario_path, "Scenario file")->required();
  simulate->add_option("--model", model_path, "Model replayed in lockstep");
  simulate->add_option("--name", name, "Only this scenario");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Output o;
  try {
    if (validate->parsed()) {
      o = cmd_validate(model_path, sstt_path, req_path, scenario_path);
    } else if (simulate->parsed()) {
      o = cmd_simulate(scenario_path, model_path, name);
    } else {
      Pipeline p(model_path);
      if (classes->parsed()) o = cmd_classes(p);
      if (abstract->parsed()) o = cmd_abstract(p);
      if (gensuite->parsed()) o = cmd_gensuite(p, method, bound, concrete);
      if (module_test->parsed()) o = cmd_module_test(p, method, bound, impl);
      if (mutate->parsed()) o = cmd_mutate(p, count, seed.value_or(default_seed(42)), bound, mutate_method);
      if (system_test->parsed()) o = cmd_system_test(p, st, seed.value_or(default_seed(1)), err);
      if (report->parsed()) o = cmd_report(p, st, seed.value_or(default_seed(42)), count, err);
    }
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (output.empty()) {
    out << o.text;
  } else {
    std::ofstream f(output);
    if (!f) {
      err << "error: cannot write " << output << "\n";
      return kUsage;
    }
    f << o.text;
    if (json_path.empty()) json_path = output + ".json";
  }
  if (!json_path.empty()) {
    std::ofstream j(json_path);
    if (!j) {
      err << "error: cannot write " << json_path << "\n";
      return kUsage;
    }
    j << o.data.dump(2) << "\n";
  }
  return o.code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace mbt::cli
