// Parallel kernels against their serial references on the train model.

#include <benchmark/benchmark.h>

#include "mbt/abstraction.hpp"
#include "mbt/eqclass.hpp"
#include "mbt/mutation.hpp"
#include "mbt/testgen.hpp"
#include "mbt/train.hpp"

using namespace mbt;

namespace {

struct Fixture {
  model::Sfsm model = model::load_model_file(MBT_MODELS_DIR "/train.model");
  eqclass::ClassTable classes = eqclass::input_classes(model);
  abstraction::Abstraction abs = abstraction::abstract(model, classes);
  testgen::AbstractSuite w = testgen::w_method(abs.minimal, abs.minimal.size() + 1);
  testgen::ConcreteSuite concrete = testgen::concretize(w, abs.minimal, classes);
  std::vector<mutation::Mutant> mutants;

  Fixture() {
    mutation::SymbolicSource src{&model, &classes, &abs};
    mutants = mutation::generate_mutants(abs.minimal, abs.minimal.size() + 1, 2000, 42, &src);
  }
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

void BM_KillReportSerial(benchmark::State& st) {
  const auto& f = fx();
  for (auto _ : st) benchmark::DoNotOptimize(mutation::kill_report_serial(f.w, f.abs.minimal, f.mutants));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.mutants.size()));
}

void BM_KillReportParallel(benchmark::State& st) {
  const auto& f = fx();
  for (auto _ : st) benchmark::DoNotOptimize(mutation::kill_report(f.w, f.abs.minimal, f.mutants));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.mutants.size()));
}

void BM_ModuleTestSerial(benchmark::State& st) {
  const auto& f = fx();
  train::Controller sut;
  for (auto _ : st) benchmark::DoNotOptimize(testgen::run_suite(f.concrete, sut));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.concrete.size()));
}

void BM_ModuleTestParallel(benchmark::State& st) {
  const auto& f = fx();
  testgen::SutFactory make = [] { return std::make_unique<train::Controller>(); };
  for (auto _ : st) benchmark::DoNotOptimize(testgen::run_suite_parallel(f.concrete, make));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.concrete.size()));
}

}  // namespace

BENCHMARK(BM_KillReportSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_KillReportParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ModuleTestSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ModuleTestParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
