#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mbt/cli.hpp"

namespace {

const std::string kModel = MBT_MODELS_DIR "/train.model";

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = mbt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path scratch(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / "mbt_cli_test";
  std::filesystem::create_directories(d);
  return d / name;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(call({"validate", kModel}).code == mbt::cli::kOk);
  CHECK(call({}).code == mbt::cli::kUsage);
  CHECK(call({"frobnicate"}).code == mbt::cli::kUsage);
  CHECK(call({"gensuite", kModel, "--method", "x"}).code == mbt::cli::kUsage);
  CHECK(call({"classes", "/nonexistent.model"}).code == mbt::cli::kUsage);
  CHECK(call({"--help"}).code == mbt::cli::kOk);

  // A model with a dead state is reported as invalid.
  auto bad = scratch("dead.model");
  std::string text = slurp(kModel);
  std::ofstream(bad) << text << "\nstate ORPHAN\n";
  auto r = call({"validate", bad.string()});
  CHECK(r.code == mbt::cli::kFailures);
  CHECK(r.out.find("reachability ORPHAN") != std::string::npos);
}

TEST_CASE("pipeline commands") {
  auto c = call({"classes", kModel});
  CHECK(c.out.find("classes 28 ") != std::string::npos);
  auto a = call({"abstract", kModel});
  CHECK(a.out.find("minimal 6 ") != std::string::npos);
  auto h = call({"gensuite", kModel, "--method", "h"});
  CHECK(h.out.find("cases 334 ") != std::string::npos);
  auto w = call({"gensuite", kModel, "--method", "w"});
  CHECK(w.out.find("cases 652 ") != std::string::npos);
  auto mt = call({"module-test", kModel, "--method", "w", "--impl", "model"});
  CHECK(mt.code == mbt::cli::kOk);
  CHECK(mt.out.find("fail 0 error 0") != std::string::npos);
}

TEST_CASE("output files and json") {
  auto txt = scratch("mutate.txt");
  std::filesystem::remove(txt.string() + ".json");
  auto r = call({"mutate", kModel, "--count", "60", "--seed", "3", "-o", txt.string()});
  CHECK(r.code == mbt::cli::kOk);
  CHECK(r.out.empty());
  auto j = nlohmann::json::parse(slurp(txt.string() + ".json"));
  CHECK(j["suites"]["H"]["survivors"] == 0);
  CHECK(j["mutants"].size() == 60);
  CHECK(slurp(txt).find("kill_rate=1.0000") != std::string::npos);
}

TEST_CASE("seeded commands are reproducible") {
  auto a = call({"mutate", kModel, "--count", "80", "--seed", "11"});
  auto b = call({"mutate", kModel, "--count", "80", "--seed", "11"});
  CHECK(a.out == b.out);
  setenv("MBT_SEED", "11", 1);
  auto c = call({"mutate", kModel, "--count", "80"});
  unsetenv("MBT_SEED");
  CHECK(a.out == c.out);

  std::vector<std::string> st{"system-test", kModel, "--sstt", MBT_MODELS_DIR "/train.sstt", "--req",
                              MBT_MODELS_DIR "/train.req", "--wall-clock", "0", "--seed", "5"};
  auto s1 = call(st);
  auto s2 = call(st);
  CHECK(s1.code == mbt::cli::kOk);
  CHECK(s1.out == s2.out);
  CHECK(s1.out.find("100.00%") != std::string::npos);
  // Timing goes to the diagnostic stream, not the report.
  CHECK(s1.err.find("wall ") != std::string::npos);
}

TEST_CASE("simulate prints a trace") {
  auto r = call({"simulate", MBT_MODELS_DIR "/train.scenario", "--model", kModel});
  CHECK(r.code == mbt::cli::kOk);
  CHECK(r.out.find("t,truePos,") != std::string::npos);
  CHECK(call({"simulate", MBT_MODELS_DIR "/train.scenario", "--name", "no-such"}).code == mbt::cli::kUsage);
}
