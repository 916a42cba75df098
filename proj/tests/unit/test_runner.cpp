#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "runner/experiment.hpp"
#include "runner/reports.hpp"

using namespace slackcme;
using namespace slackcme::tools;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = SLACKCME_CONFIGS_DIR;
const fs::path kModels = SLACKCME_MODELS_DIR;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("slackcme_runner_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json base_config() {
  return Json{{"network", "immigration_death.net"},
              {"conservation", {{"W", {{1}}}}},
              {"N", {3, 8}},
              {"methods", {"slack-regular"}},
              {"task", "stationary"},
              {"x0", {0}}};
}

struct Command {
  int status;
  std::string output;
};

Command run_cli(const std::string& args) {
  const std::string cmd = std::string(SLACKCME_CLI) + " " + args + " 2>&1";
  Command c{0, {}};
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) c.output += buf.data();
  const int raw = pclose(pipe);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

ReactionNetwork load_net(const char* name) { return parse_network(slurp(kModels / name)); }

}  // namespace

TEST_CASE("config validation names the offending field") {
  const auto load = [](Json j) {
    auto c = config_from_json(j, kModels);
    validate(c);
    return c;
  };
  CHECK_NOTHROW(load(base_config()));

  auto unknown = base_config();
  unknown["colour"] = "red";
  CHECK_THROWS_WITH_AS(load(unknown), doctest::Contains("colour"), Error);

  auto bad_method = base_config();
  bad_method["methods"] = {"magic"};
  CHECK_THROWS_WITH_AS(load(bad_method), doctest::Contains("magic"), Error);

  auto no_target = base_config();
  no_target["task"] = "mfpt";
  CHECK_THROWS_WITH_AS(load(no_target), doctest::Contains("target"), Error);

  auto short_x0 = base_config();
  short_x0["x0"] = {0, 0};
  CHECK_THROWS_AS(load(short_x0), Error);

  auto no_times = base_config();
  no_times["task"] = "transient";
  CHECK_THROWS_WITH_AS(load(no_times), doctest::Contains("times"), Error);

  auto no_N = base_config();
  no_N["N"] = Json::array();
  CHECK_THROWS_AS(load(no_N), Error);

  auto commented = base_config();
  commented["comment"] = "free text";
  CHECK_NOTHROW(load(commented));
}

TEST_CASE("every bundled config parses and validates") {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(validate(load_config(entry.path())));
    ++seen;
  }
  CHECK(seen >= 5);
}

TEST_CASE("runs are reproducible byte for byte") {
  auto j = base_config();
  j["N"] = {3, 6};
  j["methods"] = {"slack-regular", "slack-optimized", "fsp"};
  j["task"] = "mfpt";
  j["target"] = "X == 3";
  j["ssa"] = {{"samples", 200}, {"seed", 5}};
  auto c = config_from_json(j, kModels);

  const auto dir_a = scratch("a"), dir_b = scratch("b");
  c.out = dir_a;
  c.threads = 1;
  const auto a = run_experiment(c);
  c.out = dir_b;
  c.threads = 3;
  const auto b = run_experiment(c);

  REQUIRE(a.files.size() == b.files.size());
  CHECK_FALSE(a.tolerance_failure);
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CAPTURE(a.files[i].string());
    CHECK(a.files[i].filename() == b.files[i].filename());
    CHECK(slurp(a.files[i]) == slurp(b.files[i]));
  }
  CHECK(slurp(dir_a / "manifest.json") == slurp(dir_b / "manifest.json"));
}

TEST_CASE("summary records version, hash and per-job residuals") {
  auto c = load_config(kConfigs / "immigration_death_stationary.json");
  c.out = scratch("summary");
  const auto r = run_experiment(c);
  const auto& s = r.summary;
  CHECK(s["tool"] == "slackcme");
  CHECK(s["version"] == kVersion);
  CHECK(s["config_hash"].get<std::string>().size() == 16);
  CHECK(s["species"] == Json{"X"});
  REQUIRE(s["jobs"].size() == 8);
  for (const auto& e : s["jobs"]) {
    CHECK(e["status"] == "ok");
    CHECK(e["residual"].get<double>() < 1e-12);
    CHECK(fs::exists(c.out / e["file"].get<std::string>()));
  }
  const auto manifest = Json::parse(slurp(c.out / "manifest.json"));
  const auto files = manifest["files"].get<std::vector<std::string>>();
  CHECK(std::is_sorted(files.begin(), files.end()));
  CHECK(std::find(files.begin(), files.end(), "summary.json") != files.end());

  // Same inputs, same hash; different inputs, different hash.
  auto again = load_config(kConfigs / "immigration_death_stationary.json");
  again.out = scratch("summary2");
  CHECK(run_experiment(again).summary["config_hash"] == s["config_hash"]);
  again.N = {2, 5};
  again.out = scratch("summary3");
  CHECK(run_experiment(again).summary["config_hash"] != s["config_hash"]);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("compare flags the buffer absorbing corner only") {
  auto c = load_config(kConfigs / "example1_buffer_compare.json");
  c.out = scratch("compare");
  const auto r = run_experiment(c);
  const auto& jobs = r.summary["jobs"];
  REQUIRE(jobs.size() == 2);
  for (const auto& e : jobs) {
    CAPTURE(e.dump());
    REQUIRE(e["status"] == "ok");
    if (e["method"] == "buffer") {
      CHECK(e["flag"].get<std::string>().find("(0,40)") != std::string::npos);
    } else {
      CHECK_FALSE(e.contains("flag"));
      CHECK(e["closed_classes"] == 1);
      CHECK(e["target_accessible"] == true);
    }
  }
}

TEST_CASE("unreachable targets are reported, not averaged") {
  auto j = base_config();
  j["network"] = "pure_birth.net";
  j["methods"] = {"slack-regular"};
  j["task"] = "mfpt";
  j["target"] = "X == 0";
  j["x0"] = {2};
  auto c = config_from_json(j, kModels);
  c.out = scratch("unreachable");
  const auto r = run_experiment(c);
  for (const auto& e : r.summary["jobs"]) {
    CHECK(e["status"] == "unreachable");
    CHECK_FALSE(e.contains("mean"));
  }
}

TEST_CASE("check report on bundled models") {
  const auto net = load_net("immigration_death.net");
  const auto rep = check_report(net, std::nullopt);
  CHECK(rep["weakly_reversible"] == true);
  CHECK(rep["deficiency"] == 0);
  CHECK(rep["complex_balance"]["status"] == "complex_balanced");
  CHECK(rep["complex_balance"]["c_star"][0].get<double>() == doctest::Approx(2.0));
  CHECK(rep["lyapunov"].contains("certificate"));

  const auto pure = check_report(load_net("pure_birth.net"), std::nullopt);
  CHECK(pure["weakly_reversible"] == false);
  CHECK(pure["complex_balance"]["status"] == "not_complex_balanced");
  CHECK_FALSE(pure["lyapunov"].contains("certificate"));

  const auto toggle = load_net("toggle.net");
  CHECK(suggest_lyapunov_weights(toggle) == std::vector<int>{1, 1, 0, 0, 0, 0});
}

TEST_CASE("command line subcommands") {
  const auto parse = run_cli("parse " + (kModels / "example1.net").string());
  REQUIRE(parse.status == 0);
  const auto pj = Json::parse(parse.output);
  CHECK(pj["species"] == Json{"A", "B"});

  const auto slack = run_cli("slack " + (kModels / "example1.net").string() + " --W 1,1 --N 5 --u 2");
  REQUIRE(slack.status == 0);
  CHECK(slack.output.find("\"preserved\"") != std::string::npos);

  const auto suggested = run_cli("slack " + (kModels / "dimerization.net").string() + " --suggest --N 20");
  REQUIRE(suggested.status == 0);
  CHECK(Json::parse(suggested.output)["suggested"] == Json{1, 2});
  CHECK(run_cli("slack " + (kModels / "dimerization.net").string() + " --N 20").status == 1);

  const auto check = run_cli("check " + (kModels / "example1.net").string());
  REQUIRE(check.status == 0);
  const auto cj = Json::parse(check.output);
  CHECK(cj["deficiency"] == 0);
  CHECK(cj["complex_balance"]["c_star"][1].get<double>() == doctest::Approx(3.0));

  const auto out = scratch("cli");
  const auto run = run_cli("run " + (kConfigs / "immigration_death_stationary.json").string() +
                           " --out " + out.string() + " --N 4");
  CHECK(run.status == 0);
  CHECK(fs::exists(out / "summary.json"));

  CHECK(run_cli("check /nonexistent.net").status == 1);
  CHECK(run_cli("frobnicate").status != 0);
}
