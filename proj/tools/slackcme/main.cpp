#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "runner/experiment.hpp"
#include "runner/reports.hpp"

namespace fs = std::filesystem;
using namespace slackcme;

namespace {

ReactionNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_network(s.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slack-reactant truncation of chemical master equations"};
  app.set_version_flag("--version", std::string(tools::kVersion));
  app.require_subcommand(1);

  std::string network;

  auto* parse = app.add_subcommand("parse", "Parse a network and print its structure as JSON");
  parse->add_option("network,--network", network, "Network file")->required();
  bool dsl_only = false;
  parse->add_flag("--dsl", dsl_only, "Print the normalized DSL instead of JSON");

  auto* slack = app.add_subcommand("slack", "Build a slack network");
  slack->add_option("network,--network", network, "Network file")->required();
  std::vector<std::vector<int>> W;
  slack->add_option("--W", W,
                    "Conservation row, comma separated; repeat for more rows "
                    "(default with --suggest: the suggested vector)")
      ->delimiter(',');
  std::vector<int> bound;
  slack->add_option("--N", bound, "Bound per row (one value applies to all)")
      ->delimiter(',')
      ->required();
  std::vector<int> u;
  slack->add_option("--u", u, "Complex offset per row (default: least intrusive)")->delimiter(',');
  std::string mode = "regular";
  slack->add_option("--mode", mode, "regular or optimized")
      ->check(CLI::IsMember({"regular", "optimized"}));
  std::vector<int> slack_x0;
  slack->add_option("--x0", slack_x0, "Initial state checked against the bound")->delimiter(',');
  bool suggest = false;
  slack->add_flag("--suggest", suggest, "Also rank candidate conservation vectors");

  auto* check = app.add_subcommand("check", "Structural report with certificates");
  check->add_option("network,--network", network, "Network file")->required();
  std::vector<int> w;
  check->add_option("--w", w, "Lyapunov weights (default: suggested)")->delimiter(',');
  std::vector<int> check_x0;
  check->add_option("--x0", check_x0, "State fixing totals of bounded species")->delimiter(',');

  auto* run = app.add_subcommand("run", "Run an experiment configuration");
  std::string config;
  run->add_option("config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  std::string run_network, task, out, target;
  std::vector<int> sweep;
  std::vector<std::string> methods;
  std::uint64_t seed = 0;
  std::size_t threads = 0, samples = 0;
  auto* o_net = run->add_option("--network", run_network, "Override the network file");
  auto* o_task = run->add_option("--task", task, "Override the task");
  auto* o_N = run->add_option("--N", sweep, "Override the N sweep")->delimiter(',');
  auto* o_method = run->add_option("--method", methods, "Override the methods")->delimiter(',');
  auto* o_seed = run->add_option("--seed", seed, "Override the SSA seed");
  auto* o_out = run->add_option("--out", out, "Override the output directory");
  auto* o_target = run->add_option("--target", target, "Override the target expression");
  auto* o_threads = run->add_option("--threads", threads, "Worker threads (0 = all cores)");
  auto* o_samples = run->add_option("--samples", samples, "Override the SSA sample count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse) {
      const auto net = load_network(network);
      if (dsl_only) std::cout << to_dsl(net);
      else std::cout << tools::parse_report(net).dump(2) << '\n';
      return 0;
    }
    if (*slack) {
      const auto net = load_network(network);
      if (W.empty() && !suggest) throw Error("--W is required unless --suggest is given");
      std::vector<std::vector<int>> candidates;
      if (suggest) candidates = default_candidates(net);
      if (W.empty()) W.push_back(suggest_conservation_vector(net, candidates));
      ConservationSpec spec;
      spec.W = W;
      spec.N = bound.size() == 1 ? std::vector<int>(W.size(), bound[0]) : bound;
      spec.u = u.size() == 1 && W.size() > 1 ? std::vector<int>(W.size(), u[0]) : u;
      std::optional<State> x0;
      if (!slack_x0.empty()) x0 = slack_x0;
      Json j = tools::slack_report(
          net, spec, mode == "regular" ? SlackMode::Regular : SlackMode::Optimized, x0);
      if (suggest) {
        Json ranked = Json::array();
        for (const auto& c : candidates)
          ranked.push_back({{"w", c}, {"score", score_conservation_vector(net, c)}});
        j["candidates"] = ranked;
        j["suggested"] = suggest_conservation_vector(net, candidates);
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (*check) {
      const auto net = load_network(network);
      std::optional<std::vector<int>> weights;
      if (!w.empty()) weights = w;
      std::optional<State> x0;
      if (!check_x0.empty()) x0 = check_x0;
      std::cout << tools::check_report(net, weights, x0).dump(2) << '\n';
      return 0;
    }

    std::ifstream in(config);
    Json j = Json::parse(in);
    if (*o_net) j["network"] = fs::absolute(run_network).string();
    if (*o_task) j["task"] = task;
    if (*o_N) j["N"] = sweep;
    if (*o_method) j["methods"] = methods;
    if (*o_seed) j["ssa"]["seed"] = seed;
    if (*o_samples) j["ssa"]["samples"] = samples;
    if (*o_out) j["out"] = out;
    if (*o_target) j["target"] = target;
    if (*o_threads) j["threads"] = threads;
    const auto cfg = tools::config_from_json(j, fs::path(config).parent_path());
    const auto result = tools::run_experiment(cfg);
    for (const auto& e : result.summary["jobs"]) {
      std::cout << e["method"].get<std::string>() << " N=" << e["N"].get<int>() << ": "
                << e["status"].get<std::string>();
      if (e.contains("mean")) std::cout << " mean=" << format_double(e["mean"]);
      if (e.contains("residual")) std::cout << " residual=" << format_double(e["residual"]);
      if (e.contains("flag")) std::cout << " [" << e["flag"].get<std::string>() << "]";
      if (e.contains("message")) std::cout << " (" << e["message"].get<std::string>() << ")";
      std::cout << '\n';
    }
    if (result.summary.contains("ssa") && result.summary["ssa"].contains("mean"))
      std::cout << "ssa: mean=" << format_double(result.summary["ssa"]["mean"])
                << " std_error=" << format_double(result.summary["ssa"]["std_error"]) << '\n';
    std::cout << "wrote " << result.files.size() << " files under " << cfg.out.string() << '\n';
    return result.tolerance_failure ? 3 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
