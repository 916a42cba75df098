#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "slackcme/io.hpp"
#include "slackcme/truncation.hpp"

namespace slackcme::tools {

inline constexpr const char* kVersion = "0.3.0";

enum class Method { SlackRegular, SlackOptimized, Fsp, Sfsp, Buffer };
enum class TaskKind { Stationary, Transient, Mfpt, Survival, Compare };

std::string to_string(Method m);
std::string to_string(TaskKind t);
Method parse_method(const std::string& s);
TaskKind parse_task(const std::string& s);

struct SsaConfig {
  std::size_t samples = 0;  ///< 0 disables the SSA reference
  std::uint64_t seed = 1;
  std::optional<double> cap;
  /// Simulate the slack network at this bound instead of the original one.
  std::optional<int> slack_bound;
};

struct ExperimentConfig {
  std::filesystem::path network;
  ConservationSpec conservation;  ///< N left empty; filled per sweep entry
  std::vector<int> N;
  std::vector<Method> methods;
  /// Return states for sfsp, one run each.
  std::vector<State> sfsp_returns;
  Region::Kind region = Region::Kind::Rectangle;
  TaskKind task = TaskKind::Stationary;
  State x0;
  std::string target;           ///< mfpt, survival
  std::vector<double> times;    ///< transient, survival
  std::optional<State> x_target;  ///< compare: accessibility probe
  FptMethod fpt_method = FptMethod::Banded;
  SsaConfig ssa;
  /// Relative to the working directory, not the config file.
  std::filesystem::path out = "out";
  std::size_t threads = 0;
};

/// Reads a config file; relative paths resolve against its directory.
ExperimentConfig load_config(const std::filesystem::path& file);
ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir);
/// Schema and consistency checks; throws Error with the offending field.
void validate(const ExperimentConfig& config);
Json config_to_json(const ExperimentConfig& config);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

struct RunSummary {
  Json summary;
  /// A solver missed its tolerance somewhere.
  bool tolerance_failure = false;
  std::vector<std::filesystem::path> files;
};

/// Runs every (method, N) job, writes CSVs, summary.json and manifest.json
/// under config.out.
RunSummary run_experiment(const ExperimentConfig& config);

}  // namespace slackcme::tools
