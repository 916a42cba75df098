#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "slackcme/predicate.hpp"

namespace slackcme::tools {

namespace fs = std::filesystem;

std::string to_string(Method m) {
  switch (m) {
    case Method::SlackRegular: return "slack-regular";
    case Method::SlackOptimized: return "slack-optimized";
    case Method::Fsp: return "fsp";
    case Method::Sfsp: return "sfsp";
    case Method::Buffer: return "buffer";
  }
  return "?";
}

std::string to_string(TaskKind t) {
  switch (t) {
    case TaskKind::Stationary: return "stationary";
    case TaskKind::Transient: return "transient";
    case TaskKind::Mfpt: return "mfpt";
    case TaskKind::Survival: return "survival";
    case TaskKind::Compare: return "compare";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  for (auto m : {Method::SlackRegular, Method::SlackOptimized, Method::Fsp, Method::Sfsp,
                 Method::Buffer})
    if (to_string(m) == s) return m;
  throw Error("unknown method '" + s + "'");
}

TaskKind parse_task(const std::string& s) {
  for (auto t : {TaskKind::Stationary, TaskKind::Transient, TaskKind::Mfpt, TaskKind::Survival,
                 TaskKind::Compare})
    if (to_string(t) == s) return t;
  throw Error("unknown task '" + s + "'");
}

namespace {

template <class T>
T field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config field '") + key + "': " + e.what());
  }
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string state_text(std::span<const int> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + std::to_string(x[i]);
  return s + ")";
}

}  // namespace

ExperimentConfig config_from_json(const Json& j, const fs::path& base_dir) {
  static const std::vector<std::string> known{
      "comment", "network", "conservation", "N", "methods", "sfsp_returns", "region", "task",
      "x0", "target", "times", "x_target", "fpt_method", "ssa", "out", "threads"};
  if (!j.is_object()) throw Error("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error("unknown config field '" + key + "'");
  ExperimentConfig c;
  const auto net = field<std::string>(j, "network");
  c.network = fs::path(net).is_absolute() ? fs::path(net) : base_dir / net;
  if (j.contains("conservation")) {
    Json cons = j.at("conservation");
    if (!cons.contains("N")) cons["N"] = 0;
    c.conservation = conservation_spec_from_json(cons);
  }
  c.N = field<std::vector<int>>(j, "N");
  for (const auto& m : field<std::vector<std::string>>(j, "methods"))
    c.methods.push_back(parse_method(m));
  if (j.contains("sfsp_returns")) c.sfsp_returns = field<std::vector<State>>(j, "sfsp_returns");
  if (j.contains("region")) {
    const auto r = field<std::string>(j, "region");
    if (r == "rectangle") c.region = Region::Kind::Rectangle;
    else if (r == "halfspace") c.region = Region::Kind::HalfSpace;
    else throw Error("config field 'region': expected rectangle or halfspace");
  }
  c.task = parse_task(field<std::string>(j, "task"));
  c.x0 = field<State>(j, "x0");
  if (j.contains("target")) c.target = field<std::string>(j, "target");
  if (j.contains("times")) c.times = field<std::vector<double>>(j, "times");
  if (j.contains("x_target")) c.x_target = field<State>(j, "x_target");
  if (j.contains("fpt_method")) {
    const auto m = field<std::string>(j, "fpt_method");
    if (m == "banded") c.fpt_method = FptMethod::Banded;
    else if (m == "lu") c.fpt_method = FptMethod::SparseLU;
    else throw Error("config field 'fpt_method': expected banded or lu");
  }
  if (j.contains("ssa")) {
    const Json& s = j.at("ssa");
    if (s.contains("samples")) c.ssa.samples = field<std::size_t>(s, "samples");
    if (s.contains("seed")) c.ssa.seed = field<std::uint64_t>(s, "seed");
    if (s.contains("cap")) c.ssa.cap = field<double>(s, "cap");
    if (s.contains("slack_bound")) c.ssa.slack_bound = field<int>(s, "slack_bound");
  }
  if (j.contains("out")) c.out = field<std::string>(j, "out");
  if (j.contains("threads")) c.threads = field<std::size_t>(j, "threads");
  return c;
}

ExperimentConfig load_config(const fs::path& file) {
  Json j;
  try {
    j = Json::parse(read_text(file));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(file.string() + ": " + e.what());
  }
  return config_from_json(j, file.parent_path());
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["network"] = c.network.filename().string();
  Json cons{{"W", c.conservation.W}};
  if (!c.conservation.u.empty()) cons["u"] = c.conservation.u;
  j["conservation"] = cons;
  j["N"] = c.N;
  Json methods = Json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  if (!c.sfsp_returns.empty()) j["sfsp_returns"] = c.sfsp_returns;
  j["region"] = c.region == Region::Kind::Rectangle ? "rectangle" : "halfspace";
  j["task"] = to_string(c.task);
  j["x0"] = c.x0;
  if (!c.target.empty()) j["target"] = c.target;
  if (!c.times.empty()) j["times"] = c.times;
  if (c.x_target) j["x_target"] = *c.x_target;
  j["fpt_method"] = c.fpt_method == FptMethod::Banded ? "banded" : "lu";
  Json ssa{{"samples", c.ssa.samples}, {"seed", c.ssa.seed}};
  if (c.ssa.cap) ssa["cap"] = *c.ssa.cap;
  if (c.ssa.slack_bound) ssa["slack_bound"] = *c.ssa.slack_bound;
  j["ssa"] = ssa;
  return j;
}

void validate(const ExperimentConfig& c) {
  if (!fs::exists(c.network)) throw Error("network file not found: " + c.network.string());
  const auto net = parse_network(read_text(c.network));
  const std::size_t d = net.species_count();

  if (c.N.empty()) throw Error("config field 'N': empty sweep");
  for (std::size_t i = 0; i < c.N.size(); ++i) {
    if (c.N[i] < 0) throw Error("config field 'N': negative bound");
    if (i > 0 && c.N[i] <= c.N[i - 1]) throw Error("config field 'N': sweep must increase strictly");
  }
  if (c.conservation.W.empty()) throw Error("config field 'conservation': W is required");
  for (const auto& row : c.conservation.W)
    if (row.size() != d) throw Error("config field 'conservation': W row length differs from species count");
  if (c.methods.empty()) throw Error("config field 'methods': empty");
  if (c.x0.size() != d) throw Error("config field 'x0': wrong length");
  if (std::any_of(c.x0.begin(), c.x0.end(), [](int v) { return v < 0; }))
    throw Error("config field 'x0': negative count");
  const auto weights = c.conservation.with_bound(c.N.front()).weigh(c.x0);
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > c.N.front())
      throw Error("infeasible x0: W x0 = " + std::to_string(weights[i]) +
                  " exceeds the smallest bound " + std::to_string(c.N.front()));
  if (std::count(c.methods.begin(), c.methods.end(), Method::Sfsp) && c.sfsp_returns.empty())
    throw Error("config field 'sfsp_returns': required by method sfsp");
  for (const auto& r : c.sfsp_returns)
    if (r.size() != d) throw Error("config field 'sfsp_returns': wrong length");

  const bool needs_target = c.task == TaskKind::Mfpt || c.task == TaskKind::Survival;
  if (needs_target) {
    if (c.target.empty()) throw Error("config field 'target': required by task " + to_string(c.task));
    parse_predicate(c.target, net.species_names());
  }
  const bool needs_times = c.task == TaskKind::Transient || c.task == TaskKind::Survival;
  if (needs_times) {
    if (c.times.empty()) throw Error("config field 'times': required by task " + to_string(c.task));
    for (std::size_t i = 0; i < c.times.size(); ++i)
      if (!(c.times[i] >= 0.0) || (i > 0 && c.times[i] < c.times[i - 1]))
        throw Error("config field 'times': must be non-negative and non-decreasing");
  }
  if (c.x_target && c.x_target->size() != d) throw Error("config field 'x_target': wrong length");
  if (c.ssa.samples == 1) throw Error("config field 'ssa.samples': need at least two");
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct Job {
  Method method;
  std::optional<State> x_star;
  int N;
  std::string label;  ///< method name, with the return state for sfsp
};

struct JobResult {
  Json entry;
  std::optional<fs::path> file;
  bool tolerance_failure = false;
};

std::string file_label(const Job& job) {
  std::string s = to_string(job.method);
  if (job.x_star) {
    s += "@";
    for (std::size_t i = 0; i < job.x_star->size(); ++i)
      s += (i ? "-" : "") + std::to_string((*job.x_star)[i]);
  }
  return s;
}

std::vector<bool> covered_species(const ConservationSpec& spec, std::size_t d) {
  std::vector<bool> covered(d, false);
  for (const auto& row : spec.W)
    for (std::size_t j = 0; j < d; ++j)
      if (row[j] != 0) covered[j] = true;
  return covered;
}

TruncatedChain build_chain(const ReactionNetwork& net, const ExperimentConfig& c, const Job& job) {
  const auto spec = c.conservation.with_bound(job.N);
  Region region = Region::halfspace(spec);
  if (c.region == Region::Kind::Rectangle) {
    const auto covered = covered_species(spec, net.species_count());
    std::vector<int> upper(net.species_count(), -1);
    for (std::size_t j = 0; j < upper.size(); ++j)
      if (covered[j]) upper[j] = job.N;
    region = Region::rectangle(upper);
  }
  switch (job.method) {
    case Method::SlackRegular: return build_slack_chain(build_regular_slack(net, spec, c.x0), c.x0);
    case Method::SlackOptimized:
      return build_slack_chain(build_optimized_slack(net, spec, c.x0), c.x0);
    case Method::Fsp: return build_fsp(net, region, c.x0);
    case Method::Sfsp: return build_sfsp(net, region, c.x0, *job.x_star);
    case Method::Buffer: return build_finite_buffer(net, spec, c.x0);
  }
  throw Error("unreachable");
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
}

std::string csv_header(const std::vector<std::string>& names, const char* prefix,
                       const char* suffix) {
  std::string h = prefix;
  for (const auto& n : names) h += (h.empty() ? "" : ",") + n;
  return h + "," + suffix + "\n";
}

JobResult run_job(const ReactionNetwork& net, const ExperimentConfig& c, const Job& job) {
  JobResult res;
  Json& e = res.entry;
  e["method"] = job.label;
  e["N"] = job.N;
  const auto names = net.species_names();
  const std::string stem = to_string(c.task) + "_" + file_label(job) + "_N" + std::to_string(job.N);
  const fs::path file = c.out / (stem + ".csv");
  SolverOptions opts;
  opts.fpt_method = c.fpt_method;
  std::ostringstream csv;
  try {
    const auto chain = build_chain(net, c, job);
    e["states"] = chain.space->size();
    const std::size_t x0 = chain.index(c.x0);
    switch (c.task) {
      case TaskKind::Stationary: {
        if (chain.sink) throw AccessibilityError("fsp keeps an absorbing sink; no stationary law on the projection");
        const auto st = stationary(chain.A, x0, opts);
        e["residual"] = st.residual;
        e["support"] = st.support.size();
        write_distribution_csv(csv, *chain.space, st.pi, names);
        break;
      }
      case TaskKind::Transient: {
        const auto grid = transient_grid(chain.A, chain.point_mass(c.x0), c.times, opts);
        csv << csv_header(names, "t", "probability");
        Json sink = Json::array();
        for (std::size_t k = 0; k < grid.size(); ++k) {
          for (std::size_t i = 0; i < chain.space->size(); ++i) {
            if (grid[k][i] == 0.0) continue;
            csv << format_double(c.times[k]);
            for (int v : chain.space->state(i)) csv << ',' << v;
            csv << ',' << format_double(grid[k][i]) << '\n';
          }
          if (chain.sink) sink.push_back(grid[k][*chain.sink]);
        }
        if (chain.sink) e["sink_mass"] = sink;
        break;
      }
      case TaskKind::Mfpt: {
        const auto K = chain.target_mask(parse_predicate(c.target, names));
        const auto r = mfpt(chain.A, K, x0, opts);
        e["mean"] = r.mean;
        e["residual"] = r.residual;
        e["reduced_states"] = r.reduced_size;
        csv << "N,mean,residual,states\n"
            << job.N << ',' << format_double(r.mean) << ',' << format_double(r.residual) << ','
            << chain.space->size() << '\n';
        break;
      }
      case TaskKind::Survival: {
        const auto K = chain.target_mask(parse_predicate(c.target, names));
        const auto curve = survival(chain.A, K, x0, c.times, opts);
        write_curve_csv(csv, curve);
        break;
      }
      case TaskKind::Compare: {
        // Only the part of the chain that x0 can actually visit matters; a
        // slack space may list states that no path from x0 enters.
        const auto classes = communication_classes(chain.A);
        const auto seen = reachable_from(chain.A, x0);
        std::size_t closed = 0, visited = 0;
        Json absorbing = Json::array();
        std::string flag;
        for (const auto& cls : classes) {
          if (!seen[cls.states.front()]) continue;
          ++visited;
          if (!cls.closed) continue;
          ++closed;
          if (!cls.absorbing()) continue;
          const std::size_t s = cls.states.front();
          if (chain.sink && s == *chain.sink) continue;
          const auto text = state_text(chain.space->state(s));
          absorbing.push_back(text);
          if (c.x_target) {
            const auto t = chain.space->find(*c.x_target);
            e["target_accessible_from"][text] = t && accessibility(chain.A, s, {*t});
          }
          flag += (flag.empty() ? "" : "; ") + ("absorbing state " + text);
        }
        e["classes"] = visited;
        e["unvisited_classes"] = classes.size() - visited;
        e["closed_classes"] = closed;
        e["absorbing_states"] = absorbing;
        std::string reach = "";
        if (c.x_target) {
          const auto t = chain.space->find(*c.x_target);
          reach = t && accessibility(chain.A, x0, {*t}) ? "true" : "false";
          e["target_accessible"] = reach == "true";
        }
        if (!flag.empty()) e["flag"] = flag;
        csv << "method,N,states,classes,closed_classes,target_accessible,flag\n"
            << job.label << ',' << job.N << ',' << chain.space->size() << ',' << visited
            << ',' << closed << ',' << reach << ",\"" << flag << "\"\n";
        break;
      }
    }
    e["status"] = "ok";
  } catch (const AccessibilityError& ex) {
    e["status"] = "unreachable";
    e["message"] = ex.what();
  } catch (const ToleranceError& ex) {
    e["status"] = "tolerance";
    e["message"] = ex.what();
    e["achieved"] = ex.achieved();
    res.tolerance_failure = true;
  } catch (const Error& ex) {
    e["status"] = "error";
    e["message"] = ex.what();
  }
  if (e["status"] == "ok") {
    write_text(file, csv.str());
    res.file = file;
    e["file"] = file.filename().string();
  }
  return res;
}

template <class Body>
void fan_out(std::size_t n, std::size_t threads, Body body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

Json ssa_reference(const ReactionNetwork& net, const ExperimentConfig& c, const fs::path& dir,
                   std::vector<fs::path>& files) {
  Json j{{"samples", c.ssa.samples}, {"seed", c.ssa.seed}};
  SsaModel model = SsaModel::from_network(net);
  if (c.ssa.slack_bound) {
    model = SsaModel::from_slack(
        build_regular_slack(net, c.conservation.with_bound(*c.ssa.slack_bound), c.x0));
    j["model"] = "slack-regular";
    j["N"] = *c.ssa.slack_bound;
  } else {
    j["model"] = "original";
  }
  SsaOptions opts;
  opts.time_cap = c.ssa.cap;
  opts.threads = c.threads;
  const auto names = net.species_names();
  try {
    if (c.task == TaskKind::Mfpt) {
      const auto est = estimate_mfpt(model, c.x0, parse_predicate(c.target, names), c.ssa.samples,
                                     c.ssa.seed, opts);
      j["mean"] = est.mean;
      j["std_error"] = est.std_error;
      j["hit"] = est.n_hit;
      j["censored"] = est.n_censored;
      const auto file = dir / "ssa_mfpt.csv";
      write_text(file, "samples,mean,std_error,hit,censored\n" + std::to_string(c.ssa.samples) +
                           "," + format_double(est.mean) + "," + format_double(est.std_error) +
                           "," + std::to_string(est.n_hit) + "," +
                           std::to_string(est.n_censored) + "\n");
      files.push_back(file);
    } else if (c.task == TaskKind::Transient) {
      const double t = c.times.back();
      const auto density = empirical_density(model, c.x0, t, c.ssa.samples, c.ssa.seed, opts);
      std::ostringstream csv;
      write_density_csv(csv, density, names);
      const auto file = dir / "ssa_density.csv";
      write_text(file, csv.str());
      files.push_back(file);
      j["t"] = t;
      j["support"] = density.size();
    } else {
      j["skipped"] = "no SSA estimator for task " + to_string(c.task);
    }
  } catch (const Error& ex) {
    j["error"] = ex.what();
  }
  return j;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& c) {
  validate(c);
  const std::string net_text = read_text(c.network);
  const auto net = parse_network(net_text);
  fs::create_directories(c.out);

  std::vector<Job> jobs;
  for (auto m : c.methods) {
    if (m == Method::Sfsp) {
      for (const auto& r : c.sfsp_returns)
        for (int N : c.N) jobs.push_back({m, r, N, "sfsp" + state_text(r)});
    } else {
      for (int N : c.N) jobs.push_back({m, std::nullopt, N, to_string(m)});
    }
  }

  std::vector<JobResult> results(jobs.size());
  fan_out(jobs.size(), c.threads, [&](std::size_t i) { results[i] = run_job(net, c, jobs[i]); });

  RunSummary out;
  Json entries = Json::array();
  for (auto& r : results) {
    entries.push_back(r.entry);
    if (r.file) out.files.push_back(*r.file);
    out.tolerance_failure = out.tolerance_failure || r.tolerance_failure;
  }

  // Per-method sweep tables, written once every job has finished.
  if (c.task == TaskKind::Mfpt || c.task == TaskKind::Compare) {
    std::vector<std::string> labels;
    for (const auto& job : jobs)
      if (std::find(labels.begin(), labels.end(), job.label) == labels.end())
        labels.push_back(job.label);
    for (const auto& label : labels) {
      std::ostringstream csv;
      std::string stem;
      if (c.task == TaskKind::Mfpt) csv << "N,mean,residual,states,status\n";
      else csv << "N,states,closed_classes,target_accessible,flag\n";
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (jobs[i].label != label) continue;
        stem = file_label(jobs[i]);
        const Json& e = results[i].entry;
        const std::string status = e["status"];
        const std::string states = e.contains("states") ? std::to_string(e["states"].get<std::size_t>()) : "";
        if (c.task == TaskKind::Mfpt) {
          csv << jobs[i].N << ',' << (e.contains("mean") ? format_double(e["mean"]) : "") << ','
              << (e.contains("residual") ? format_double(e["residual"]) : "") << ',' << states
              << ',' << status << '\n';
        } else {
          csv << jobs[i].N << ',' << states << ','
              << (e.contains("closed_classes") ? std::to_string(e["closed_classes"].get<std::size_t>()) : "")
              << ',' << (e.contains("target_accessible") ? (e["target_accessible"].get<bool>() ? "true" : "false") : "")
              << ",\"" << (e.contains("flag") ? e["flag"].get<std::string>() : "") << "\"\n";
        }
      }
      const auto file = c.out / (to_string(c.task) + "_" + stem + ".csv");
      write_text(file, csv.str());
      out.files.push_back(file);
    }
  }

  Json summary;
  summary["tool"] = "slackcme";
  summary["version"] = kVersion;
  const Json cfg = config_to_json(c);
  summary["config_hash"] = fnv1a_hex(cfg.dump() + "\n" + net_text);
  summary["config"] = cfg;
  summary["species"] = net.species_names();
  summary["task"] = to_string(c.task);
  summary["jobs"] = entries;
  if (c.ssa.samples > 0) summary["ssa"] = ssa_reference(net, c, c.out, out.files);
  summary["tolerance_failure"] = out.tolerance_failure;
  const auto summary_file = c.out / "summary.json";
  write_text(summary_file, summary.dump(2) + "\n");
  out.files.push_back(summary_file);

  Json manifest;
  manifest["tool"] = "slackcme";
  manifest["version"] = kVersion;
  Json files = Json::array();
  for (const auto& f : out.files) files.push_back(fs::relative(f, c.out).generic_string());
  std::sort(files.begin(), files.end());
  manifest["files"] = files;
  write_text(c.out / "manifest.json", manifest.dump(2) + "\n");
  out.summary = std::move(summary);
  return out;
}

}  // namespace slackcme::tools
