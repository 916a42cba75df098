#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "slackcme/predicate.hpp"
#include "slackcme/solver.hpp"
#include "slackcme/ssa.hpp"
#include "slackcme/truncation.hpp"

using namespace slackcme;

namespace {

ReactionNetwork model(const std::string& name) {
  std::ifstream in(std::string(SLACKCME_MODELS_DIR) + "/" + name);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_network(s.str());
}

const ReactionNetwork& lotka_volterra() {
  static const auto net = model("lotka_volterra.net");
  return net;
}

const ReactionNetwork& toggle() {
  static const auto net = model("toggle.net");
  return net;
}

const State kToggleStart{0, 0, 1, 0, 1, 0};

SlackNetwork lv_slack(int N) { return build_regular_slack(lotka_volterra(), {{{1, 1}}, {N}, {}}); }

}  // namespace

static void BM_Enumerate(benchmark::State& state) {
  const auto snet = lv_slack(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_states(snet).size());
}
BENCHMARK(BM_Enumerate)->Arg(40)->Arg(160)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_Generator(benchmark::State& state) {
  const auto snet = lv_slack(static_cast<int>(state.range(0)));
  const auto space = enumerate_states(snet);
  for (auto _ : state) benchmark::DoNotOptimize(build_generator(space, snet).nonzeros());
  state.counters["states"] = static_cast<double>(space.size());
}
BENCHMARK(BM_Generator)->Arg(40)->Arg(160)->Arg(400)->Unit(benchmark::kMillisecond);

TruncatedChain toggle_chain(int N) {
  return build_slack_chain(build_regular_slack(toggle(), {{{1, 1, 0, 0, 0, 0}}, {N}, {}}),
                           kToggleStart);
}

static void BM_Stationary(benchmark::State& state) {
  const auto chain = toggle_chain(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(stationary(chain.A).pi);
  state.counters["states"] = static_cast<double>(chain.space->size());
}
BENCHMARK(BM_Stationary)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

static void BM_Transient(benchmark::State& state) {
  const auto chain = toggle_chain(static_cast<int>(state.range(0)));
  const auto p0 = chain.point_mass(kToggleStart);
  for (auto _ : state) benchmark::DoNotOptimize(transient(chain.A, p0, 0.1));
}
BENCHMARK(BM_Transient)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

// Banded elimination against sparse LU on the toggle first-passage problem.
static void BM_ToggleMfpt(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto chain = toggle_chain(N);
  const auto K = chain.target_mask(parse_predicate("X > 30 && Z > 30", toggle().species_names()));
  SolverOptions o;
  o.fpt_method = state.range(1) == 0 ? FptMethod::Banded : FptMethod::SparseLU;
  for (auto _ : state) benchmark::DoNotOptimize(mfpt(chain.A, K, chain.index(kToggleStart), o).mean);
  state.SetLabel(state.range(1) == 0 ? "banded" : "sparse-lu");
}
BENCHMARK(BM_ToggleMfpt)->ArgsProduct({{70, 100}, {0, 1}})->Unit(benchmark::kMillisecond);

static void BM_SsaMfpt(benchmark::State& state) {
  const auto model = SsaModel::from_network(lotka_volterra());
  const auto K = parse_predicate("A == 0 || B == 0", lotka_volterra().species_names());
  SsaOptions o;
  o.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_mfpt(model, State{3, 3}, K, 1000, 1, o).mean);
}
BENCHMARK(BM_SsaMfpt)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
