#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "slackcme/predicate.hpp"
#include "slackcme/solver.hpp"
#include "slackcme/truncation.hpp"
#include "support.hpp"

using namespace slackcme;

namespace {

TruncatedChain slack_chain(const char* model, IntMatrix W, int N, const State& x0,
                           std::vector<int> u = {}) {
  ConservationSpec s;
  s.W = std::move(W);
  s.N.assign(s.W.size(), N);
  s.u = std::move(u);
  return build_slack_chain(build_regular_slack(test::load_model(model), s), x0);
}

Eigen::MatrixXd dense(const Generator& A) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(A.dim()),
                                            static_cast<Eigen::Index>(A.dim()));
  for (std::size_t i = 0; i < A.dim(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    M(ii, ii) = A.diagonal(i);
    const auto c = A.targets(i);
    const auto r = A.rates(i);
    for (std::size_t k = 0; k < c.size(); ++k) M(ii, static_cast<Eigen::Index>(c[k])) = r[k];
  }
  return M;
}

Generator permuted(const Generator& A, const std::vector<std::size_t>& perm) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < A.dim(); ++i) {
    const auto c = A.targets(i);
    const auto r = A.rates(i);
    for (std::size_t k = 0; k < c.size(); ++k) t.push_back({perm[i], perm[c[k]], r[k]});
  }
  return Generator::from_triplets(A.dim(), std::move(t));
}

}  // namespace

TEST_CASE("stationary law of the immigration-death slack chain") {
  // Truncated Poisson(2) on {0..N}, written out independently of the solver.
  for (int N : {2, 5, 10, 50}) {
    CAPTURE(N);
    const auto chain = slack_chain("immigration_death.net", {{1}}, N, State{0});
    const auto st = stationary(chain.A);
    std::vector<double> poisson(static_cast<std::size_t>(N) + 1);
    double term = 1.0;
    for (int k = 0; k <= N; ++k) {
      if (k > 0) term *= 2.0 / k;
      poisson[static_cast<std::size_t>(k)] = term;
    }
    const double z = std::accumulate(poisson.begin(), poisson.end(), 0.0);
    double worst = 0.0;
    for (int k = 0; k <= N; ++k) {
      const std::vector<int> x{k};
      worst = std::max(worst, std::abs(st.pi[chain.index(x)] - poisson[static_cast<std::size_t>(k)] / z));
    }
    CHECK(worst < 1e-12);
    CHECK(st.residual < 1e-12);
  }
  const auto chain = slack_chain("immigration_death.net", {{1}}, 2, State{0});
  const auto pi = stationary(chain.A).pi;
  CHECK(pi[0] == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(pi[1] == doctest::Approx(0.4).epsilon(1e-13));
  CHECK(pi[2] == doctest::Approx(0.4).epsilon(1e-13));
}

TEST_CASE("stationary needs a unique closed class or an anchor") {
  // Two absorbing states 0 and 2 reachable from 1.
  const auto A = Generator::from_triplets(3, {{1, 0, 1.0}, {1, 2, 1.0}});
  CHECK_THROWS_AS(stationary(A), Error);
  const auto st = stationary(A, 2);
  CHECK(st.pi[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(stationary(A, 1), Error);
}

TEST_CASE("transient solution of a two-state chain") {
  const double a = 3.0, b = 0.5;
  const auto A = Generator::from_triplets(2, {{0, 1, a}, {1, 0, b}});
  const std::vector<double> p0{1.0, 0.0};
  for (double t : {0.0, 0.01, 0.3, 2.0, 40.0}) {
    const auto p = transient(A, p0, t);
    const double q = b / (a + b) + (1.0 - b / (a + b)) * std::exp(-(a + b) * t);
    CHECK(p[0] == doctest::Approx(q).epsilon(1e-11));
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("uniformization agrees with the dense matrix exponential") {
  const auto chain = slack_chain("lotka_volterra.net", {{1, 1}}, 12, State{3, 3});
  const auto M = dense(chain.A);
  const auto p0 = chain.point_mass(State{3, 3});
  Eigen::RowVectorXd r0(static_cast<Eigen::Index>(p0.size()));
  for (std::size_t i = 0; i < p0.size(); ++i) r0[static_cast<Eigen::Index>(i)] = p0[i];
  for (double t : {0.5, 3.0, 20.0}) {
    const Eigen::MatrixXd E = (M * t).exp();
    const Eigen::RowVectorXd ref = r0 * E;
    const auto p = transient(chain.A, p0, t);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      worst = std::max(worst, std::abs(p[i] - ref[static_cast<Eigen::Index>(i)]));
    CAPTURE(t);
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("transient grid matches separate solves and keeps mass") {
  const auto chain = slack_chain("dimerization.net", {{1, 2}}, 20, State{0, 0});
  const auto p0 = chain.point_mass(State{0, 0});
  const std::vector<double> times{0.0, 0.5, 0.5, 2.0, 7.5};
  const auto grid = transient_grid(chain.A, p0, times);
  REQUIRE(grid.size() == times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto direct = transient(chain.A, p0, times[k]);
    double diff = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
      diff = std::max(diff, std::abs(direct[i] - grid[k][i]));
      mass += grid[k][i];
    }
    CHECK(diff < 1e-10);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }
  const std::vector<double> bad{1.0, 0.5};
  CHECK_THROWS_AS(transient_grid(chain.A, p0, bad), Error);
}

TEST_CASE("birth-death first passage against the recursion") {
  // Births at rate 1, deaths at rate 2k; mean time from 0 to n is the sum of
  // one-step up-crossing times m_k = (1 + 2k m_{k-1}) / 1.
  const int n = 6;
  const auto chain = slack_chain("birth_death.net", {{1}}, 15, State{0});
  const auto K = chain.target_mask([&](std::span<const int> x) { return x[0] == n; });
  const auto r = mfpt(chain.A, K, chain.index(State{0}));
  double prev = 0.0, total = 0.0;
  for (int k = 0; k < n; ++k) {
    const double m = 1.0 + 2.0 * k * prev;
    total += m;
    prev = m;
  }
  CHECK(r.mean == doctest::Approx(total).epsilon(1e-11));
  CHECK(r.reduced_size == static_cast<std::size_t>(n));
  CHECK(r.residual < 1e-12);
}

TEST_CASE("banded and sparse LU first-passage solves agree") {
  struct Case {
    const char* model;
    IntMatrix W;
    int N;
    State x0;
    const char* target;
  };
  const std::vector<Case> cases{
      {"lotka_volterra.net", {{1, 1}}, 60, {3, 3}, "A == 0 || B == 0"},
      {"dimerization.net", {{1, 2}}, 40, {0, 0}, "X1 == 1 && (X2 == 1 || X2 == 2)"},
      {"example1.net", {{1, 1}}, 30, {0, 0}, "A == 5 && B == 5"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.model);
    const auto chain = slack_chain(c.model, c.W, c.N, c.x0);
    const auto K = chain.target_mask(parse_predicate(c.target, test::load_model(c.model).species_names()));
    SolverOptions lu;
    lu.fpt_method = FptMethod::SparseLU;
    const auto a = mfpt(chain.A, K, chain.index(c.x0));
    const auto b = mfpt(chain.A, K, chain.index(c.x0), lu);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-9));
  }
}

TEST_CASE("first-passage times do not depend on the state numbering") {
  const auto chain = slack_chain("lotka_volterra.net", {{1, 1}}, 30, State{3, 3});
  const auto K = chain.target_mask([](std::span<const int> x) { return x[0] == 0 || x[1] == 0; });
  const auto base = mfpt_all(chain.A, K);
  std::vector<std::size_t> perm(chain.A.dim());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937 rng(5);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto B = permuted(chain.A, perm);
  std::vector<bool> KB(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) KB[perm[i]] = K[i];
  for (auto method : {FptMethod::Banded, FptMethod::SparseLU}) {
    SolverOptions o;
    o.fpt_method = method;
    const auto other = mfpt_all(B, KB, o);
    double worst = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i)
      worst = std::max(worst, std::abs(base[i] - other[perm[i]]) / std::max(1.0, base[i]));
    CHECK(worst < 1e-10);
  }
  const auto one = mfpt(chain.A, K, chain.index(State{3, 3}));
  CHECK(one.mean == doctest::Approx(base[chain.index(State{3, 3})]).epsilon(1e-12));
}

TEST_CASE("unreachable targets are reported") {
  const auto net = test::load_model("example1.net");
  ConservationSpec s{{{2, 1}}, {40}, {2}};
  const auto buffer = build_finite_buffer(net, s, State{0, 0});
  const auto K = buffer.target_mask([](std::span<const int> x) { return x[0] == 10 && x[1] == 10; });
  CHECK_THROWS_WITH_AS(mfpt(buffer.A, K, buffer.index(State{0, 0})),
                       doctest::Contains("non-accessible target"), AccessibilityError);
  const auto all = mfpt_all(buffer.A, K);
  CHECK(std::isinf(all[buffer.index(State{0, 40})]));

  const auto slack = build_slack_chain(build_regular_slack(net, s), State{0, 0});
  const auto KS = slack.target_mask([](std::span<const int> x) { return x[0] == 10 && x[1] == 10; });
  CHECK(mfpt(slack.A, KS, slack.index(State{0, 0})).mean > 0.0);
  const auto none = slack.target_mask([](std::span<const int>) { return false; });
  CHECK_THROWS_AS(mfpt(slack.A, none, 0), AccessibilityError);
}

TEST_CASE("survival curves") {
  const auto chain = slack_chain("lotka_volterra.net", {{1, 1}}, 25, State{3, 3});
  const auto K = chain.target_mask([](std::span<const int> x) { return x[0] == 0 || x[1] == 0; });
  std::vector<double> times;
  for (int k = 0; k <= 40; ++k) times.push_back(0.25 * k);
  const auto curve = survival(chain.A, K, chain.index(State{3, 3}), times);
  CHECK(curve.front().second == doctest::Approx(1.0));
  for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k].second <= curve[k - 1].second);
  CHECK(curve.back().second < 0.05);
  // The area under P(tau > t) approximates the mean (trapezoid rule, long tail cut).
  std::vector<double> fine;
  for (int k = 0; k <= 4000; ++k) fine.push_back(0.01 * k);
  const auto dense_curve = survival(chain.A, K, chain.index(State{3, 3}), fine);
  double area = 0.0;
  for (std::size_t k = 1; k < dense_curve.size(); ++k)
    area += 0.5 * (dense_curve[k].second + dense_curve[k - 1].second) * 0.01;
  CHECK(area == doctest::Approx(mfpt(chain.A, K, chain.index(State{3, 3})).mean).epsilon(1e-4));
}

TEST_CASE("l1 distance over different spaces") {
  auto s1 = std::make_shared<const StateSpace>(1, std::vector<State>{{0}, {1}});
  auto s2 = std::make_shared<const StateSpace>(1, std::vector<State>{{1}, {2}});
  const Distribution p{s1, {0.5, 0.5}}, q{s2, {0.25, 0.75}};
  CHECK(l1_distance(p, q) == doctest::Approx(0.5 + 0.25 + 0.75));
  CHECK(l1_distance(p, p) == 0.0);
  CHECK(p.at(std::vector<int>{7}) == 0.0);
}
