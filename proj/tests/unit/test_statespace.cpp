#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "slackcme/statespace.hpp"
#include "slackcme/truncation.hpp"
#include "support.hpp"

using namespace slackcme;

namespace {

SlackNetwork slack_of(const char* model, IntMatrix W, int N, std::vector<int> u = {}) {
  ConservationSpec s;
  s.W = std::move(W);
  s.N.assign(s.W.size(), N);
  s.u = std::move(u);
  return build_regular_slack(test::load_model(model), s);
}

}  // namespace

TEST_CASE("simplex sizes and grade order") {
  for (int N : {0, 1, 5, 17}) {
    const auto space = enumerate_states(slack_of("example1.net", {{1, 1}}, N));
    CHECK(space.size() == static_cast<std::size_t>((N + 1) * (N + 2) / 2));
    long long last = -1;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto x = space.state(i);
      const long long g = x[0] + x[1];
      CHECK(g >= last);
      last = g;
    }
  }
  // Weighted simplex 2A + B <= 4: 5 + 3 + 1 states.
  CHECK(enumerate_states(slack_of("example1.net", {{2, 1}}, 4, {2})).size() == 9);
}

TEST_CASE("state spaces are nested prefixes in N") {
  const auto small = enumerate_states(slack_of("lotka_volterra.net", {{1, 1}}, 12));
  const auto big = enumerate_states(slack_of("lotka_volterra.net", {{1, 1}}, 13));
  REQUIRE(big.size() > small.size());
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(big.at(i) == small.at(i));
}

TEST_CASE("state lookup") {
  const auto space = enumerate_states(slack_of("example1.net", {{1, 1}}, 4));
  for (std::size_t i = 0; i < space.size(); ++i) CHECK(space.find(space.state(i)) == i);
  CHECK_FALSE(space.contains(std::vector<int>{5, 0}));
  CHECK_THROWS_AS(StateSpace(2, {{0, 0}, {0, 0}}), StateSpaceError);
  CHECK_THROWS_AS(StateSpace(2, {{0, -1}}), StateSpaceError);
}

TEST_CASE("intrinsically bounded species are pinned to the class of x0") {
  const auto snet = slack_of("toggle.net", {{1, 1, 0, 0, 0, 0}}, 6);
  CHECK_THROWS_AS(enumerate_states(snet), StateSpaceError);
  const auto space = enumerate_states(snet, State{0, 0, 1, 0, 1, 0});
  CHECK(space.size() == 4u * 7u * 8u / 2u);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto x = space.state(i);
    CHECK(x[2] + x[3] == 1);
    CHECK(x[4] + x[5] == 1);
  }
}

TEST_CASE("species without any bound are reported") {
  ConservationSpec s{{{1, 0}}, {5}, {}};
  const auto lv = test::load_model("lotka_volterra.net");
  // Species order is B, A; the row covers only B.
  CHECK_THROWS_WITH_AS(enumerate_halfspace(lv, s), doctest::Contains("'A'"), StateSpaceError);
  ConservationSpec neg{{{1, -1}}, {5}, {}};
  CHECK_THROWS_AS(enumerate_halfspace(lv, neg), StateSpaceError);
}

TEST_CASE("generator rows sum to zero") {
  for (const char* model : {"lotka_volterra.net", "dimerization.net", "example1.net"}) {
    CAPTURE(model);
    const auto net = test::load_model(model);
    IntMatrix W{std::vector<int>(net.species_count(), 1)};
    ConservationSpec s{W, {15}, {}};
    const auto snet = build_regular_slack(net, s);
    const auto space = enumerate_states(snet);
    const auto A = build_generator(space, snet);
    CHECK(A.dim() == space.size());
    CHECK(A.max_row_sum_error() <= 1e-12 * A.max_exit_rate());
    for (std::size_t i = 0; i < A.dim(); ++i)
      for (double r : A.rates(i)) CHECK(r > 0.0);
  }
}

TEST_CASE("generator triplet assembly") {
  const auto A = Generator::from_triplets(3, {{0, 1, 1.0}, {0, 1, 2.0}, {1, 2, 0.5}, {2, 0, 0.0}});
  CHECK(A.rate(0, 1) == 3.0);
  CHECK(A.diagonal(0) == -3.0);
  CHECK(A.is_absorbing(2));
  CHECK(A.nonzeros() == 2);
  CHECK_THROWS_AS(Generator::from_triplets(2, {{0, 0, 1.0}}), Error);
  CHECK_THROWS_AS(Generator::from_triplets(2, {{0, 1, -1.0}}), Error);

  std::ostringstream mm;
  write_matrix_market(mm, A);
  CHECK(mm.str() ==
        "%%MatrixMarket matrix coordinate real general\n"
        "3 3 4\n1 1 -3\n1 2 3\n2 2 -0.5\n2 3 0.5\n");
}

TEST_CASE("birth-death generator entries") {
  const auto snet = slack_of("birth_death.net", {{1}}, 3);
  const auto space = enumerate_states(snet);
  const auto A = build_generator(space, snet);
  REQUIRE(A.dim() == 4);
  CHECK(A.rate(0, 1) == doctest::Approx(1.0));
  CHECK(A.rate(1, 0) == doctest::Approx(2.0));
  CHECK(A.rate(3, 2) == doctest::Approx(6.0));
  CHECK(A.diagonal(3) == doctest::Approx(-6.0));
  CHECK(A.rate(3, 0) == 0.0);
}

TEST_CASE("finite buffer creates an absorbing state, slack does not") {
  const auto net = test::load_model("example1.net");
  ConservationSpec s{{{2, 1}}, {40}, {2}};
  const State x0{0, 0}, corner{0, 40}, target{10, 10};

  const auto buffer = build_finite_buffer(net, s, x0);
  const auto corner_i = buffer.index(corner);
  bool found = false;
  for (const auto& cls : communication_classes(buffer.A))
    if (cls.absorbing() && cls.states.front() == corner_i) found = true;
  CHECK(found);
  CHECK_FALSE(accessibility(buffer.A, corner_i, {buffer.index(target)}));
  CHECK(accessibility(buffer.A, buffer.index(x0), {corner_i}));

  const auto slack = build_slack_chain(build_regular_slack(net, s), x0);
  const auto seen = reachable_from(slack.A, slack.index(x0));
  std::size_t closed = 0;
  for (const auto& cls : communication_classes(slack.A))
    if (seen[cls.states.front()] && cls.closed) ++closed;
  CHECK(closed == 1);
  CHECK_FALSE(seen[slack.index(corner)]);
  CHECK(accessibility(*slack.space, slack.A, x0,
                      [](std::span<const int> x) { return x[0] == 10 && x[1] == 10; }));
}

TEST_CASE("reachability helpers") {
  // 0 -> 1 -> 2, 3 -> 2, 2 absorbing.
  const auto A = Generator::from_triplets(4, {{0, 1, 1.0}, {1, 2, 1.0}, {3, 2, 1.0}});
  const auto from0 = reachable_from(A, 0);
  CHECK(from0 == std::vector<bool>{true, true, true, false});
  const auto stopped = reachable_from(A, 0, {false, true, false, false});
  CHECK(stopped == std::vector<bool>{true, true, false, false});
  CHECK(can_reach(A, {false, false, true, false}) == std::vector<bool>{true, true, true, true});
  const auto classes = communication_classes(A);
  CHECK(classes.size() == 4);
  CHECK(std::count_if(classes.begin(), classes.end(), [](const auto& c) { return c.closed; }) == 1);
  CHECK_THROWS_AS(accessibility(A, 0, {}), StateSpaceError);
}
