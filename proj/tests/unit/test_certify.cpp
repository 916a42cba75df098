#include <doctest.h>

#include <cmath>

#include "slackcme/certify.hpp"
#include "slackcme/truncation.hpp"
#include "support.hpp"

using namespace slackcme;

TEST_CASE("complex balance of the immigration-death network") {
  const auto cb = find_complex_balance(test::load_model("immigration_death.net"));
  REQUIRE(cb.status == ComplexBalanceStatus::Certified);
  REQUIRE(cb.certificate);
  CHECK(cb.certificate->c_star[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cb.deficiency_zero_weakly_reversible);
}

TEST_CASE("complex balance of the example network") {
  // At 0: inflow a, outflow 2, so a = 2. At A: inflow 1 + b, outflow 2a,
  // so b = 3. B then balances as well (a + 1 = b).
  const auto net = test::load_model("example1.net");
  const auto cb = find_complex_balance(net);
  REQUIRE(cb.status == ComplexBalanceStatus::Certified);
  const auto& c = cb.certificate->c_star;
  CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(complex_balance_residual(net, c) < 1e-12);
  CHECK(complex_balance_residual(net, {2.0, 1.0}) > 0.5);
}

TEST_CASE("networks that cannot be complex balanced") {
  const auto pure = find_complex_balance(test::load_model("pure_birth.net"));
  CHECK(pure.status == ComplexBalanceStatus::NotComplexBalanced);
  CHECK_FALSE(pure.certificate);
  const auto lv = find_complex_balance(test::load_model("lotka_volterra.net"));
  CHECK(lv.status != ComplexBalanceStatus::Certified);
}

TEST_CASE("product form equals the stationary solve") {
  struct Case {
    const char* model;
    IntMatrix W;
    int N;
    State x0;
  };
  for (const auto& c : std::vector<Case>{{"immigration_death.net", {{1}}, 10, {0}},
                                         {"example1.net", {{1, 1}}, 12, {0, 0}},
                                         {"example1.net", {{2, 1}}, 15, {0, 0}}}) {
    CAPTURE(c.model);
    const auto net = test::load_model(c.model);
    const auto cb = find_complex_balance(net);
    REQUIRE(cb.certificate);
    ConservationSpec s{c.W, {c.N}, {}};
    const auto snet = build_regular_slack(net, s);
    // The balanced state extended by one for the slack species balances the
    // slack network too.
    std::vector<double> extended = cb.certificate->c_star;
    extended.push_back(1.0);
    CHECK(complex_balance_residual(snet.expanded(), extended) < 1e-10);

    const auto chain = build_slack_chain(snet, c.x0);
    const auto pf = product_form_stationary(snet, cb.certificate->c_star, c.N, c.x0);
    CHECK(pf.mass() == doctest::Approx(1.0));
    // Product form balances every state, closed class or not.
    std::vector<double> on_chain(chain.space->size());
    for (std::size_t i = 0; i < on_chain.size(); ++i) on_chain[i] = pf.at(chain.space->state(i));
    for (double r : chain.A.left_multiply(on_chain)) CHECK(std::abs(r) < 1e-12);

    // On the class the solver picks it agrees after renormalizing.
    const auto st = stationary(chain.A, chain.index(c.x0));
    double mass = 0.0;
    for (std::size_t i : st.support) mass += on_chain[i];
    double worst = 0.0;
    for (std::size_t i : st.support) worst = std::max(worst, std::abs(on_chain[i] / mass - st.pi[i]));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("Lyapunov certificate for Lotka-Volterra") {
  const auto net = test::load_model("lotka_volterra.net");
  const auto res = lyapunov_certificate(net, {1, 1});
  REQUIRE(res.certificate);
  CHECK(res.certificate->C > 0.0);
  CHECK(res.certificate->D > 0.0);
  CHECK(res.certificate->M > 0);
  REQUIRE(res.leading.size() == 2);
  // Species order is B, A. A + B -> 2B leaves w.x unchanged, so each
  // coefficient collects the first-order reactions of one species.
  const double e = std::exp(1.0);
  const double lead_b = 0.1 * (1.0 / e - 1.0);
  CHECK(res.leading[0].term == "B");
  CHECK(res.leading[0].value == doctest::Approx(lead_b).epsilon(1e-9));
  CHECK(res.leading[1].term == "A");
  CHECK(res.leading[1].value == doctest::Approx(0.6 * (1.0 / e - 1.0) + 0.2 * (e - 1.0)).epsilon(1e-9));
}

TEST_CASE("inconclusive Lyapunov cases") {
  const auto pure = lyapunov_certificate(test::load_model("pure_birth.net"), {1});
  CHECK_FALSE(pure.certificate);
  CHECK(pure.message.find("inconclusive") == 0);

  const auto lv = test::load_model("lotka_volterra.net");
  CHECK_FALSE(lyapunov_certificate(lv, {-1, 1}).certificate);
  CHECK_FALSE(lyapunov_certificate(lv, {0, 0}).certificate);

  const auto cubic = parse_network("3X -> 0 @ 1\n0 -> X @ 1\n");
  const auto third = lyapunov_certificate(cubic, {1});
  CHECK_FALSE(third.certificate);
  CHECK(third.message.find("degree") != std::string::npos);
}

TEST_CASE("Lyapunov certificate with bounded gene states") {
  const auto toggle = test::load_model("toggle.net");
  CHECK_FALSE(lyapunov_certificate(toggle, {1, 1, 0, 0, 0, 0}).certificate);
  const auto res = lyapunov_certificate(toggle, {1, 1, 0, 0, 0, 0}, State{0, 0, 1, 0, 1, 0});
  REQUIRE(res.certificate);
  CHECK(res.certificate->C > 0.0);
}
