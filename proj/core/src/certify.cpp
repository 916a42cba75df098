#include "slackcme/certify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "slackcme/exact.hpp"

namespace slackcme {

double complex_balance_residual(const ReactionNetwork& net, const std::vector<double>& c) {
  if (c.size() != net.species_count()) throw Error("concentration vector has wrong length");
  std::vector<double> balance(net.complex_count(), 0.0);
  for (const auto& rx : net.reactions()) {
    double flux = rx.rate_constant;
    const auto& alpha = net.complexes()[rx.reactant].stoich;
    for (std::size_t j = 0; j < alpha.size(); ++j) flux *= std::pow(c[j], alpha[j]);
    balance[rx.reactant] -= flux;
    balance[rx.product] += flux;
  }
  double worst = 0.0;
  for (double b : balance) worst = std::max(worst, std::abs(b));
  return worst;
}

ComplexBalanceResult find_complex_balance(const ReactionNetwork& net,
                                          const ComplexBalanceOptions& options) {
  ComplexBalanceResult out;
  const bool wr = weak_reversibility(net).is_weakly_reversible;
  out.deficiency_zero_weakly_reversible = wr && deficiency(net) == 0;
  if (!wr) {
    out.status = ComplexBalanceStatus::NotComplexBalanced;
    out.message = "not weakly reversible, so no complex-balanced steady state exists";
    return out;
  }

  const auto d = static_cast<Eigen::Index>(net.species_count());
  const auto R = static_cast<Eigen::Index>(net.reaction_count());
  const auto Gamma = build_matrices(net).Gamma;
  const auto laws = conservation_laws(net);
  const auto k = static_cast<Eigen::Index>(laws.size());

  Eigen::MatrixXd G(d, R), A(R, d), L(k, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index r = 0; r < R; ++r)
      G(i, r) = Gamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
  for (Eigen::Index r = 0; r < R; ++r)
    for (Eigen::Index j = 0; j < d; ++j)
      A(r, j) = net.reactant(static_cast<std::size_t>(r)).stoich[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      L(i, j) = laws[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::VectorXd kappa(R);
  for (Eigen::Index r = 0; r < R; ++r) kappa[r] = net.reaction(static_cast<std::size_t>(r)).rate_constant;
  const Eigen::VectorXd totals = L * Eigen::VectorXd::Ones(d);

  auto residual = [&](const Eigen::VectorXd& z, Eigen::VectorXd* v_out) {
    const Eigen::VectorXd v = (kappa.array() * (A * z).array().exp()).matrix();
    Eigen::VectorXd F(d + k);
    F.head(d) = G * v;
    F.tail(k) = L * z.array().exp().matrix() - totals;
    if (v_out) *v_out = v;
    return F;
  };

  Eigen::VectorXd z = Eigen::VectorXd::Zero(d), v;
  Eigen::VectorXd F = residual(z, &v);
  // Keep stepping while the residual still drops; the looser test after the
  // loop decides whether the final iterate counts as a steady state.
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    if (F.lpNorm<Eigen::Infinity>() <= 4e-16 * scale) {
      converged = true;
      break;
    }
    Eigen::MatrixXd J(d + k, d);
    J.topRows(d) = G * v.asDiagonal() * A;
    J.bottomRows(k) = L * z.array().exp().matrix().asDiagonal();
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(-F);
    const double f0 = F.norm();
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-12) {
      Eigen::VectorXd trial = (z + t * step).cwiseMax(-700.0).cwiseMin(700.0);
      Eigen::VectorXd vt;
      Eigen::VectorXd Ft = residual(trial, &vt);
      if (Ft.allFinite() && Ft.norm() < (1.0 - 1e-4 * t) * f0) {
        z = trial;
        F = Ft;
        v = vt;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  if (!converged) {
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    converged = F.lpNorm<Eigen::Infinity>() <= 1e-10 * scale;
  }
  if (!converged) {
    out.status = ComplexBalanceStatus::NoConvergence;
    out.message = "Newton iteration did not reach a positive steady state";
    return out;
  }

  ComplexBalanceCertificate cert;
  cert.c_star.resize(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) cert.c_star[static_cast<std::size_t>(j)] = std::exp(z[j]);
  cert.residual = complex_balance_residual(net, cert.c_star);
  if (cert.residual < options.tolerance) {
    out.status = ComplexBalanceStatus::Certified;
    out.message = "complex balanced";
    out.certificate = std::move(cert);
  } else {
    out.status = ComplexBalanceStatus::NotComplexBalanced;
    std::ostringstream msg;
    msg << "steady state found but complex-balance residual is " << cert.residual;
    out.message = msg.str();
  }
  return out;
}

Distribution product_form_stationary(std::shared_ptr<const StateSpace> space,
                                     const std::vector<double>& c_star) {
  if (c_star.size() != space->dim()) throw Error("c* has wrong length");
  std::vector<double> logw(space->size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < space->size(); ++i) {
    const auto x = space->state(i);
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == 0) continue;
      s += x[j] * std::log(c_star[j]) - std::lgamma(x[j] + 1.0);
    }
    logw[i] = s;
    top = std::max(top, s);
  }
  Distribution out{std::move(space), {}};
  out.p.resize(logw.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) total += out.p[i] = std::exp(logw[i] - top);
  for (double& v : out.p) v /= total;
  return out;
}

Distribution product_form_stationary(const SlackNetwork& snet, const std::vector<double>& c_star,
                                     int N, const std::optional<State>& x0) {
  auto space = std::make_shared<const StateSpace>(enumerate_states(snet.with_bound(N), x0));
  return product_form_stationary(std::move(space), c_star);
}

namespace {

constexpr double kSignMargin = 1e-12;

struct Expansion {
  double c0 = 0.0;
  std::vector<double> a;                 // per weighted species
  std::vector<std::vector<double>> b;    // b[j][k], j <= k
};

// sup of a x + b x (x - 1) over integers x >= lo.
double sup_from(double a, double b, long long lo) {
  auto f = [&](long double x) { return static_cast<double>(a * x + b * x * (x - 1)); };
  if (b > 0.0 || (b == 0.0 && a > 0.0)) return std::numeric_limits<double>::infinity();
  if (b == 0.0) return f(static_cast<long double>(lo));
  const double vertex = (b - a) / (2.0 * b);
  double best = f(static_cast<long double>(lo));
  for (double cand : {std::floor(vertex), std::ceil(vertex)})
    if (cand > static_cast<double>(lo)) best = std::max(best, f(cand));
  return best;
}

std::string term_name(const std::vector<std::string>& names, std::size_t j, std::size_t k) {
  if (j == k) return names[j] + "*(" + names[j] + "-1)";
  return names[j] + "*" + names[k];
}

}  // namespace

LyapunovResult lyapunov_certificate(const ReactionNetwork& net, const std::vector<int>& w,
                                    const std::optional<State>& x0) {
  const std::size_t d = net.species_count();
  if (w.size() != d) throw Error("weight vector has wrong length");
  LyapunovResult out;
  auto inconclusive = [&](std::string why) {
    out.message = "inconclusive: " + std::move(why);
    return out;
  };
  if (std::any_of(w.begin(), w.end(), [](int v) { return v < 0; }))
    return inconclusive("w must be non-negative for V to increase across truncation shells");
  if (std::all_of(w.begin(), w.end(), [](int v) { return v == 0; }))
    return inconclusive("w is the zero vector");
  for (std::size_t r = 0; r < net.reaction_count(); ++r)
    if (net.reactant(r).order() > 2)
      return inconclusive("reaction " + std::to_string(r) + " has an intensity of degree " +
                          std::to_string(net.reactant(r).order()) + " > 2");

  std::vector<std::size_t> weighted;
  std::vector<bool> covered(d, false);
  std::vector<std::size_t> slot(d, 0);
  for (std::size_t j = 0; j < d; ++j)
    if (w[j] > 0) {
      slot[j] = weighted.size();
      weighted.push_back(j);
      covered[j] = true;
    }
  const std::size_t u = weighted.size();

  // Configurations of the unweighted species.
  std::vector<State> configs;
  {
    IntrinsicConstraints ic;
    try {
      ic = intrinsic_constraints(net, covered, x0);
    } catch (const StateSpaceError& e) {
      return inconclusive(e.what());
    }
    std::vector<int> upper(d, 0);
    for (std::size_t j = 0; j < d; ++j)
      if (!covered[j]) upper[j] = ic.upper[j];
    auto accept = [&](std::span<const int> x) {
      for (const auto& [law, total] : ic.laws) {
        bool only_unweighted = true;
        long long s = 0;
        for (std::size_t j = 0; j < d; ++j) {
          if (law[j] != 0 && covered[j]) only_unweighted = false;
          s += static_cast<long long>(law[j]) * x[j];
        }
        if (only_unweighted && s != total) return false;
      }
      return true;
    };
    const auto space = enumerate_box(upper, accept, [](std::span<const int>) { return 0LL; });
    for (std::size_t i = 0; i < space.size(); ++i) configs.push_back(space.at(i));
  }

  std::vector<double> jump(net.reaction_count());
  for (std::size_t r = 0; r < net.reaction_count(); ++r) {
    const auto delta = net.reaction_vector(r);
    long long s = 0;
    for (std::size_t j = 0; j < d; ++j) s += static_cast<long long>(w[j]) * delta[j];
    jump[r] = std::expm1(static_cast<double>(s));
  }

  auto expand = [&](const State& g) {
    Expansion e;
    e.a.assign(u, 0.0);
    e.b.assign(u, std::vector<double>(u, 0.0));
    for (std::size_t r = 0; r < net.reaction_count(); ++r) {
      const auto& alpha = net.reactant(r).stoich;
      double f = net.reaction(r).rate_constant * jump[r];
      std::vector<std::size_t> vars;
      for (std::size_t j = 0; j < d; ++j) {
        if (alpha[j] == 0) continue;
        if (covered[j]) {
          for (int m = 0; m < alpha[j]; ++m) vars.push_back(slot[j]);
        } else {
          f *= falling_factorial(g[j], alpha[j]);
        }
      }
      if (f == 0.0) continue;
      if (vars.empty()) e.c0 += f;
      else if (vars.size() == 1) e.a[vars[0]] += f;
      else e.b[std::min(vars[0], vars[1])][std::max(vars[0], vars[1])] += f;
    }
    return e;
  };

  std::vector<std::string> names;
  for (std::size_t j : weighted) names.push_back(net.species()[j].name);

  std::vector<Expansion> expansions;
  for (const auto& g : configs) expansions.push_back(expand(g));
  {
    const auto& e = expansions.front();
    out.coefficients.push_back({"1", e.c0});
    for (std::size_t j = 0; j < u; ++j) out.coefficients.push_back({names[j], e.a[j]});
    for (std::size_t j = 0; j < u; ++j)
      for (std::size_t k = j; k < u; ++k)
        if (e.b[j][k] != 0.0) out.coefficients.push_back({term_name(names, j, k), e.b[j][k]});
    for (std::size_t j = 0; j < u; ++j) {
      if (e.b[j][j] != 0.0) out.leading.push_back({term_name(names, j, j), e.b[j][j]});
      else if (e.a[j] != 0.0) out.leading.push_back({names[j], e.a[j]});
      else out.leading.push_back({"1", e.c0});
    }
  }

  // Sign conditions for every configuration.
  for (std::size_t ci = 0; ci < expansions.size(); ++ci) {
    const auto& e = expansions[ci];
    for (std::size_t j = 0; j < u; ++j)
      for (std::size_t k = j + 1; k < u; ++k)
        if (e.b[j][k] > kSignMargin) {
          std::ostringstream msg;
          msg << "positive mixed coefficient " << term_name(names, j, k) << " = " << e.b[j][k];
          return inconclusive(msg.str());
        }
    for (std::size_t j = 0; j < u; ++j) {
      double lead = e.c0;
      std::string term = "1";
      if (e.b[j][j] != 0.0) {
        lead = e.b[j][j];
        term = term_name(names, j, j);
      } else if (e.a[j] != 0.0) {
        lead = e.a[j];
        term = names[j];
      }
      if (!(lead < -kSignMargin)) {
        std::ostringstream msg;
        msg << "non-negative leading coefficient along " << names[j] << ": " << term << " has "
            << lead;
        return inconclusive(msg.str());
      }
    }
  }

  // Upper bound of Q outside the box, along direction j, for one configuration.
  auto outside_bound = [&](const Expansion& e, std::size_t j, int M) {
    double K = e.c0;
    for (std::size_t k = 0; k < u; ++k)
      if (k != j) K += sup_from(e.a[k], e.b[k][k], 0);
    return std::pair{K, sup_from(e.a[j], e.b[j][j], static_cast<long long>(M) + 1)};
  };
  auto dominated = [&](int M) {
    for (const auto& e : expansions)
      for (std::size_t j = 0; j < u; ++j) {
        const auto [K, tail] = outside_bound(e, j, M);
        if (!(K + tail < 0.0)) return false;
        if (K > 0.0 && tail > -1.1 * K) return false;
      }
    return true;
  };

  constexpr int kMaxBox = 1000;
  int lo = 1, hi = kMaxBox;
  if (!dominated(hi)) return inconclusive("no box size up to 1000 makes the drift negative outside it");
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (dominated(mid)) hi = mid;
    else lo = mid + 1;
  }

  auto direct_q = [&](const State& x) {
    long double q = 0.0L;
    for (std::size_t r = 0; r < net.reaction_count(); ++r) {
      const double lambda = intensity(net, r, x);
      if (lambda != 0.0) q += static_cast<long double>(lambda) * jump[r];
    }
    return q;
  };

  for (int M = lo; M <= kMaxBox; M *= 2) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& e : expansions)
      for (std::size_t j = 0; j < u; ++j) {
        const auto [K, tail] = outside_bound(e, j, M);
        worst = std::max(worst, K + tail);
      }
    const double C = -worst;

    double count = static_cast<double>(configs.size());
    for (std::size_t j = 0; j < u; ++j) count *= 2.0 * M + 1.0;
    if (count > 2e7) return inconclusive("box of size " + std::to_string(M) + " is too large to check");

    // Box: the tightest D. Shell M < max x_j <= 2M: the analytic bound, recomputed directly.
    long double D = -std::numeric_limits<long double>::infinity();
    bool shell_ok = true;
    State x(d);
    std::vector<int> idx(u, 0);
    for (const auto& g : configs) {
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        x = g;
        int top = 0;
        long long wx = 0;
        for (std::size_t k = 0; k < u; ++k) {
          x[weighted[k]] = idx[k];
          top = std::max(top, idx[k]);
        }
        for (std::size_t j = 0; j < d; ++j) wx += static_cast<long long>(w[j]) * x[j];
        const long double q = direct_q(x);
        if (top <= M) {
          D = std::max(D, std::exp(static_cast<long double>(wx)) * (q + C));
        } else if (q > -static_cast<long double>(C) + 1e-9L * (1.0L + std::abs(q))) {
          shell_ok = false;
        }
        std::size_t k = 0;
        while (k < u && ++idx[k] > 2 * M) idx[k++] = 0;
        if (k == u) break;
      }
    }
    if (!shell_ok) continue;
    LyapunovCertificate cert;
    cert.w = w;
    cert.C = C;
    cert.M = M;
    cert.D = static_cast<double>(std::max(D, static_cast<long double>(std::numeric_limits<double>::min())));
    if (!std::isfinite(cert.D)) return inconclusive("offset D overflows double precision");
    out.certificate = cert;
    std::ostringstream msg;
    msg << "certified with C = " << C << ", D = " << cert.D << ", M = " << M;
    out.message = msg.str();
    return out;
  }
  return inconclusive("direct drift check failed on every box up to 1000");
}

}  // namespace slackcme
