#include "ergm_varest/errors.hpp"
#include "ergm_varest/estimation.hpp"
#include "ergm_varest/numerics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace ergm;
using namespace testing_support;

namespace {

/// Independent-links data: within-type pairs on with p_same, others with p_diff.
Graph two_rate_graph(const NodeTypes &types, double p_same, double p_diff, Rng &rng) {
  const int n = types.size();
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(types.same(i, j) ? p_same : p_diff))
        g.set_edge(i, j, true);
  return g;
}

struct PairCounts {
  double same_on = 0, same_all = 0, diff_on = 0, diff_all = 0;
};

PairCounts count_pairs(const Graph &g, const NodeTypes &types) {
  PairCounts c;
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j) {
      if (types.same(i, j)) {
        c.same_all += 1;
        c.same_on += g.has_edge(i, j);
      } else {
        c.diff_all += 1;
        c.diff_on += g.has_edge(i, j);
      }
    }
  return c;
}

/// Logit MLE with beta held at 0: alpha_ij is half the log-odds of each pair class.
Theta logit_closed_form(const PairCounts &c) {
  const double e = 0.5 * logit(c.diff_on / c.diff_all);
  const double m = 0.5 * logit(c.same_on / c.same_all) - e;
  return {e, m, 0.0};
}

/// Inverse pseudo-likelihood information at theta.
Eigen::Matrix3d pseudo_covariance(const Graph &g, const NodeTypes &types, const Theta &theta) {
  Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j) {
      const Eigen::Vector3d x = change_stat(g, types, i, j);
      const double mu = logistic(theta.dot(x));
      info += mu * (1 - mu) * x * x.transpose();
    }
  return info.inverse();
}

double pseudo_loglik(const Graph &g, const NodeTypes &types, const Theta &theta) {
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j) {
      const double eta = theta.dot(change_stat(g, types, i, j));
      s += (g.has_edge(i, j) ? eta : 0.0) - log1p_exp(eta);
    }
  return s;
}

} // namespace

TEST_CASE("change statistic linearizes the potential difference") {
  Rng rng(2024);
  for (int draw = 0; draw < 1000; ++draw) {
    const int n = 2 + static_cast<int>(rng.below(12));
    const auto types = NodeTypes(std::vector<int>(n));
    NodeTypes mixed = types;
    for (auto &l : mixed.labels)
      l = static_cast<int>(rng.below(3));
    const Graph g = random_graph(n, rng.uniform(), rng);
    const Theta theta(4 * rng.uniform() - 2, 4 * rng.uniform() - 2, 10 * rng.uniform() - 5);
    const int i = static_cast<int>(rng.below(n));
    int j = static_cast<int>(rng.below(n - 1));
    j += j >= i;
    const double lhs = theta.dot(change_stat(g, mixed, i, j));
    const double rhs = potential_difference(g, i, j, mixed, parametric_params(theta));
    REQUIRE(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(rhs)));
  }
}

TEST_CASE("potential is linear in the sufficient statistics") {
  Rng rng(5);
  for (int draw = 0; draw < 200; ++draw) {
    const int n = 3 + static_cast<int>(rng.below(15));
    const auto types = NodeTypes::balanced(n);
    const Graph g = random_graph(n, rng.uniform(), rng);
    const Theta theta(rng.uniform() - 0.5, rng.uniform(), 6 * rng.uniform() - 3);
    const double q = potential(g, types, parametric_params(theta));
    REQUIRE(theta.dot(potential_stats(g, types)) == doctest::Approx(q).epsilon(1e-12));
  }
}

TEST_CASE("method names") {
  CHECK(parse_method("MPLE") == Method::kMPLE);
  CHECK(parse_method("mfmle") == Method::kMFMLE);
  CHECK(parse_method("McMle") == Method::kMCMLE);
  CHECK_THROWS_AS(parse_method("mle"), InvalidInput);
  CHECK(std::string(to_string(Method::kMFMLE)) == "MFMLE");
}

TEST_CASE("mple degenerate inputs") {
  const auto types = NodeTypes::balanced(8);
  CHECK_THROWS_AS(mple(Graph(8), types), SeparationError);
  CHECK_THROWS_AS(mple(Graph::complete(8), types), SeparationError);
  CHECK_THROWS_AS(mple(Graph(8), NodeTypes::balanced(7)), InvalidInput);
}

TEST_CASE("mple maximizes the pseudo-likelihood") {
  Rng rng(11);
  const int n = 40;
  const auto types = NodeTypes::balanced(n);
  const Graph g = two_rate_graph(types, 0.3, 0.1, rng);
  const auto r = mple(g, types);
  REQUIRE(r.converged);
  CHECK(r.objective == doctest::Approx(pseudo_loglik(g, types, r.theta_hat)).epsilon(1e-12));
  for (int k = 0; k < 3; ++k)
    for (double h : {1e-3, -1e-3}) {
      Theta t = r.theta_hat;
      t[k] += h;
      CHECK(pseudo_loglik(g, types, t) < r.objective);
    }
}

TEST_CASE("mple on beta = 0 data is consistent for the logit coefficients") {
  Rng rng(77);
  const int n = 200;
  const auto types = NodeTypes::balanced(n);
  const Theta truth(-1.0, 0.5, 0.0);
  const Graph g = two_rate_graph(types, logistic(2 * (truth[0] + truth[1])),
                                 logistic(2 * truth[0]), rng);
  const auto r = mple(g, types);
  REQUIRE(r.converged);
  const Eigen::Matrix3d cov = pseudo_covariance(g, types, r.theta_hat);
  for (int k = 0; k < 3; ++k)
    CHECK(std::abs(r.theta_hat[k] - truth[k]) < 3 * std::sqrt(cov(k, k)));
}

TEST_CASE("mple drops the match term for a single type") {
  Rng rng(3);
  const int n = 30;
  const auto types = NodeTypes::uniform(n);
  // Exactly half of the pairs, chosen uniformly.
  const int pairs = n * (n - 1) / 2;
  std::vector<int> order = random_permutation(pairs, rng);
  Graph g(n);
  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      all.emplace_back(i, j);
  for (int k = 0; k < pairs / 2; ++k)
    g.set_edge(all[order[k]].first, all[order[k]].second, true);

  const auto r = mple(g, types);
  REQUIRE(r.converged);
  CHECK(r.theta_hat[1] == 0.0);
  CHECK(r.diagnostics.at("match_dropped") == 1.0);

  // With beta held at 0 the pseudo-likelihood is the Bernoulli likelihood.
  const double p = static_cast<double>(g.edge_count()) / pairs;
  const Theta at_zero(0.5 * logit(p), 0.0, 0.0);
  const double bernoulli = g.edge_count() * std::log(p) + (pairs - g.edge_count()) * std::log1p(-p);
  CHECK(pseudo_loglik(g, types, at_zero) == doctest::Approx(bernoulli).epsilon(1e-12));
  CHECK(r.objective >= bernoulli - 1e-9);
}

TEST_CASE("mean-field likelihood at beta = 0 is the exact logit likelihood") {
  Rng rng(19);
  const int n = 24;
  const auto types = NodeTypes::balanced(n);
  const Graph g = two_rate_graph(types, 0.4, 0.15, rng);
  const PairCounts c = count_pairs(g, types);
  const Theta theta(-0.4, 0.3, 0.0);
  double exact = 0.0;
  for (auto [on, all, a] : {std::tuple{c.same_on, c.same_all, theta[0] + theta[1]},
                            std::tuple{c.diff_on, c.diff_all, theta[0]}})
    exact += 2 * a * on - all * log1p_exp(2 * a);
  CHECK(mf_log_likelihood(g, types, theta, {}) == doctest::Approx(exact).epsilon(1e-10));

  MfMleOptions o;
  o.fixed_beta = 0.0;
  o.inner.keep_trace = false;
  const auto r = mf_mle(g, types, o);
  REQUIRE(r.converged);
  const Theta oracle = logit_closed_form(c);
  CHECK(std::abs(r.theta_hat[0] - oracle[0]) < 1e-4);
  CHECK(std::abs(r.theta_hat[1] - oracle[1]) < 1e-4);
  CHECK(r.theta_hat[2] == 0.0);
}

TEST_CASE("mf_mle is deterministic and within its search box") {
  Rng rng(8);
  const int n = 16;
  const auto types = NodeTypes::balanced(n);
  const Graph g = two_rate_graph(types, 0.35, 0.1, rng);
  MfMleOptions o;
  o.inner.keep_trace = false;
  o.max_iterations = 300;
  const auto a = mf_mle(g, types, o);
  const auto b = mf_mle(g, types, o);
  for (int k = 0; k < 3; ++k) {
    CHECK(a.theta_hat[k] == b.theta_hat[k]);
    CHECK(std::abs(a.theta_hat[k]) <= o.bound);
  }
  CHECK(a.objective == b.objective);
  CHECK(a.diagnostics == b.diagnostics);
  CHECK(a.objective == doctest::Approx(mf_log_likelihood(g, types, a.theta_hat, o.inner)));
  // Never worse than where it started.
  const Theta start(a.diagnostics.at("start_edge"), a.diagnostics.at("start_match"),
                    a.diagnostics.at("start_beta"));
  CHECK(a.objective >= mf_log_likelihood(g, types, start, o.inner) - 1e-9);
}

TEST_CASE("importance likelihood") {
  Rng rng(6);
  std::vector<Eigen::Vector3d> draws;
  for (int s = 0; s < 50; ++s)
    draws.emplace_back(40 + 10 * rng.uniform(), 20 + 5 * rng.uniform(), 3 + rng.uniform());
  const Theta theta0(-1, 0.5, 1);
  const ImportanceLikelihood lik(Eigen::Vector3d(44, 22, 3.4), draws, theta0);
  CHECK(lik.value(theta0) == 0.0);
  CHECK(lik.effective_sample_size(theta0) == doctest::Approx(50.0).epsilon(1e-14));
  const Theta t(-0.9, 0.45, 1.3);
  const auto grad = lik.gradient(t);
  for (int k = 0; k < 3; ++k) {
    Theta up = t, down = t;
    up[k] += 1e-6;
    down[k] -= 1e-6;
    CHECK(grad[k] == doctest::Approx((lik.value(up) - lik.value(down)) / 2e-6).epsilon(1e-5));
  }
  CHECK(lik.effective_sample_size(t) <= 50.0);
  CHECK_THROWS_AS(ImportanceLikelihood(Eigen::Vector3d::Zero(), {}, theta0), InvalidInput);
}

TEST_CASE("mc_mle on beta = 0 data agrees with mple") {
  Rng rng(31);
  const int n = 30;
  const auto types = NodeTypes::balanced(n);
  const Graph g = two_rate_graph(types, logistic(-1.0), logistic(-3.0), rng);
  const auto m = mple(g, types);
  REQUIRE(m.converged);
  McMleOptions o;
  o.samples = 2000;
  o.chain.seed = 9;
  o.chain.burn_in = 50LL * n * n;
  o.chain.thin = 4LL * n * n;
  const auto r = mc_mle(g, types, m.theta_hat, o);
  CHECK(r.converged);
  CHECK(r.diagnostics.at("ess") >= 0.02 * o.samples);
  const Eigen::Matrix3d cov = pseudo_covariance(g, types, m.theta_hat);
  for (int k = 0; k < 2; ++k)
    CHECK(std::abs(r.theta_hat[k] - m.theta_hat[k]) < 3 * std::sqrt(cov(k, k)));
}

TEST_CASE("mc_mle input checks") {
  const auto types = NodeTypes::balanced(6);
  McMleOptions o;
  o.samples = 1;
  CHECK_THROWS_AS(mc_mle(Graph(6), types, Theta::Zero(), o), InvalidInput);
  o.samples = 10;
  CHECK_THROWS_AS(mc_mle(Graph(6), types, Theta(NAN, 0, 0), o), InvalidInput);
}
