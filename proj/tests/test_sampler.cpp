#include "ergm_varest/errors.hpp"
#include "ergm_varest/numerics.hpp"
#include "ergm_varest/sampler.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace ergm;
using namespace testing_support;

namespace {

ModelParams constant_alpha(int n, double a, double beta) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, a);
  m.diagonal().setZero();
  return full_params(m, beta);
}

WeightedMeeting random_weights(int n, Rng &rng) {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      rho(i, j) = rho(j, i) = 0.05 + rng.uniform();
  return WeightedMeeting{rho};
}

} // namespace

TEST_CASE("kernel validation and pair probabilities") {
  CHECK_THROWS_AS(PairSampler(UniformMeeting{}, 1), InvalidInput);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Ones(3, 3);
  rho(0, 1) = 0.0;
  CHECK_THROWS_AS(PairSampler(WeightedMeeting{rho}, 3), InvalidInput);
  rho(0, 1) = 2.0;
  CHECK_THROWS_AS(PairSampler(WeightedMeeting{rho}, 3), InvalidInput); // asymmetric
  rho(1, 0) = 2.0;
  const PairSampler weighted(WeightedMeeting{rho}, 3);
  CHECK(weighted.probability(0, 1) == doctest::Approx(0.5));
  CHECK(weighted.probability(2, 1) == doctest::Approx(0.25));
  const PairSampler uniform(UniformMeeting{}, 5);
  CHECK(uniform.probability(3, 4) == doctest::Approx(0.1));

  Rng rng(4);
  int hits = 0;
  for (int t = 0; t < 20000; ++t)
    hits += weighted.draw(rng) == std::pair{0, 1};
  CHECK(std::abs(hits / 20000.0 - 0.5) < 4 * std::sqrt(0.25 / 20000));
}

TEST_CASE("glauber step conditional probabilities") {
  SUBCASE("fair coin at alpha = 0, beta = 0") {
    Rng rng(1);
    int on = 0;
    Graph g(2);
    const auto p = constant_alpha(2, 0.0, 0.0);
    for (int t = 0; t < 40000; ++t) {
      g = glauber_step(g, UniformMeeting{}, {}, p, rng);
      on += g.has_edge(0, 1);
    }
    CHECK(std::abs(on / 40000.0 - 0.5) < 4 * std::sqrt(0.25 / 40000));
  }
  SUBCASE("saturated negative alpha never links") {
    Rng rng(2);
    const ResolvedModel model(constant_alpha(6, -50.0, 3.0), {}, 6);
    const PairSampler pairs(UniformMeeting{}, 6);
    Graph g = Graph::complete(6);
    for (int t = 0; t < 200000; ++t)
      glauber_step(g, pairs, model, rng);
    CHECK(g.edge_count() == 0);
    CHECK(1.0 - logistic(model.potential_difference(Graph::complete(6), 0, 1)) >= 1 - 1e-20);
  }
  SUBCASE("two-star incentive on the empty triangle") {
    const auto st = exact_stationary_distribution(3, UniformMeeting{}, {}, constant_alpha(3, 0, 3));
    // Pair (1,2) is bit 2 of the lexicographic code; it is met with prob 1/3.
    CHECK(st.transition(0, 4) == doctest::Approx(logistic(1.0) / 3).epsilon(1e-15));
    CHECK(logistic(1.0) == doctest::Approx(0.731059).epsilon(1e-6));
  }
}

TEST_CASE("chains are deterministic given the seed") {
  ChainConfig cfg;
  cfg.burn_in = 500;
  cfg.thin = 37;
  cfg.seed = 99;
  cfg.initial = InitialState::random(0.3);
  const auto types = NodeTypes::balanced(12);
  const auto p = parametric_params(-1.0, 0.5, 1.5);
  const auto a = sample_chain(cfg, UniformMeeting{}, types, p, 12, 20);
  const auto b = sample_chain(cfg, UniformMeeting{}, types, p, 12, 20);
  REQUIRE(a.samples.size() == 20);
  for (int s = 0; s < 20; ++s) {
    CHECK(a.samples[s] == b.samples[s]);
    CHECK(a.trace[s].step == 500 + 37 * s);
    CHECK(a.trace[s].edges == a.samples[s].edge_count());
    const auto stats = sufficient_stats(a.samples[s], types);
    CHECK(a.trace[s].match_edges == stats.match_edges);
    CHECK(a.trace[s].twostar_sum == stats.twostar_sum);
  }
  cfg.seed = 100;
  CHECK_FALSE(sample_chain(cfg, UniformMeeting{}, types, p, 12, 20).samples.back() ==
              a.samples.back());

  ChainConfig defaults;
  CHECK(defaults.burn_in_for(10) == 50000);
  CHECK(defaults.thin_for(10) == 10000);
  defaults.thin = 0;
  CHECK_THROWS_AS(defaults.thin_for(10), InvalidInput);
  CHECK_THROWS_AS(sample_chain(cfg, UniformMeeting{}, types, p, 12, 0), InvalidInput);
}

TEST_CASE("long chains match the stationary law") {
  SUBCASE("edge frequency at alpha = 0, beta = 0") {
    ChainConfig cfg;
    cfg.burn_in = 100;
    cfg.thin = 30;
    cfg.seed = 5;
    const auto run = sample_chain(cfg, UniformMeeting{}, {}, constant_alpha(3, 0, 0), 3, 20000);
    double edges = 0;
    for (const auto &row : run.trace)
      edges += row.edges;
    const double freq = edges / (3.0 * 20000);
    CHECK(std::abs(freq - 0.5) < 3 * std::sqrt(0.25 / (3.0 * 20000)));
  }
  SUBCASE("state frequencies at alpha = 0.5, beta = 1") {
    const auto params = constant_alpha(3, 0.5, 1.0);
    const auto exact = exact_stationary_distribution(3, UniformMeeting{}, {}, params);
    ChainConfig cfg;
    cfg.burn_in = 100;
    cfg.thin = 30;
    cfg.seed = 6;
    const int S = 40000;
    const auto run = sample_chain(cfg, UniformMeeting{}, {}, params, 3, S);
    std::vector<double> freq(8, 0.0);
    for (const auto &g : run.samples)
      freq[graph_code(g)] += 1.0 / S;
    for (int s = 0; s < 8; ++s) {
      const double p = exact.from_potential[s];
      CHECK(std::abs(freq[s] - p) < 3.5 * std::sqrt(p * (1 - p) / S));
    }
  }
}

TEST_CASE("exact stationary distribution") {
  const auto two = exact_stationary_distribution(2, UniformMeeting{}, {}, constant_alpha(2, 0, 0));
  CHECK(two.from_transition[0] == doctest::Approx(0.5));
  CHECK(two.from_transition[1] == doctest::Approx(0.5));
  CHECK(two.max_discrepancy <= 1e-12);
  const auto three = exact_stationary_distribution(3, UniformMeeting{}, {}, constant_alpha(3, 0, 0));
  for (double p : three.from_transition)
    CHECK(p == doctest::Approx(0.125).epsilon(1e-12));
  CHECK_THROWS_AS(exact_stationary_distribution(5, UniformMeeting{}, {}, constant_alpha(5, 0, 0)),
                  ResourceLimit);

  Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + static_cast<int>(t % 2);
    const auto params = full_params(random_symmetric(n, 2.0, rng), 6 * rng.uniform() - 3);
    const auto u = exact_stationary_distribution(n, UniformMeeting{}, {}, params);
    const auto w = exact_stationary_distribution(n, random_weights(n, rng), {}, params);
    CHECK(u.max_discrepancy <= 1e-10);
    CHECK(w.max_discrepancy <= 1e-10);
    double rho_gap = 0.0;
    for (std::size_t s = 0; s < u.from_transition.size(); ++s)
      rho_gap = std::max(rho_gap, std::abs(u.from_transition[s] - w.from_transition[s]));
    CHECK(rho_gap <= 1e-10);
    // Detailed balance for every pair of states one link apart.
    const int states = static_cast<int>(u.from_potential.size());
    double worst = 0.0;
    for (int a = 0; a < states; ++a)
      for (int bit = 0; (1 << bit) < states; ++bit) {
        const int b = a ^ (1 << bit);
        worst = std::max(worst, std::abs(u.from_potential[a] * w.transition(a, b) -
                                         u.from_potential[b] * w.transition(b, a)));
      }
    CHECK(worst <= 1e-12);
    for (int a = 0; a < states; ++a)
      CHECK(w.transition.row(a).sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}
