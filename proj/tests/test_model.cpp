#include "ergm_varest/errors.hpp"
#include "ergm_varest/model.hpp"
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

Graph triangle() {
  const std::pair<int, int> e[] = {{0, 1}, {1, 2}, {0, 2}};
  return Graph::from_edges(3, e);
}

} // namespace

TEST_CASE("graph rejects self-loops and bad indices") {
  Graph g(3);
  CHECK_THROWS_AS(g.set_edge(1, 1, true), InvalidInput);
  CHECK_THROWS_AS(g.set_edge(0, 3, true), InvalidInput);
  CHECK_THROWS_AS(Graph(0), InvalidInput);
  CHECK(g.set_edge(0, 2, true));
  CHECK_FALSE(g.set_edge(2, 0, true));
  CHECK(g.has_edge(2, 0));
  CHECK(g.degree(0) == 1);
  CHECK(g.edge_count() == 1);
}

TEST_CASE("potential: hand-evaluated values") {
  CHECK(potential(Graph(4), NodeTypes::uniform(4), constant_alpha(4, 0.7, 2.0)) == 0.0);

  Graph g2(2);
  g2.set_edge(0, 1, true);
  CHECK(potential(g2, {}, constant_alpha(2, 0.5, 1.0)) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(potential(triangle(), {}, constant_alpha(3, 0.0, 3.0)) == doctest::Approx(6.0));
}

TEST_CASE("potential_difference: closed form") {
  CHECK(potential_difference(Graph(3), 1, 2, {}, constant_alpha(3, 0.0, 3.0)) ==
        doctest::Approx(1.0));
  CHECK(potential_difference(Graph(2), 0, 1, {}, constant_alpha(2, 0.5, 1.0)) ==
        doctest::Approx(1.5));
  CHECK_THROWS_AS(potential_difference(Graph(3), 1, 1, {}, constant_alpha(3, 0.0, 1.0)),
                  InvalidInput);

  Rng rng(11);
  const Graph g = random_graph(7, 0.4, rng);
  const auto a = random_symmetric(7, 2.0, rng);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      if (i != j)
        CHECK(potential_difference(g, i, j, {}, full_params(a, 0.0)) ==
              doctest::Approx(2.0 * a(i, j)).epsilon(1e-14));
}

TEST_CASE("potential_difference agrees with two potential evaluations") {
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(8));
    Graph g = random_graph(n, rng.uniform(), rng);
    const auto params = full_params(random_symmetric(n, 3.0, rng), 6.0 * rng.uniform() - 3.0);
    const int i = static_cast<int>(rng.below(n));
    int j = static_cast<int>(rng.below(n - 1));
    if (j >= i)
      ++j;
    const double closed = potential_difference(g, i, j, {}, params);
    g.set_edge(i, j, true);
    const double on = potential(g, {}, params);
    g.set_edge(i, j, false);
    const double off = potential(g, {}, params);
    worst = std::max(worst, std::abs(closed - (on - off)));
  }
  CHECK(worst <= 1e-12);
}

// Utilities count the degenerate k = i two-path g_ij g_ji, so a link's joint
// utility gain exceeds the potential difference by exactly beta / n.
TEST_CASE("utility: values and the potential property") {
  CHECK(utility(Graph(3), 0, {}, constant_alpha(3, 1.0, 1.0)) == 0.0);
  Graph g2(2);
  g2.set_edge(0, 1, true);
  CHECK(utility(g2, 0, {}, constant_alpha(2, 0.5, 1.0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(utility(g2, 2, {}, constant_alpha(2, 0.5, 1.0)), InvalidInput);

  Rng rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    Graph g = random_graph(n, rng.uniform(), rng);
    const auto params = full_params(random_symmetric(n, 2.0, rng), 4.0 * rng.uniform() - 2.0);
    const int i = static_cast<int>(rng.below(n));
    int j = static_cast<int>(rng.below(n - 1));
    if (j >= i)
      ++j;
    g.set_edge(i, j, true);
    const double with = utility(g, i, {}, params) + utility(g, j, {}, params);
    const double closed = potential_difference(g, i, j, {}, params);
    g.set_edge(i, j, false);
    const double without = utility(g, i, {}, params) + utility(g, j, {}, params);
    worst = std::max(worst, std::abs(with - without - closed - params.beta / n));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("sufficient statistics") {
  const SufficientStats empty = sufficient_stats(Graph(4), NodeTypes::uniform(4));
  CHECK(empty.edges == 0);
  CHECK(empty.match_edges == 0);
  CHECK(empty.twostar_sum == 0);

  const auto t = sufficient_stats(triangle(), NodeTypes::uniform(3));
  CHECK(t.edges == 3);
  CHECK(t.match_edges == 3);
  CHECK(t.twostar_sum == 12);

  const std::pair<int, int> path[] = {{0, 1}, {1, 2}};
  const auto p = sufficient_stats(Graph::from_edges(3, path), NodeTypes({0, 0, 1}));
  CHECK(p.edges == 2);
  CHECK(p.match_edges == 1);
  CHECK(p.twostar_sum == 6);

  CHECK_THROWS_AS(sufficient_stats(triangle(), NodeTypes({0, 1})), InvalidInput);
}

TEST_CASE("parametric potential is linear in the sufficient statistics") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(20));
    const Graph g = random_graph(n, rng.uniform(), rng);
    std::vector<int> labels(n);
    for (auto &l : labels)
      l = static_cast<int>(rng.below(3));
    const NodeTypes types(labels);
    const double e = 4 * rng.uniform() - 2, m = 4 * rng.uniform() - 2, b = 4 * rng.uniform() - 2;
    const auto s = sufficient_stats(g, types);
    const double linear = 2 * e * s.edges + 2 * m * s.match_edges + b / (2.0 * n) * s.twostar_sum;
    CHECK(potential(g, types, parametric_params(e, m, b)) ==
          doctest::Approx(linear).epsilon(1e-12));
  }
}

TEST_CASE("potential is invariant under consistent relabeling") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const Graph g = random_graph(n, 0.5, rng);
    const auto a = random_symmetric(n, 2.0, rng);
    const auto perm = random_permutation(n, rng);
    Graph pg(n);
    Eigen::MatrixXd pa = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        pa(perm[i], perm[j]) = a(i, j);
        if (i < j && g.has_edge(i, j))
          pg.set_edge(perm[i], perm[j], true);
      }
    CHECK(potential(g, {}, full_params(a, 1.3)) ==
          doctest::Approx(potential(pg, {}, full_params(pa, 1.3))).epsilon(1e-13));
  }
}

TEST_CASE("exact_psi: enumeration oracle") {
  CHECK(exact_psi(2, {}, constant_alpha(2, 0.0, 0.0)) == doctest::Approx(std::log(2.0) / 4));
  CHECK(exact_psi(3, {}, constant_alpha(3, 0.0, 0.0)) == doctest::Approx(std::log(2.0) / 3));
  CHECK(exact_psi(2, {}, constant_alpha(2, 0.5, 1.0)) ==
        doctest::Approx(0.25 * std::log1p(std::exp(1.5))).epsilon(1e-14));
  CHECK_THROWS_AS(exact_psi(7, NodeTypes::uniform(7), parametric_params(0, 0, 0)), ResourceLimit);
}

TEST_CASE("exact_psi factorizes at beta = 0") {
  Rng rng(3);
  for (int n = 1; n <= 6; ++n) {
    const auto a = random_symmetric(n, 2.0, rng);
    CHECK(exact_psi(n, {}, full_params(a, 0.0)) ==
          doctest::Approx(beta_zero_closed_form(a)).epsilon(1e-12));
  }
}

TEST_CASE("alpha specifications resolve and validate") {
  const auto types = NodeTypes::balanced(4);
  const auto a = resolve_alpha(ParametricAlpha{-2.0, 1.0}, types, 4);
  CHECK(a(0, 1) == -1.0);
  CHECK(a(0, 3) == -2.0);
  CHECK(a(2, 2) == 0.0);
  CHECK_THROWS_AS(resolve_alpha(ParametricAlpha{-2.0, 1.0}, NodeTypes::balanced(3), 4),
                  InvalidInput);

  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(resolve_alpha(FullAlpha{asym}, {}, 2), InvalidInput);

  BlockAlpha block{{0.0, 0.5, 1.0}, Eigen::MatrixXd(2, 2)};
  block.values << 1, -1, -1, 2;
  const auto b = resolve_alpha(block, {}, 4);
  CHECK(b(0, 1) == 1.0);
  CHECK(b(0, 2) == -1.0);
  CHECK(b(2, 3) == 2.0);
  block.boundaries = {0.0, 0.7, 0.6};
  CHECK_THROWS_AS(validate(AlphaSpec{block}), InvalidInput);
  CHECK_THROWS_AS((ResolvedModel(ModelParams{ParametricAlpha{0, 0}, NAN}, types, 4)),
                  InvalidInput);
}

TEST_CASE("graph codes round-trip") {
  for (unsigned long long code = 0; code < 64; ++code)
    CHECK(graph_code(graph_from_code(4, code)) == code);
}
