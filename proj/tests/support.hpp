#pragma once

#include "ergm_varest/graph.hpp"
#include "ergm_varest/model.hpp"
#include "ergm_varest/rng.hpp"

#include <Eigen/Dense>

#include <numeric>
#include <vector>

namespace testing_support {

inline ergm::Graph random_graph(int n, double p, ergm::Rng &rng) {
  ergm::Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p))
        g.set_edge(i, j, true);
  return g;
}

inline Eigen::MatrixXd random_symmetric(int n, double scale, ergm::Rng &rng) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = scale * (2.0 * rng.uniform() - 1.0);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

inline std::vector<int> random_permutation(int n, ergm::Rng &rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(p[i], p[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  return p;
}

inline ergm::ModelParams full_params(Eigen::MatrixXd alpha, double beta) {
  return ergm::ModelParams{ergm::FullAlpha{std::move(alpha)}, beta};
}

inline double beta_zero_closed_form(const Eigen::MatrixXd &alpha) {
  const int n = static_cast<int>(alpha.rows());
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      s += std::log1p(std::exp(2.0 * alpha(i, j)));
  return s / (static_cast<double>(n) * n);
}

} // namespace testing_support
