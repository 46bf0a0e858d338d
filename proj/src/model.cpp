#include "ergm_varest/model.hpp"

#include "ergm_varest/errors.hpp"
#include "ergm_varest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ergm {
namespace {

template <class... Ts> struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_symmetric_finite(const Eigen::MatrixXd &m, const char *what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw InvalidInput(std::string(what) + " must be a non-empty square matrix");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j)))
        throw InvalidInput(std::string(what) + " has a non-finite entry");
      if (m(i, j) != m(j, i))
        throw InvalidInput(std::string(what) + " is not symmetric");
    }
}

void check_types(const NodeTypes &types, int n, bool required) {
  if (types.size() == 0 && !required)
    return;
  if (types.size() != n)
    throw InvalidInput("node types have length " + std::to_string(types.size()) +
                       " but the network has n=" + std::to_string(n));
}

} // namespace

std::vector<double> BlockAlpha::widths() const {
  std::vector<double> w(boundaries.size() > 0 ? boundaries.size() - 1 : 0);
  for (std::size_t m = 0; m < w.size(); ++m)
    w[m] = boundaries[m + 1] - boundaries[m];
  return w;
}

int BlockAlpha::block_of(int k, int n) const {
  const double x = static_cast<double>(k + 1) / n;
  const int last = blocks() - 1;
  for (int m = 0; m < last; ++m)
    if (x <= boundaries[m + 1] + 1e-12)
      return m;
  return last;
}

ModelParams parametric_params(double edge, double match, double beta) {
  return ModelParams{ParametricAlpha{edge, match}, beta};
}

ModelParams parametric_params(const Theta &theta) {
  return parametric_params(theta[0], theta[1], theta[2]);
}

void validate(const AlphaSpec &alpha) {
  std::visit(Overloaded{
                 [](const FullAlpha &a) { check_symmetric_finite(a.values, "full alpha"); },
                 [](const ParametricAlpha &a) {
                   if (!std::isfinite(a.edge) || !std::isfinite(a.match))
                     throw InvalidInput("parametric alpha coefficients must be finite");
                 },
                 [](const BlockAlpha &a) {
                   check_symmetric_finite(a.values, "block alpha");
                   if (a.boundaries.size() != static_cast<std::size_t>(a.blocks()) + 1)
                     throw InvalidInput("block alpha needs M+1 boundaries for M blocks");
                   if (a.boundaries.front() != 0.0 || a.boundaries.back() != 1.0)
                     throw InvalidInput("block boundaries must start at 0 and end at 1");
                   for (std::size_t m = 1; m < a.boundaries.size(); ++m)
                     if (!(a.boundaries[m] > a.boundaries[m - 1]))
                       throw InvalidInput("block boundaries must be strictly increasing");
                 },
             },
             alpha);
}

double alpha_sup_norm(const AlphaSpec &alpha) {
  return std::visit(Overloaded{
                        [](const FullAlpha &a) {
                          // Diagonal entries never enter the model.
                          double sup = 0.0;
                          for (Eigen::Index i = 0; i < a.values.rows(); ++i)
                            for (Eigen::Index j = 0; j < a.values.cols(); ++j)
                              if (i != j)
                                sup = std::max(sup, std::abs(a.values(i, j)));
                          return sup;
                        },
                        [](const ParametricAlpha &a) {
                          return std::max(std::abs(a.edge), std::abs(a.edge + a.match));
                        },
                        [](const BlockAlpha &a) { return a.values.cwiseAbs().maxCoeff(); },
                    },
                    alpha);
}

Eigen::MatrixXd resolve_alpha(const AlphaSpec &alpha, const NodeTypes &types, int n) {
  if (n < 1)
    throw InvalidInput("network size must be positive");
  validate(alpha);
  Eigen::MatrixXd out = std::visit(
      Overloaded{
          [&](const FullAlpha &a) -> Eigen::MatrixXd {
            if (a.values.rows() != n)
              throw InvalidInput("full alpha is " + std::to_string(a.values.rows()) +
                                 "x" + std::to_string(a.values.rows()) +
                                 " but the network has n=" + std::to_string(n));
            check_types(types, n, false);
            return a.values;
          },
          [&](const ParametricAlpha &a) -> Eigen::MatrixXd {
            check_types(types, n, true);
            Eigen::MatrixXd m(n, n);
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j)
                m(i, j) = a.edge + (types.same(i, j) ? a.match : 0.0);
            return m;
          },
          [&](const BlockAlpha &a) -> Eigen::MatrixXd {
            check_types(types, n, false);
            std::vector<int> block(n);
            for (int k = 0; k < n; ++k)
              block[k] = a.block_of(k, n);
            Eigen::MatrixXd m(n, n);
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j)
                m(i, j) = a.values(block[i], block[j]);
            return m;
          },
      },
      alpha);
  out.diagonal().setZero();
  return out;
}

ResolvedModel::ResolvedModel(const ModelParams &params, const NodeTypes &types, int n)
    : alpha(resolve_alpha(params.alpha, types, n)), beta(params.beta) {
  if (!std::isfinite(beta))
    throw InvalidInput("beta must be finite");
}

double ResolvedModel::potential(const Graph &g) const {
  const int n = size();
  if (g.size() != n)
    throw InvalidInput("graph has n=" + std::to_string(g.size()) + " but the model has n=" +
                       std::to_string(n));
  double direct = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g.has_edge(i, j))
        direct += alpha(i, j);
  double twostar = 0.0;
  for (int d : g.degrees())
    twostar += static_cast<double>(d) * d;
  return 2.0 * direct + beta / (2.0 * n) * twostar;
}

double potential(const Graph &g, const NodeTypes &types, const ModelParams &params) {
  return ResolvedModel(params, types, g.size()).potential(g);
}

double potential_difference(const Graph &g, int i, int j, const NodeTypes &types,
                            const ModelParams &params) {
  const int n = g.size();
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw InvalidInput("node index out of range");
  if (i == j)
    throw InvalidInput("potential difference needs two distinct nodes");
  return ResolvedModel(params, types, n).potential_difference(g, i, j);
}

double utility(const Graph &g, int i, const NodeTypes &types, const ModelParams &params) {
  const int n = g.size();
  if (i < 0 || i >= n)
    throw InvalidInput("node index " + std::to_string(i) + " out of range for n=" +
                       std::to_string(n));
  const auto alpha = resolve_alpha(params.alpha, types, n);
  double direct = 0.0;
  double indirect = 0.0;
  for (int j = 0; j < n; ++j)
    if (j != i && g.has_edge(i, j)) {
      direct += alpha(i, j);
      indirect += g.degree(j);
    }
  return direct + params.beta / n * indirect;
}

SufficientStats sufficient_stats(const Graph &g, const NodeTypes &types) {
  const int n = g.size();
  check_types(types, n, true);
  SufficientStats s;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g.has_edge(i, j)) {
        ++s.edges;
        if (types.same(i, j))
          ++s.match_edges;
      }
  for (int d : g.degrees())
    s.twostar_sum += static_cast<long long>(d) * d;
  return s;
}

Graph graph_from_code(int n, unsigned long long code) {
  Graph g(n);
  int bit = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++bit)
      if ((code >> bit) & 1ULL)
        g.set_edge(i, j, true);
  return g;
}

unsigned long long graph_code(const Graph &g) {
  unsigned long long code = 0;
  int bit = 0;
  const int n = g.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++bit)
      if (g.has_edge(i, j))
        code |= 1ULL << bit;
  return code;
}

double exact_psi(int n, const NodeTypes &types, const ModelParams &params) {
  if (n < 1)
    throw InvalidInput("exact_psi needs n >= 1");
  if (n > kExactPsiMaxNodes)
    throw ResourceLimit("exact_psi enumerates 2^(n(n-1)/2) graphs; n=" + std::to_string(n) +
                        " exceeds the cap of " + std::to_string(kExactPsiMaxNodes));
  const ResolvedModel model(params, types, n);
  const int pairs = n * (n - 1) / 2;
  const unsigned long long states = 1ULL << pairs;
  std::vector<double> q(states);
  double qmax = -std::numeric_limits<double>::infinity();
  for (unsigned long long code = 0; code < states; ++code) {
    q[code] = model.potential(graph_from_code(n, code));
    qmax = std::max(qmax, q[code]);
  }
  double sum = 0.0;
  for (double v : q)
    sum += std::exp(v - qmax);
  return (qmax + std::log(sum)) / (static_cast<double>(n) * n);
}

} // namespace ergm
