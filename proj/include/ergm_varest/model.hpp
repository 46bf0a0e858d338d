#pragma once

#include "ergm_varest/graph.hpp"

#include <Eigen/Dense>

#include <variant>
#include <vector>

namespace ergm {

/// Explicit symmetric n x n matrix of alpha_ij (diagonal ignored).
struct FullAlpha {
  Eigen::MatrixXd values;
};

/// alpha_ij = edge + match * 1{tau_i == tau_j}.
struct ParametricAlpha {
  double edge = 0.0;
  double match = 0.0;
};

/// Piecewise-constant alpha(x, y) on [0,1]^2 with block boundaries
/// 0 = a_0 < ... < a_M = 1; node k sits at x = (k+1)/n.
struct BlockAlpha {
  std::vector<double> boundaries;
  Eigen::MatrixXd values;

  int blocks() const { return static_cast<int>(values.rows()); }
  /// Block measures a_m - a_{m-1}.
  std::vector<double> widths() const;
  /// Block index of node k in an n-node network.
  int block_of(int k, int n) const;
};

using AlphaSpec = std::variant<FullAlpha, ParametricAlpha, BlockAlpha>;

struct ModelParams {
  AlphaSpec alpha = ParametricAlpha{};
  double beta = 0.0;
};

/// Parameter vector (theta_edge, theta_match, beta) used by the estimators.
using Theta = Eigen::Vector3d;

ModelParams parametric_params(double edge, double match, double beta);
ModelParams parametric_params(const Theta &theta);

/// Throws InvalidInput when the spec is malformed (asymmetric, non-finite,
/// non-increasing boundaries).
void validate(const AlphaSpec &alpha);

/// sup |alpha(x, y)| over the values the spec can produce.
double alpha_sup_norm(const AlphaSpec &alpha);

/// Dense alpha_ij for an n-node network; zero diagonal.
Eigen::MatrixXd resolve_alpha(const AlphaSpec &alpha, const NodeTypes &types, int n);

/// Fully resolved model: the form every hot loop works with.
struct ResolvedModel {
  Eigen::MatrixXd alpha;
  double beta = 0.0;

  ResolvedModel(const ModelParams &params, const NodeTypes &types, int n);
  int size() const { return static_cast<int>(alpha.rows()); }

  double potential(const Graph &g) const;
  /// Q(g with g_ij = 1) - Q(g with g_ij = 0).
  double potential_difference(const Graph &g, int i, int j) const {
    const int cur = g.has_edge(i, j) ? 1 : 0;
    const int n = size();
    return 2.0 * alpha(i, j) +
           beta / n * static_cast<double>(g.degree(i) - cur + g.degree(j) - cur + 1);
  }
};

/// Integer summaries of a graph; twostar_sum is sum_b deg(b)^2.
struct SufficientStats {
  long long edges = 0;
  long long match_edges = 0;
  long long twostar_sum = 0;

  bool operator==(const SufficientStats &) const = default;
};

/// Q_n(g) = sum_{i,j} alpha_ij g_ij + beta/(2n) sum_{i,j,k} g_ij g_jk,
/// all sums over ordered indices (degenerate k = i triples included).
double potential(const Graph &g, const NodeTypes &types, const ModelParams &params);

/// Closed form 2 alpha_ij + (beta/n)(deg_i + deg_j + 1), degrees excluding ij.
double potential_difference(const Graph &g, int i, int j, const NodeTypes &types,
                            const ModelParams &params);

/// u_i(g) = sum_j alpha_ij g_ij + (beta/n) sum_j sum_k g_ij g_jk.
double utility(const Graph &g, int i, const NodeTypes &types, const ModelParams &params);

SufficientStats sufficient_stats(const Graph &g, const NodeTypes &types);

/// Maximum n accepted by exact_psi (2^15 graphs).
inline constexpr int kExactPsiMaxNodes = 6;

/// psi_n = n^-2 log sum_{graphs} exp(Q_n) by full enumeration.
/// Throws ResourceLimit for n > kExactPsiMaxNodes.
double exact_psi(int n, const NodeTypes &types, const ModelParams &params);

/// Decodes bit pattern `code` over the lexicographic pair list into a graph.
Graph graph_from_code(int n, unsigned long long code);
/// Inverse of graph_from_code.
unsigned long long graph_code(const Graph &g);

} // namespace ergm
