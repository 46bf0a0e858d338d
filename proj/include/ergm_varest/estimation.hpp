#pragma once

#include "ergm_varest/graph.hpp"
#include "ergm_varest/meanfield.hpp"
#include "ergm_varest/model.hpp"
#include "ergm_varest/sampler.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ergm {

enum class Method { kMPLE, kMFMLE, kMCMLE };

const char *to_string(Method m);
/// Accepts "mple", "mfmle", "mcmle" (case-insensitive); throws InvalidInput.
Method parse_method(const std::string &name);

/// theta = (theta_edge, theta_match, beta) throughout.
struct EstimationResult {
  Theta theta_hat = Theta::Zero();
  double objective = 0.0; ///< maximized criterion at theta_hat
  Method method = Method::kMPLE;
  bool converged = false;
  int iterations = 0;
  std::map<std::string, double> diagnostics;
  std::string message;
};

/// x_ij with theta . x_ij == potential_difference(g, i, j) for parametric alpha:
/// (2, 2 * 1{same type}, (deg_i + deg_j + 1) / n) with degrees excluding ij.
Eigen::Vector3d change_stat(const Graph &g, const NodeTypes &types, int i, int j);

/// Sufficient statistics scaled so that potential == theta . t:
/// (2 edges, 2 match_edges, twostar_sum / (2n)).
Eigen::Vector3d potential_stats(const Graph &g, const NodeTypes &types);

struct MpleOptions {
  double grad_tol = 1e-8; ///< sup-norm of the score
  int max_iterations = 200;
};

/// Maximum pseudo-likelihood: logistic regression of g_ij on x_ij over pairs,
/// damped Newton. theta_match is fixed at 0 (diagnostic "match_dropped") when
/// every pair has the same type relation. Empty or complete graphs throw
/// SeparationError.
EstimationResult mple(const Graph &g, const NodeTypes &types, const MpleOptions &options = {});

struct MfMleOptions {
  MeanFieldOptions inner;            ///< restarts, tol, seed of each inner solve
  std::optional<Theta> start;        ///< default: the MPLE, else a density fit
  Eigen::Vector3d initial_step{0.5, 0.5, 0.5};
  double simplex_tol = 1e-5;         ///< stop when the simplex size falls below
  int max_iterations = 2000;
  bool fallback_refinement = true;   ///< coordinate grid search when the simplex stalls
  std::optional<double> fixed_beta;  ///< profile: hold beta at this value
  double bound = 30.0;               ///< search box |theta_k| <= bound
};

/// ell(theta) = Q(g; theta) - n^2 psi_MF(theta), maximized by Nelder-Mead.
double mf_log_likelihood(const Graph &g, const NodeTypes &types, const Theta &theta,
                         const MeanFieldOptions &inner);
EstimationResult mf_mle(const Graph &g, const NodeTypes &types, const MfMleOptions &options = {});

struct McMleOptions {
  int samples = 1000;
  ChainConfig chain;                 ///< chain at theta0 (seed, burn-in, thinning, start)
  double grad_tol = 1e-6;
  int max_iterations = 500;
  double min_ess_fraction = 0.02;
};

/// Geyer-Thompson log-likelihood ratio estimate relative to theta0 from
/// sufficient statistics of draws at theta0.
class ImportanceLikelihood {
public:
  ImportanceLikelihood(Eigen::Vector3d observed, std::vector<Eigen::Vector3d> sampled,
                       Theta theta0);
  /// ell(theta) = (theta - theta0) . t_obs - log mean_s exp((theta - theta0) . t_s)
  double value(const Theta &theta) const;
  Eigen::Vector3d gradient(const Theta &theta) const;
  /// (sum w)^2 / sum w^2 with w_s = exp((theta - theta0) . t_s).
  double effective_sample_size(const Theta &theta) const;
  int samples() const { return static_cast<int>(sampled_.size()); }

private:
  Eigen::Vector3d observed_;
  std::vector<Eigen::Vector3d> sampled_;
  Theta theta0_;
};

/// Samples at theta0 with the Glauber chain, then maximizes the importance
/// approximation with BFGS. Not converged when ESS < min_ess_fraction * S.
EstimationResult mc_mle(const Graph &g, const NodeTypes &types, const Theta &theta0,
                        const McMleOptions &options = {});

} // namespace ergm
