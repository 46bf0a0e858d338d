#pragma once

#include "ergm_varest/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace ergm {

/// How the mean-field objective takes the expectation of the ordered
/// two-star sum sum_{i,j,k} g_ij g_jk under the product measure.
///
/// kExact uses E[g_ij g_ji] = mu_ij for the degenerate k = i triples, so the
/// objective is exactly E_q[Q_n]/n^2 + entropy and is a true lower bound of
/// psi_n for every beta. kSquared writes mu_ij^2 for those terms as well;
/// the two differ by beta/(2n^3) sum mu(1-mu) = O(beta/n), and kSquared is
/// not a lower bound when beta < 0.
enum class TwoStarForm { kExact, kSquared };

/// Symmetric link-marginal matrix with zero diagonal and entries in [0,1].
class MeanFieldState {
public:
  explicit MeanFieldState(int n, double fill = 0.0);
  /// Validates symmetry, zero diagonal and range; throws InvalidInput.
  explicit MeanFieldState(Eigen::MatrixXd mu);

  int size() const { return static_cast<int>(mu_.rows()); }
  double operator()(int i, int j) const { return mu_(i, j); }
  void set(int i, int j, double value) {
    mu_(i, j) = value;
    mu_(j, i) = value;
  }
  const Eigen::MatrixXd &matrix() const { return mu_; }

private:
  Eigen::MatrixXd mu_;
};

/// psi_n^MF(mu): expected potential over n^2 plus entropy over n^2.
double mf_objective(const MeanFieldState &mu, const NodeTypes &types, const ModelParams &params,
                    TwoStarForm form = TwoStarForm::kExact);
double mf_objective(const MeanFieldState &mu, const ResolvedModel &model, TwoStarForm form);

/// One in-place Gauss-Seidel sweep of the fixed-point update
///   mu_ij <- logistic(2 alpha_ij + (beta/n) * s_ij)
/// over pairs i < j in lexicographic order, where s_ij = d_i + d_j (kSquared)
/// or d_i + d_j + 1 - 2 mu_ij (kExact), d being the current row sums.
/// Under kExact each step is the exact maximizer of the objective in mu_ij.
/// Returns the largest absolute change.
double mf_update_sweep_inplace(MeanFieldState &mu, const ResolvedModel &model, TwoStarForm form);

MeanFieldState mf_update_sweep(const MeanFieldState &mu, const NodeTypes &types,
                               const ModelParams &params, TwoStarForm form = TwoStarForm::kExact);

struct MeanFieldOptions {
  int restarts = 5;
  double tol = 1e-10;
  int max_sweeps = 10000;
  std::uint64_t seed = 0;
  TwoStarForm form = TwoStarForm::kExact;
  /// Replaces the deterministic first restart when set.
  std::optional<MeanFieldState> initial;
  bool keep_trace = true;
};

struct MFResult {
  MeanFieldState mu_star{1};
  double psi_mf = 0.0;
  int iterations = 0;     ///< sweeps used by the selected restart
  int restarts_used = 0;
  int best_restart = 0;
  bool converged = false; ///< selected restart reached tol
  std::vector<double> objective_trace;     ///< selected restart, one value per sweep
  std::vector<double> restart_objectives;
};

/// Multi-restart fixed-point iteration. Restart 0 starts from the constant
/// logistic(2 * mean alpha), restart 1 from 0.05, restart 2 from 0.95, the
/// rest from symmetrized i.i.d. uniform matrices. The best objective wins;
/// ties go to the lower restart index.
MFResult solve_mf(const NodeTypes &types, const ModelParams &params, int n,
                  const MeanFieldOptions &options = {});
MFResult solve_mf(const ResolvedModel &model, const MeanFieldOptions &options = {});

/// Largest |mu_ij - logistic(2 alpha_ij + (beta/n) s_ij)| over pairs.
double fixed_point_residual(const MeanFieldState &mu, const ResolvedModel &model,
                            TwoStarForm form);

struct BoundReport {
  double lower_gap = 0.0; ///< C3(beta)/n
  double upper_gap = 0.0; ///< C1 n^-1/5 (log n)^1/5 + C2 n^-1/2
  double c1 = 1.0;
  double c2 = 1.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
};

/// Evaluates the finite-n error bounds of the mean-field approximation.
/// c1 and c2 are unspecified universal constants, so values are qualitative.
BoundReport mean_field_error_bounds(int n, const ModelParams &params, double c1 = 1.0,
                                    double c2 = 1.0);

} // namespace ergm
