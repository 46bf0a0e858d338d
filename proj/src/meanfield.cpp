#include "ergm_varest/meanfield.hpp"

#include "ergm_varest/errors.hpp"
#include "ergm_varest/numerics.hpp"
#include "ergm_varest/parallel.hpp"
#include "ergm_varest/rng.hpp"

#include <cmath>
#include <string>

namespace ergm {

MeanFieldState::MeanFieldState(int n, double fill) {
  if (n < 1)
    throw InvalidInput("mean-field state needs n >= 1");
  if (!(fill >= 0.0 && fill <= 1.0))
    throw InvalidInput("mean-field fill value must lie in [0,1]");
  mu_ = Eigen::MatrixXd::Constant(n, n, fill);
  mu_.diagonal().setZero();
}

MeanFieldState::MeanFieldState(Eigen::MatrixXd mu) : mu_(std::move(mu)) {
  if (mu_.rows() != mu_.cols() || mu_.rows() < 1)
    throw InvalidInput("mean-field matrix must be square and non-empty");
  const auto n = mu_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mu_(i, i) != 0.0)
      throw InvalidInput("mean-field matrix must have a zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = mu_(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw InvalidInput("mean-field entry (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") is outside [0,1]");
      if (v != mu_(j, i))
        throw InvalidInput("mean-field matrix must be symmetric");
    }
  }
}

namespace {

double objective_of(const Eigen::MatrixXd &m, const ResolvedModel &model, TwoStarForm form) {
  const int n = static_cast<int>(m.rows());
  double linear = 0.0;
  double entropy = 0.0;
  double variance = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double x = m(i, j);
      linear += model.alpha(i, j) * x;
      entropy += bernoulli_entropy(x);
      variance += x * (1.0 - x);
    }
  double twostar = m.colwise().sum().squaredNorm();
  if (form == TwoStarForm::kExact)
    twostar += 2.0 * variance;
  const double nn = static_cast<double>(n) * n;
  // Ordered sums count every unordered pair twice.
  return (2.0 * linear + model.beta / (2.0 * n) * twostar - entropy) / nn;
}

} // namespace

double mf_objective(const MeanFieldState &mu, const ResolvedModel &model, TwoStarForm form) {
  if (model.size() != mu.size())
    throw InvalidInput("mean-field state and model sizes differ");
  return objective_of(mu.matrix(), model, form);
}

double mf_objective(const MeanFieldState &mu, const NodeTypes &types, const ModelParams &params,
                    TwoStarForm form) {
  return mf_objective(mu, ResolvedModel(params, types, mu.size()), form);
}

namespace {

double sweep(Eigen::MatrixXd &mu, Eigen::VectorXd &rows, const ResolvedModel &model,
             TwoStarForm form) {
  const int n = static_cast<int>(mu.rows());
  const double scale = model.beta / n;
  const double self = form == TwoStarForm::kExact ? 1.0 : 0.0;
  double change = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double old = mu(i, j);
      const double field = rows[i] + rows[j] + self * (1.0 - 2.0 * old);
      const double x = logistic(2.0 * model.alpha(i, j) + scale * field);
      const double delta = x - old;
      mu(i, j) = x;
      mu(j, i) = x;
      rows[i] += delta;
      rows[j] += delta;
      change = std::max(change, std::abs(delta));
    }
  return change;
}

} // namespace

double mf_update_sweep_inplace(MeanFieldState &mu, const ResolvedModel &model, TwoStarForm form) {
  if (model.size() != mu.size())
    throw InvalidInput("mean-field state and model sizes differ");
  Eigen::MatrixXd m = mu.matrix();
  Eigen::VectorXd rows = m.rowwise().sum();
  const double change = sweep(m, rows, model, form);
  mu = MeanFieldState(std::move(m));
  return change;
}

MeanFieldState mf_update_sweep(const MeanFieldState &mu, const NodeTypes &types,
                               const ModelParams &params, TwoStarForm form) {
  MeanFieldState out = mu;
  mf_update_sweep_inplace(out, ResolvedModel(params, types, mu.size()), form);
  return out;
}

double fixed_point_residual(const MeanFieldState &mu, const ResolvedModel &model,
                            TwoStarForm form) {
  const int n = mu.size();
  const auto &m = mu.matrix();
  const Eigen::VectorXd rows = m.rowwise().sum();
  const double self = form == TwoStarForm::kExact ? 1.0 : 0.0;
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double field = rows[i] + rows[j] + self * (1.0 - 2.0 * m(i, j));
      const double target = logistic(2.0 * model.alpha(i, j) + model.beta / n * field);
      worst = std::max(worst, std::abs(m(i, j) - target));
    }
  return worst;
}

namespace {

Eigen::MatrixXd initial_matrix(const ResolvedModel &model, const MeanFieldOptions &options,
                               int restart) {
  const int n = model.size();
  Eigen::MatrixXd mu;
  if (restart == 0 && options.initial) {
    if (options.initial->size() != n)
      throw InvalidInput("initial mean-field state has the wrong size");
    return options.initial->matrix();
  }
  if (restart <= 2) {
    double fill = 0.0;
    if (restart == 0) {
      const double pairs = n > 1 ? static_cast<double>(n) * (n - 1) : 1.0;
      fill = logistic(2.0 * model.alpha.sum() / pairs);
    } else {
      fill = restart == 1 ? 0.05 : 0.95;
    }
    mu = Eigen::MatrixXd::Constant(n, n, fill);
  } else {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(restart)));
    mu.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double x = rng.uniform();
        mu(i, j) = x;
        mu(j, i) = x;
      }
  }
  mu.diagonal().setZero();
  return mu;
}

struct RestartOutcome {
  Eigen::MatrixXd mu;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> trace;
};

} // namespace

MFResult solve_mf(const ResolvedModel &model, const MeanFieldOptions &options) {
  if (options.restarts < 1)
    throw InvalidInput("solve_mf needs at least one restart");
  if (!(options.tol > 0.0) || options.max_sweeps < 1)
    throw InvalidInput("solve_mf needs tol > 0 and max_sweeps >= 1");
  std::vector<RestartOutcome> outcomes(options.restarts);

  parallel_for(outcomes.size(), [&](std::size_t r) {
    RestartOutcome &out = outcomes[r];
    out.mu = initial_matrix(model, options, static_cast<int>(r));
    Eigen::VectorXd rows = out.mu.rowwise().sum();
    for (int s = 0; s < options.max_sweeps; ++s) {
      const double change = sweep(out.mu, rows, model, options.form);
      ++out.sweeps;
      if (options.keep_trace)
        out.trace.push_back(objective_of(out.mu, model, options.form));
      if (change < options.tol) {
        out.converged = true;
        break;
      }
      // Row sums drift from accumulated rounding over long runs.
      if (s % 64 == 63)
        rows = out.mu.rowwise().sum();
    }
    out.objective = options.keep_trace && !out.trace.empty()
                        ? out.trace.back()
                        : objective_of(out.mu, model, options.form);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r)
    if (outcomes[r].objective > outcomes[best].objective)
      best = r;

  MFResult result;
  result.restart_objectives.reserve(outcomes.size());
  for (const auto &o : outcomes)
    result.restart_objectives.push_back(o.objective);
  auto &chosen = outcomes[best];
  result.mu_star = MeanFieldState(std::move(chosen.mu));
  result.psi_mf = chosen.objective;
  result.iterations = chosen.sweeps;
  result.restarts_used = options.restarts;
  result.best_restart = static_cast<int>(best);
  result.converged = chosen.converged;
  result.objective_trace = std::move(chosen.trace);
  return result;
}

MFResult solve_mf(const NodeTypes &types, const ModelParams &params, int n,
                  const MeanFieldOptions &options) {
  return solve_mf(ResolvedModel(params, types, n), options);
}

BoundReport mean_field_error_bounds(int n, const ModelParams &params, double c1, double c2) {
  if (n < 2)
    throw InvalidInput("error bounds need n >= 2");
  if (!(c1 > 0.0) || !(c2 > 0.0))
    throw InvalidInput("universal constants c1, c2 must be positive");
  const double a = alpha_sup_norm(params.alpha);
  const double b = std::abs(params.beta);
  BoundReport r;
  r.c1 = c1;
  r.c2 = c2;
  r.C1 = c1 * (a + std::pow(b, 4) + 1.0);
  r.C2 = c2 * std::sqrt(a + b + 1.0) * std::sqrt(1.0 + b * b);
  r.C3 = b;
  const double nd = n;
  r.lower_gap = r.C3 / nd;
  r.upper_gap = r.C1 * std::pow(nd, -0.2) * std::pow(std::log(nd), 0.2) + r.C2 / std::sqrt(nd);
  return r;
}

} // namespace ergm
