#include "ergm_varest/estimation.hpp"

#include "ergm_varest/errors.hpp"
#include "ergm_varest/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

namespace ergm {

const char *to_string(Method m) {
  switch (m) {
  case Method::kMPLE:
    return "MPLE";
  case Method::kMFMLE:
    return "MFMLE";
  case Method::kMCMLE:
    return "MCMLE";
  }
  return "?";
}

Method parse_method(const std::string &name) {
  std::string s;
  for (char c : name)
    if (c != '-' && c != '_')
      s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "mple")
    return Method::kMPLE;
  if (s == "mfmle" || s == "meanfield")
    return Method::kMFMLE;
  if (s == "mcmle" || s == "mcmcmle")
    return Method::kMCMLE;
  throw InvalidInput("unknown estimation method '" + name + "' (expected mple, mfmle or mcmle)");
}

Eigen::Vector3d change_stat(const Graph &g, const NodeTypes &types, int i, int j) {
  const int n = g.size();
  if (types.size() != n)
    throw InvalidInput("node types must match the graph size");
  if (i < 0 || j < 0 || i >= n || j >= n || i == j)
    throw InvalidInput("change statistic needs two distinct valid nodes");
  const int cur = g.has_edge(i, j) ? 1 : 0;
  return {2.0, types.same(i, j) ? 2.0 : 0.0,
          static_cast<double>(g.degree(i) - cur + g.degree(j) - cur + 1) / n};
}

Eigen::Vector3d potential_stats(const Graph &g, const NodeTypes &types) {
  const auto s = sufficient_stats(g, types);
  return {2.0 * static_cast<double>(s.edges), 2.0 * static_cast<double>(s.match_edges),
          static_cast<double>(s.twostar_sum) / (2.0 * g.size())};
}

namespace {

void check_inputs(const Graph &g, const NodeTypes &types) {
  if (g.size() < 2)
    throw InvalidInput("estimation needs at least two nodes");
  if (types.size() != g.size())
    throw InvalidInput("node types have length " + std::to_string(types.size()) +
                       " but the graph has n=" + std::to_string(g.size()));
}

bool match_identified(const NodeTypes &types) {
  const int n = types.size();
  bool any_same = false;
  bool any_diff = false;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      (types.same(i, j) ? any_same : any_diff) = true;
  return any_same && any_diff;
}

double density(const Graph &g) {
  const double pairs = 0.5 * g.size() * (g.size() - 1.0);
  return static_cast<double>(g.edge_count()) / pairs;
}

/// Starting point fitting only the edge density.
Theta density_start(const Graph &g) {
  const double d = std::clamp(density(g), 1e-6, 1.0 - 1e-6);
  return {0.5 * logit(d), 0.0, 0.0};
}

void quiet_gsl() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

} // namespace

EstimationResult mple(const Graph &g, const NodeTypes &types, const MpleOptions &options) {
  check_inputs(g, types);
  const int n = g.size();
  const long long pairs = static_cast<long long>(n) * (n - 1) / 2;
  if (g.edge_count() == 0 || g.edge_count() == pairs)
    throw SeparationError("pseudo-likelihood has no finite maximizer for an " +
                          std::string(g.edge_count() == 0 ? "empty" : "complete") + " graph");

  const bool with_match = match_identified(types);
  std::vector<int> cols{0, 2};
  if (with_match)
    cols = {0, 1, 2};
  const int k = static_cast<int>(cols.size());
  Eigen::MatrixXd X(pairs, k);
  Eigen::VectorXd y(pairs);
  long long r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++r) {
      const auto x = change_stat(g, types, i, j);
      for (int c = 0; c < k; ++c)
        X(r, c) = x[cols[c]];
      y[r] = g.has_edge(i, j) ? 1.0 : 0.0;
    }

  auto loglik = [&](const Eigen::VectorXd &b) {
    const Eigen::VectorXd eta = X * b;
    double s = 0.0;
    for (long long p = 0; p < pairs; ++p)
      s += y[p] * eta[p] - log1p_exp(eta[p]);
    return s;
  };

  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  b[0] = density_start(g)[0];
  double value = loglik(b);
  EstimationResult res;
  res.method = Method::kMPLE;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd eta = X * b;
    Eigen::VectorXd resid(pairs);
    Eigen::VectorXd w(pairs);
    for (long long p = 0; p < pairs; ++p) {
      const double mu = logistic(eta[p]);
      resid[p] = y[p] - mu;
      w[p] = mu * (1.0 - mu);
    }
    const Eigen::VectorXd grad = X.transpose() * resid;
    res.iterations = it;
    if (grad.cwiseAbs().maxCoeff() <= options.grad_tol) {
      res.converged = true;
      break;
    }
    const Eigen::MatrixXd info = X.transpose() * w.asDiagonal() * X;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 1e-12 * info.trace())) {
      res.message = "pseudo-likelihood information matrix is singular";
      break;
    }
    const Eigen::VectorXd step = ldlt.solve(grad);
    // Close to the optimum the ascent falls below the rounding error of the
    // summed log-likelihood; a full step is then accepted on that slack.
    const double slack = 1e-13 * (1.0 + std::abs(value));
    double t = 1.0;
    Eigen::VectorXd next = b + step;
    double next_value = loglik(next);
    bool accept = next_value >= value ||
                  (next_value >= value - slack && grad.dot(step) <= 1e3 * slack);
    while (!accept && t > 1e-10) {
      t *= 0.5;
      next = b + t * step;
      next_value = loglik(next);
      accept = next_value >= value;
    }
    if (!accept) {
      res.message = "line search failed";
      break;
    }
    b = next;
    value = next_value;
    if (b.cwiseAbs().maxCoeff() > 1e3) {
      res.message = "estimates diverge (quasi-separation)";
      break;
    }
  }
  if (!res.converged && res.message.empty())
    res.message = "Newton iteration limit reached";

  for (int c = 0; c < k; ++c)
    res.theta_hat[cols[c]] = b[c];
  res.objective = value;
  res.diagnostics["match_dropped"] = with_match ? 0.0 : 1.0;
  res.diagnostics["pairs"] = static_cast<double>(pairs);
  return res;
}

double mf_log_likelihood(const Graph &g, const NodeTypes &types, const Theta &theta,
                         const MeanFieldOptions &inner) {
  check_inputs(g, types);
  const int n = g.size();
  const ResolvedModel model(parametric_params(theta), types, n);
  const double psi = solve_mf(model, inner).psi_mf;
  return theta.dot(potential_stats(g, types)) - static_cast<double>(n) * n * psi;
}

namespace {

struct MfObjective {
  const Graph *g;
  const NodeTypes *types;
  const MeanFieldOptions *inner;
  Eigen::Vector3d stats;
  Theta base;            ///< values of the coordinates held fixed
  std::vector<int> free; ///< coordinates moved by the optimizer
  double bound = 0.0;    ///< box |theta_k| <= bound on free coordinates
  int evaluations = 0;
  int inner_nonconverged = 0;
  double scale = 1.0; ///< 1/n^2 keeps the simplex tolerances scale-free

  Theta embed(const double *x) const {
    Theta theta = base;
    for (std::size_t k = 0; k < free.size(); ++k)
      theta[free[k]] = x[k];
    return theta;
  }

  double neg(const Theta &theta) {
    ++evaluations;
    for (int k : free)
      if (!std::isfinite(theta[k]) || std::abs(theta[k]) > bound)
        return std::numeric_limits<double>::infinity();
    const int n = g->size();
    const auto r = solve_mf(ResolvedModel(parametric_params(theta), *types, n), *inner);
    if (!r.converged)
      ++inner_nonconverged;
    return -(theta.dot(stats) - static_cast<double>(n) * n * r.psi_mf) * scale;
  }
};

double gsl_mf_objective(const gsl_vector *x, void *params) {
  auto *obj = static_cast<MfObjective *>(params);
  return obj->neg(obj->embed(gsl_vector_const_ptr(x, 0)));
}

struct SimplexOutcome {
  Theta x;
  double f;
  int iterations;
  bool converged;
};

SimplexOutcome run_simplex(MfObjective &obj, const Theta &start, const Eigen::Vector3d &step,
                           double tol, int max_iterations) {
  quiet_gsl();
  const std::size_t d = obj.free.size();
  gsl_multimin_function fn{&gsl_mf_objective, d, &obj};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(d), gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(d),
                                                             gsl_vector_free);
  for (std::size_t k = 0; k < d; ++k) {
    gsl_vector_set(x.get(), k, start[obj.free[k]]);
    gsl_vector_set(ss.get(), k, step[obj.free[k]]);
  }
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, d),
      gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());
  SimplexOutcome out{start, 0.0, 0, false};
  for (int it = 1; it <= max_iterations; ++it) {
    out.iterations = it;
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS)
      break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), tol) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
  }
  out.x = obj.embed(gsl_vector_const_ptr(s->x, 0));
  out.f = s->fval;
  return out;
}

/// Compass search: try +-h along each free axis, halve h when nothing improves.
SimplexOutcome refine_on_grid(MfObjective &obj, Theta x, double f, double h, double h_min,
                              int max_evals) {
  int evals = 0;
  while (h >= h_min && evals < max_evals) {
    bool improved = false;
    for (std::size_t k = 0; k < obj.free.size() && !improved && evals < max_evals; ++k)
      for (double sgn : {1.0, -1.0}) {
        Theta y = x;
        y[obj.free[k]] += sgn * h;
        const double fy = obj.neg(y);
        ++evals;
        if (fy < f) {
          x = y;
          f = fy;
          improved = true;
          break;
        }
      }
    if (!improved)
      h *= 0.5;
  }
  return {x, f, evals, h < h_min};
}

} // namespace

EstimationResult mf_mle(const Graph &g, const NodeTypes &types, const MfMleOptions &options) {
  check_inputs(g, types);
  const int n = g.size();
  EstimationResult res;
  res.method = Method::kMFMLE;

  Theta start;
  if (options.start) {
    start = *options.start;
  } else {
    start = density_start(g);
    try {
      const auto m = mple(g, types);
      if (m.theta_hat.allFinite() && m.theta_hat.cwiseAbs().maxCoeff() < 50.0)
        start = m.theta_hat;
    } catch (const SeparationError &) {
    }
  }

  MfObjective obj;
  obj.g = &g;
  obj.types = &types;
  obj.inner = &options.inner;
  obj.stats = potential_stats(g, types);
  obj.scale = 1.0 / (static_cast<double>(n) * n);
  obj.bound = options.bound;
  const bool with_match = match_identified(types);
  obj.free = {0};
  if (with_match)
    obj.free.push_back(1);
  else
    start[1] = 0.0;
  if (options.fixed_beta)
    start[2] = *options.fixed_beta;
  else
    obj.free.push_back(2);
  for (int k : obj.free)
    start[k] = std::clamp(start[k], -0.5 * options.bound, 0.5 * options.bound);
  obj.base = start;

  auto best = run_simplex(obj, start, options.initial_step, options.simplex_tol,
                          options.max_iterations);
  int iterations = best.iterations;
  // One restart from the reported vertex guards against a collapsed simplex.
  if (best.converged) {
    const auto again = run_simplex(obj, best.x, 0.2 * options.initial_step,
                                   options.simplex_tol, options.max_iterations);
    iterations += again.iterations;
    if (again.f <= best.f)
      best = again;
  }
  bool fallback = false;
  if (!best.converged && options.fallback_refinement) {
    fallback = true;
    const auto refined = refine_on_grid(obj, best.x, best.f, 0.25, options.simplex_tol, 3000);
    iterations += refined.iterations;
    best.x = refined.x;
    best.f = refined.f;
    best.converged = refined.converged;
  }

  // A maximizer pressed against the box is an escape along a direction in
  // which ell keeps increasing, not an interior optimum.
  bool at_bound = false;
  for (int k : obj.free)
    at_bound = at_bound || std::abs(best.x[k]) > options.bound - 1e-3 * (1.0 + options.bound);

  res.theta_hat = best.x;
  res.objective = -best.f / obj.scale;
  res.converged = best.converged && std::isfinite(best.f) && !at_bound;
  res.iterations = iterations;
  res.diagnostics["restarts"] = options.inner.restarts;
  res.diagnostics["evaluations"] = obj.evaluations;
  res.diagnostics["inner_nonconverged"] = obj.inner_nonconverged;
  res.diagnostics["fallback_used"] = fallback ? 1.0 : 0.0;
  res.diagnostics["start_edge"] = start[0];
  res.diagnostics["start_match"] = start[1];
  res.diagnostics["start_beta"] = start[2];
  res.diagnostics["match_dropped"] = with_match ? 0.0 : 1.0;
  res.diagnostics["at_bound"] = at_bound ? 1.0 : 0.0;
  if (at_bound)
    res.message = "estimate reached the search bound";
  else if (!res.converged)
    res.message = "simplex did not reach the size tolerance";
  return res;
}

ImportanceLikelihood::ImportanceLikelihood(Eigen::Vector3d observed,
                                           std::vector<Eigen::Vector3d> sampled, Theta theta0)
    : observed_(std::move(observed)), sampled_(std::move(sampled)), theta0_(std::move(theta0)) {
  if (sampled_.empty())
    throw InvalidInput("importance likelihood needs at least one sample");
}

namespace {

double log_mean_exp(const std::vector<double> &v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v)
    s += std::exp(x - m);
  return m + std::log(s / static_cast<double>(v.size()));
}

} // namespace

double ImportanceLikelihood::value(const Theta &theta) const {
  const Eigen::Vector3d d = theta - theta0_;
  std::vector<double> e(sampled_.size());
  for (std::size_t s = 0; s < sampled_.size(); ++s)
    e[s] = d.dot(sampled_[s]);
  return d.dot(observed_) - log_mean_exp(e);
}

Eigen::Vector3d ImportanceLikelihood::gradient(const Theta &theta) const {
  const Eigen::Vector3d d = theta - theta0_;
  std::vector<double> e(sampled_.size());
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sampled_.size(); ++s) {
    e[s] = d.dot(sampled_[s]);
    m = std::max(m, e[s]);
  }
  double z = 0.0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (std::size_t s = 0; s < sampled_.size(); ++s) {
    const double w = std::exp(e[s] - m);
    z += w;
    mean += w * sampled_[s];
  }
  return observed_ - mean / z;
}

double ImportanceLikelihood::effective_sample_size(const Theta &theta) const {
  const Eigen::Vector3d d = theta - theta0_;
  std::vector<double> e(sampled_.size());
  for (std::size_t s = 0; s < sampled_.size(); ++s)
    e[s] = d.dot(sampled_[s]);
  const double m = *std::max_element(e.begin(), e.end());
  double s1 = 0.0;
  double s2 = 0.0;
  for (double x : e) {
    const double w = std::exp(x - m);
    s1 += w;
    s2 += w * w;
  }
  return s1 * s1 / s2;
}

namespace {

Theta from_gsl(const gsl_vector *x) {
  return {gsl_vector_get(x, 0), gsl_vector_get(x, 1), gsl_vector_get(x, 2)};
}

double gt_f(const gsl_vector *x, void *p) {
  return -static_cast<const ImportanceLikelihood *>(p)->value(from_gsl(x));
}

void gt_df(const gsl_vector *x, void *p, gsl_vector *grad) {
  const auto gr = static_cast<const ImportanceLikelihood *>(p)->gradient(from_gsl(x));
  for (int k = 0; k < 3; ++k)
    gsl_vector_set(grad, k, -gr[k]);
}

void gt_fdf(const gsl_vector *x, void *p, double *f, gsl_vector *grad) {
  *f = gt_f(x, p);
  gt_df(x, p, grad);
}

} // namespace

EstimationResult mc_mle(const Graph &g, const NodeTypes &types, const Theta &theta0,
                        const McMleOptions &options) {
  check_inputs(g, types);
  if (options.samples < 2)
    throw InvalidInput("mc_mle needs at least two samples");
  if (!theta0.allFinite())
    throw InvalidInput("theta0 must be finite");
  const int n = g.size();
  EstimationResult res;
  res.method = Method::kMCMLE;

  const auto run = sample_chain(options.chain, UniformMeeting{}, types,
                                parametric_params(theta0), n, options.samples);
  std::vector<Eigen::Vector3d> stats;
  stats.reserve(run.samples.size());
  for (const auto &s : run.samples)
    stats.push_back(potential_stats(s, types));
  const ImportanceLikelihood lik(potential_stats(g, types), std::move(stats), theta0);

  // Directions with no variation across draws carry no information.
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (int s = 0; s < options.samples; ++s) {
    const auto t = potential_stats(run.samples[s], types);
    lo = lo.cwiseMin(t);
    hi = hi.cwiseMax(t);
  }

  quiet_gsl();
  gsl_multimin_function_fdf fn{&gt_f, &gt_df, &gt_fdf, 3,
                               const_cast<ImportanceLikelihood *>(&lik)};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(3), gsl_vector_free);
  for (int k = 0; k < 3; ++k)
    gsl_vector_set(x.get(), k, theta0[k]);
  std::unique_ptr<gsl_multimin_fdfminimizer, decltype(&gsl_multimin_fdfminimizer_free)> s(
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, 3),
      gsl_multimin_fdfminimizer_free);
  gsl_multimin_fdfminimizer_set(s.get(), &fn, x.get(), 0.05, 0.1);

  bool grad_ok = false;
  int it = 0;
  for (it = 1; it <= options.max_iterations; ++it) {
    const int status = gsl_multimin_fdfminimizer_iterate(s.get());
    if (gsl_multimin_test_gradient(s->gradient, options.grad_tol) == GSL_SUCCESS) {
      grad_ok = true;
      break;
    }
    if (status != GSL_SUCCESS)
      break; // no further progress possible along the search direction
    if (from_gsl(s->x).cwiseAbs().maxCoeff() > 1e3)
      break;
  }
  const Theta theta = from_gsl(s->x);
  const Eigen::Vector3d grad = lik.gradient(theta);
  if (!grad_ok)
    grad_ok = grad.cwiseAbs().maxCoeff() <= options.grad_tol;

  const double ess = lik.effective_sample_size(theta);
  res.theta_hat = theta;
  res.objective = lik.value(theta);
  res.iterations = it;
  res.diagnostics["ess"] = ess;
  res.diagnostics["samples"] = options.samples;
  res.diagnostics["gradient_norm"] = grad.cwiseAbs().maxCoeff();
  res.diagnostics["degenerate_directions"] = static_cast<double>((hi - lo).cwiseEqual(0.0).count());
  const bool ess_ok = ess >= options.min_ess_fraction * options.samples;
  res.converged = grad_ok && ess_ok && theta.allFinite();
  if (!grad_ok)
    res.message = "quasi-Newton did not reach the gradient tolerance";
  else if (!ess_ok)
    res.message = "effective sample size collapsed below " +
                  std::to_string(options.min_ess_fraction) + " * S";
  return res;
}

} // namespace ergm
