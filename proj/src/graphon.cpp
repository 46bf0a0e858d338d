#include "ergm_varest/graphon.hpp"

#include "ergm_varest/errors.hpp"
#include "ergm_varest/numerics.hpp"
#include "ergm_varest/parallel.hpp"
#include "ergm_varest/rng.hpp"
#include "roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ergm {

std::vector<double> BlockGraphon::widths() const {
  std::vector<double> w(boundaries.size() > 0 ? boundaries.size() - 1 : 0);
  for (std::size_t m = 0; m < w.size(); ++m)
    w[m] = boundaries[m + 1] - boundaries[m];
  return w;
}

void BlockGraphon::validate() const {
  const auto M = values.rows();
  if (M < 1 || values.cols() != M)
    throw InvalidInput("block graphon needs a non-empty square value matrix");
  if (boundaries.size() != static_cast<std::size_t>(M) + 1)
    throw InvalidInput("block graphon needs M+1 boundaries for M blocks");
  if (boundaries.front() != 0.0 || boundaries.back() != 1.0)
    throw InvalidInput("block boundaries must start at 0 and end at 1");
  for (std::size_t m = 1; m < boundaries.size(); ++m)
    if (!(boundaries[m] > boundaries[m - 1]))
      throw InvalidInput("block boundaries must be strictly increasing");
  for (Eigen::Index m = 0; m < M; ++m)
    for (Eigen::Index l = 0; l < M; ++l) {
      const double u = values(m, l);
      if (!(u >= 0.0 && u <= 1.0))
        throw InvalidInput("block graphon values must lie in [0,1]");
      if (u != values(l, m))
        throw InvalidInput("block graphon values must be symmetric");
    }
}

double psi_beta_zero(const BlockAlpha &alpha) {
  validate(AlphaSpec{alpha});
  const auto w = alpha.widths();
  double sum = 0.0;
  for (int m = 0; m < alpha.blocks(); ++m)
    for (int l = 0; l < alpha.blocks(); ++l)
      sum += w[m] * w[l] * log1p_exp(2.0 * alpha.values(m, l));
  return 0.5 * sum;
}

namespace {

double entropic_quadratic(double a, double b, double x) {
  return a * x + b * x * x - bernoulli_entropy(x);
}

void require_finite(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x))
      throw InvalidInput("solver inputs must be finite");
}

} // namespace

UnivariateSolution maximize_entropic_quadratic(double a, double b) {
  require_finite({a, b});
  // In y = logit(x) the first-order condition is h(y) = a + 2b logistic(y) - y = 0,
  // which stays well scaled when the root sits at x ~ e^-100. h' vanishes
  // where x(1-x) = 1/(2b), so for b > 2 the line splits into three monotone
  // pieces with known ends; otherwise h is decreasing and the root is unique.
  auto h = [&](double y) { return a + 2.0 * b * logistic(y) - y; };
  const double lo = a - 2.0 * std::abs(b) - 1.0;
  const double hi = a + 2.0 * std::abs(b) + 1.0;
  std::vector<double> knots{lo};
  if (b > 2.0) {
    const double half_width = 0.5 * std::sqrt(1.0 - 2.0 / b);
    // Every root lies in [lo, hi], so clamping keeps the pieces monotone.
    knots.push_back(std::clamp(logit(0.5 - half_width), lo, hi));
    knots.push_back(std::clamp(logit(0.5 + half_width), lo, hi));
  }
  knots.push_back(hi);

  UnivariateSolution out;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double ya = knots[k];
    const double yb = knots[k + 1];
    const double ha = h(ya);
    const double hb = h(yb);
    double y;
    if (ha == 0.0)
      y = ya;
    else if (hb == 0.0 && k + 2 == knots.size())
      y = yb;
    else if ((ha > 0) != (hb > 0))
      y = detail::bisect(h, ya, yb);
    else
      continue;
    const double x = logistic(y);
    if (!out.stationary.empty() && out.stationary.back().x == x)
      continue;
    out.stationary.push_back({x, entropic_quadratic(a, b, x), 2.0 * b * x * (1.0 - x) < 1.0});
  }

  out.x_star = 0.0;
  out.value = 0.0;
  auto consider = [&](double x, double v) {
    if (v > out.value) {
      out.value = v;
      out.x_star = x;
    }
  };
  consider(1.0, a + b);
  for (const auto &p : out.stationary)
    consider(p.x, p.value);
  return out;
}

UnivariateSolution univariate_solver(double alpha, double beta) {
  // alpha x + (beta/2) x^2 - I/2 is half of (2 alpha) x + beta x^2 - I.
  UnivariateSolution s = maximize_entropic_quadratic(2.0 * alpha, beta);
  s.value *= 0.5;
  for (auto &p : s.stationary)
    p.value *= 0.5;
  return s;
}

double extreme_homophily_psi(const std::vector<double> &boundaries,
                             const std::vector<double> &diagonal_alpha, double beta) {
  if (diagonal_alpha.empty() || boundaries.size() != diagonal_alpha.size() + 1)
    throw InvalidInput("extreme homophily needs M >= 1 blocks and M+1 boundaries");
  if (boundaries.front() != 0.0 || boundaries.back() != 1.0)
    throw InvalidInput("block boundaries must start at 0 and end at 1");
  double total = 0.0;
  for (std::size_t m = 0; m < diagonal_alpha.size(); ++m) {
    const double w = boundaries[m + 1] - boundaries[m];
    if (!(w > 0.0))
      throw InvalidInput("block boundaries must be strictly increasing");
    total += w * w * univariate_solver(diagonal_alpha[m], beta * w).value;
  }
  return total;
}

const char *to_string(HessianClass c) {
  switch (c) {
  case HessianClass::kMax:
    return "max";
  case HessianClass::kSaddle:
    return "saddle";
  case HessianClass::kMin:
    return "min";
  }
  return "?";
}

double two_group_objective(double alpha1, double alpha2, double beta, double u, double v) {
  const double g = u + v;
  return 0.5 * alpha1 * u - 0.25 * bernoulli_entropy(u) + 0.5 * alpha2 * v -
         0.25 * bernoulli_entropy(v) + beta / 8.0 * g * g;
}

double two_group_gamma_equation(double alpha1, double alpha2, double beta, double gamma) {
  return logistic(2.0 * alpha1 + beta * gamma) + logistic(2.0 * alpha2 + beta * gamma) - gamma;
}

std::pair<double, double> two_group_decoupled_residuals(double alpha1, double alpha2, double beta,
                                                        double u, double v) {
  auto eq = [beta](double a_own, double a_other, double x) {
    const double partner = x / (x + std::exp(2.0 * (a_own - a_other)) * (1.0 - x));
    return a_own / 2.0 - 0.25 * logit(x) + beta / 4.0 * (x + partner);
  };
  return {eq(alpha1, alpha2, u), eq(alpha2, alpha1, v)};
}

double phase_threshold(double alpha_diff) {
  require_finite({alpha_diff});
  return 1.0 + std::cosh(alpha_diff);
}

TwoGroupSolution two_group_solve(double alpha1, double alpha2, double beta) {
  require_finite({alpha1, alpha2, beta});
  auto G = [&](double g) { return two_group_gamma_equation(alpha1, alpha2, beta, g); };
  auto dG = [&](double g) {
    const double p = logistic(2.0 * alpha1 + beta * g);
    const double q = logistic(2.0 * alpha2 + beta * g);
    return beta * (p * (1.0 - p) + q * (1.0 - q)) - 1.0;
  };

  TwoGroupSolution out;
  out.gamma_roots = detail::find_roots(G, dG, 0.0, 2.0);
  for (double g : out.gamma_roots) {
    TwoGroupPoint p;
    p.gamma = g;
    p.u = logistic(2.0 * alpha1 + beta * g);
    p.v = logistic(2.0 * alpha2 + beta * g);
    p.value = two_group_objective(alpha1, alpha2, beta, p.u, p.v);
    // 4H = [[beta - 1/u(1-u), beta], [beta, beta - 1/v(1-v)]]; its determinant
    // is positive iff beta * eta < 1, and then both diagonal entries are
    // negative, so a minimum cannot occur.
    const double eta = p.u * (1.0 - p.u) + p.v * (1.0 - p.v);
    p.hessian = beta * eta < 1.0 ? HessianClass::kMax : HessianClass::kSaddle;
    out.stationary_points.push_back(p);
  }

  double best = -std::numeric_limits<double>::infinity();
  for (const auto &p : out.stationary_points)
    best = std::max(best, p.value);
  std::vector<TwoGroupPoint> corners;
  for (double u : {0.0, 1.0})
    for (double v : {0.0, 1.0}) {
      TwoGroupPoint c;
      c.u = u;
      c.v = v;
      c.gamma = u + v;
      c.value = two_group_objective(alpha1, alpha2, beta, u, v);
      corners.push_back(c);
      best = std::max(best, c.value);
    }
  out.psi = best;
  for (const auto &p : out.stationary_points)
    if (p.hessian == HessianClass::kMax && p.value >= best - 1e-10)
      out.global_maximizers.push_back(p);
  // The entropy has infinite slope at 0 and 1, so a corner only ties when an
  // interior maximizer sits within rounding of it; report that one alone.
  for (const auto &c : corners) {
    if (c.value < best - 1e-10)
      continue;
    bool shadowed = false;
    for (const auto &p : out.global_maximizers)
      shadowed = shadowed || std::abs(p.u - c.u) + std::abs(p.v - c.v) < 1e-6;
    if (!shadowed)
      out.global_maximizers.push_back(c);
  }

  out.beta_threshold = phase_threshold(alpha1 - alpha2);
  out.phase_transition =
      std::abs(alpha1 + alpha2 + beta) <= 1e-12 && beta > out.beta_threshold;
  return out;
}

namespace {

struct AscentOutcome {
  Eigen::MatrixXd u;
  double value = -std::numeric_limits<double>::infinity();
};

double lower_functional(const Eigen::MatrixXd &u, const Eigen::MatrixXd &alpha,
                        const std::vector<double> &w, double beta) {
  const int M = static_cast<int>(u.rows());
  double total = 0.0;
  for (int m = 0; m < M; ++m) {
    double lin = 0.0;
    double row = 0.0;
    double ent = 0.0;
    for (int l = 0; l < M; ++l) {
      lin += w[l] * alpha(m, l) * u(m, l);
      row += w[l] * u(m, l);
      ent += w[l] * bernoulli_entropy(u(m, l));
    }
    total += w[m] * (lin + 0.5 * beta * row * row - 0.5 * ent);
  }
  return total;
}

AscentOutcome symmetric_ascent(Eigen::MatrixXd u, const Eigen::MatrixXd &alpha,
                               const std::vector<double> &w, double beta) {
  const int M = static_cast<int>(u.rows());
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double change = 0.0;
    for (int m = 0; m < M; ++m)
      for (int l = m; l < M; ++l) {
        // The functional restricted to x = u_ml = u_lm is, up to a positive
        // factor, a x + b x^2 - I(x) with the coefficients below.
        double rm = 0.0;
        double rl = 0.0;
        for (int k = 0; k < M; ++k) {
          rm += w[k] * u(m, k);
          rl += w[k] * u(l, k);
        }
        double a;
        double b;
        if (m == l) {
          const double r0 = rm - w[m] * u(m, m);
          a = 2.0 * alpha(m, m) + 2.0 * beta * r0;
          b = beta * w[m];
        } else {
          a = 2.0 * alpha(m, l) + beta * (rm - w[l] * u(m, l) + rl - w[m] * u(l, m));
          b = 0.5 * beta * (w[m] + w[l]);
        }
        const double x = maximize_entropic_quadratic(a, b).x_star;
        change = std::max(change, std::abs(x - u(m, l)));
        u(m, l) = x;
        u(l, m) = x;
      }
    if (change < 1e-14)
      break;
  }
  AscentOutcome out;
  out.value = lower_functional(u, alpha, w, beta);
  out.u = std::move(u);
  return out;
}

// sup over one unconstrained row: every stationary point has
// u_l = logistic(2 alpha_ml + 2 beta s) with s = sum_l w_l u_l, so the row
// reduces to the scalar roots of s -> sum_l w_l logistic(2 alpha_ml + 2 beta s) - s.
double row_supremum(const Eigen::VectorXd &alpha_row, const std::vector<double> &w, double beta) {
  const int M = static_cast<int>(alpha_row.size());
  auto row_value = [&](double s) {
    double lin = 0.0;
    double row = 0.0;
    double ent = 0.0;
    for (int l = 0; l < M; ++l) {
      const double x = logistic(2.0 * alpha_row[l] + 2.0 * beta * s);
      lin += w[l] * alpha_row[l] * x;
      row += w[l] * x;
      ent += w[l] * bernoulli_entropy(x);
    }
    return lin + 0.5 * beta * row * row - 0.5 * ent;
  };
  auto f = [&](double s) {
    double t = -s;
    for (int l = 0; l < M; ++l)
      t += w[l] * logistic(2.0 * alpha_row[l] + 2.0 * beta * s);
    return t;
  };
  auto df = [&](double s) {
    double t = -1.0;
    for (int l = 0; l < M; ++l) {
      const double x = logistic(2.0 * alpha_row[l] + 2.0 * beta * s);
      t += 2.0 * beta * w[l] * x * (1.0 - x);
    }
    return t;
  };
  double best = -std::numeric_limits<double>::infinity();
  for (double s : detail::find_roots(f, df, 0.0, 1.0))
    best = std::max(best, row_value(s));
  // Vertices of the cube, in case a parameterization pins the row there.
  if (M <= 12) {
    for (unsigned mask = 0; mask < (1u << M); ++mask) {
      double lin = 0.0;
      double row = 0.0;
      for (int l = 0; l < M; ++l)
        if (mask >> l & 1u) {
          lin += w[l] * alpha_row[l];
          row += w[l];
        }
      best = std::max(best, lin + 0.5 * beta * row * row);
    }
  }
  return best;
}

} // namespace

BlockBounds block_bounds(const BlockAlpha &alpha, double beta, int multistarts,
                         std::uint64_t seed) {
  validate(AlphaSpec{alpha});
  require_finite({beta});
  if (multistarts < 1)
    throw InvalidInput("block_bounds needs at least one start");
  const int M = alpha.blocks();
  const auto w = alpha.widths();

  std::vector<AscentOutcome> outcomes(static_cast<std::size_t>(multistarts));
  parallel_for(outcomes.size(), [&](std::size_t r) {
    Eigen::MatrixXd u(M, M);
    if (r == 0) {
      for (int m = 0; m < M; ++m)
        for (int l = 0; l < M; ++l)
          u(m, l) = logistic(2.0 * alpha.values(m, l));
    } else if (r == 1 || r == 2) {
      u.setConstant(r == 1 ? 0.05 : 0.95);
    } else {
      Rng rng(derive_seed(seed, r));
      for (int m = 0; m < M; ++m)
        for (int l = m; l < M; ++l) {
          const double x = rng.uniform();
          u(m, l) = x;
          u(l, m) = x;
        }
    }
    outcomes[r] = symmetric_ascent(std::move(u), alpha.values, w, beta);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r)
    if (outcomes[r].value > outcomes[best].value)
      best = r;

  BlockBounds out;
  out.lower = outcomes[best].value;
  out.argmax_lower.boundaries = alpha.boundaries;
  out.argmax_lower.values = std::move(outcomes[best].u);
  for (int m = 0; m < M; ++m)
    out.upper += w[m] * row_supremum(alpha.values.row(m).transpose(), w, beta);
  return out;
}

double euler_lagrange_residual(const BlockGraphon &h, const BlockAlpha &alpha, double beta) {
  h.validate();
  validate(AlphaSpec{alpha});
  const int M = static_cast<int>(h.values.rows());
  if (alpha.blocks() != M || alpha.boundaries != h.boundaries)
    throw InvalidInput("graphon and alpha use different block partitions");
  const auto w = h.widths();
  std::vector<double> r(M, 0.0);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < M; ++k)
      r[m] += w[k] * h.values(m, k);
  double worst = 0.0;
  for (int m = 0; m < M; ++m)
    for (int l = 0; l < M; ++l) {
      const double u = h.values(m, l);
      if (u <= 0.0 || u >= 1.0)
        throw InvalidInput("Euler-Lagrange residual is undefined at block (" +
                           std::to_string(m) + ", " + std::to_string(l) +
                           "): value on the boundary of [0,1]");
      worst = std::max(worst,
                       std::abs(2.0 * alpha.values(m, l) + beta * (r[m] + r[l]) - logit(u)));
    }
  return worst;
}

} // namespace ergm
