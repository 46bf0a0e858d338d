#pragma once

#include "ergm_varest/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ergm {

/// Piecewise-constant graphon: u(x, y) = values(m, l) on block m x block l.
struct BlockGraphon {
  std::vector<double> boundaries;
  Eigen::MatrixXd values;

  std::vector<double> widths() const;
  /// Throws InvalidInput unless boundaries increase from 0 to 1 and the
  /// values are symmetric and inside [0,1].
  void validate() const;
};

/// Graphon limit of psi at beta = 0: (1/2) sum_{m,l} w_m w_l log(1 + e^{2 alpha_ml}).
double psi_beta_zero(const BlockAlpha &alpha);

struct ScalarStationaryPoint {
  double x = 0.0;
  double value = 0.0;
  bool local_max = false; ///< strict second-order condition
};

struct UnivariateSolution {
  double x_star = 0.0;
  double value = 0.0;
  std::vector<ScalarStationaryPoint> stationary; ///< increasing in x
};

/// sup over x in [0,1] of  a x + b x^2 - I(x).
/// Stationary points solve x = logistic(a + 2 b x). They are bracketed on the
/// (at most three) monotone pieces of that equation in logit space and
/// bisected to full precision; the endpoints are compared as well.
UnivariateSolution maximize_entropic_quadratic(double a, double b);

/// Single-group graphon problem sup_x { alpha x + (beta/2) x^2 - I(x)/2 }.
/// Stationary points satisfy x = logistic(2 alpha + 2 beta x); a point is a
/// strict local maximum when 2 beta x (1 - x) < 1.
UnivariateSolution univariate_solver(double alpha, double beta);

/// Limit of psi when cross-block alpha -> -infinity: the groups decouple into
/// sum_m w_m^2 sup_x { alpha_mm x + (beta w_m / 2) x^2 - I(x)/2 }.
/// The w_m inside the quadratic term is the within-block degree share.
double extreme_homophily_psi(const std::vector<double> &boundaries,
                             const std::vector<double> &diagonal_alpha, double beta);

enum class HessianClass { kMax, kSaddle, kMin };

const char *to_string(HessianClass c);

struct TwoGroupPoint {
  double gamma = 0.0; ///< u + v
  double u = 0.0;     ///< within-group link probability
  double v = 0.0;     ///< across-group link probability
  double value = 0.0; ///< F(u, v)
  HessianClass hessian = HessianClass::kMax;
};

struct TwoGroupSolution {
  std::vector<double> gamma_roots;
  std::vector<TwoGroupPoint> stationary_points;
  std::vector<TwoGroupPoint> global_maximizers;
  double psi = 0.0;
  bool phase_transition = false;
  double beta_threshold = 0.0;
};

/// F(u,v) = (a1/2) u - I(u)/4 + (a2/2) v - I(v)/4 + (beta/8)(u + v)^2.
double two_group_objective(double alpha1, double alpha2, double beta, double u, double v);

/// G(gamma) = logistic(2 a1 + beta gamma) + logistic(2 a2 + beta gamma) - gamma.
double two_group_gamma_equation(double alpha1, double alpha2, double beta, double gamma);

/// Residuals of the decoupled first-order conditions, one equation in u and
/// one in v.
std::pair<double, double> two_group_decoupled_residuals(double alpha1, double alpha2, double beta,
                                                        double u, double v);

/// Two equal-size groups with within-group alpha1 and across-group alpha2.
/// Finds every root of G on [0,2], maps it to (u, v), classifies it with the
/// Hessian (eta = u(1-u) + v(1-v) against 1/beta), and selects the global
/// maximizers of F over the stationary points and the corners of [0,1]^2.
TwoGroupSolution two_group_solve(double alpha1, double alpha2, double beta);

/// beta above which two maximizers appear on the plane alpha1 + alpha2 + beta = 0:
/// (1 + e^d)^2 / (2 e^d) = 1 + cosh(d), d = alpha1 - alpha2.
double phase_threshold(double alpha_diff);

struct BlockBounds {
  double lower = 0.0;
  double upper = 0.0;
  BlockGraphon argmax_lower;
};

/// Finite-dimensional sandwich for the graphon problem with block alpha.
/// lower: symmetric block graphon, coordinate ascent with exact coordinate
/// maximization, best of `multistarts` starts.
/// upper: sum_m w_m times the global row supremum without symmetry, each row
/// reduced to a scalar equation in its weighted row sum.
BlockBounds block_bounds(const BlockAlpha &alpha, double beta, int multistarts = 16,
                         std::uint64_t seed = 0);

/// max over blocks of |2 alpha_ml + beta (r_m + r_l) - logit(u_ml)|, with
/// r_m = sum_k w_k u_mk. Throws InvalidInput when an entry is 0 or 1.
double euler_lagrange_residual(const BlockGraphon &h, const BlockAlpha &alpha, double beta);

} // namespace ergm
