#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace ergm::detail {

/// Bisection to full double precision on a bracket with f(lo), f(hi) of
/// opposite signs.
template <class F> double bisect(F &&f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    const double fm = f(mid);
    if (fm == 0.0)
      return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// All roots of a smooth f on [lo, hi]. The interval is scanned on a uniform
/// grid; sign changes of df split it into monotone pieces (so two roots in
/// one grid cell around a shallow extremum are still separated), and each
/// piece with a sign change of f is bisected. Touching roots with
/// |f| <= touch_tol at a critical point are reported once.
inline std::vector<double> find_roots(const std::function<double(double)> &f,
                                      const std::function<double(double)> &df, double lo,
                                      double hi, int grid = 10000, double touch_tol = 1e-14) {
  std::vector<double> knots{lo};
  const double step = (hi - lo) / grid;
  double prev_x = lo;
  double prev_d = df(lo);
  for (int k = 1; k <= grid; ++k) {
    const double x = k == grid ? hi : lo + k * step;
    const double d = df(x);
    if (d == 0.0) {
      knots.push_back(x);
    } else if (prev_d != 0.0 && (d > 0) != (prev_d > 0)) {
      knots.push_back(bisect(df, prev_x, x));
    }
    prev_x = x;
    prev_d = d;
  }
  if (knots.back() < hi)
    knots.push_back(hi);

  std::vector<double> roots;
  auto push = [&](double r) {
    if (roots.empty() || std::abs(roots.back() - r) > 1e-15 * (1.0 + std::abs(r)))
      roots.push_back(r);
  };
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k];
    const double b = knots[k + 1];
    const double fa = f(a);
    const double fb = f(b);
    if (fa == 0.0) {
      push(a);
      continue;
    }
    if (k > 0 && std::abs(fa) <= touch_tol) {
      push(a);
      continue;
    }
    if ((fa > 0) != (fb > 0) && fb != 0.0)
      push(bisect(f, a, b));
  }
  const double fhi = f(hi);
  if (fhi == 0.0)
    push(hi);
  return roots;
}

} // namespace ergm::detail
