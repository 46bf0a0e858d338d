#include "ergm_varest/errors.hpp"
#include "ergm_varest/experiments.hpp"
#include "ergm_varest/parallel.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ergm;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = 14;
  c.replications = 6;
  c.seed = 21;
  c.chain.burn_in = 20 * 14 * 14;
  c.methods = {Method::kMPLE, Method::kMFMLE};
  c.mf.inner.keep_trace = false;
  c.mf.max_iterations = 200;
  return c;
}

void check_ordered(const Percentiles &p) {
  CHECK(p.p5 <= p.p25);
  CHECK(p.p25 <= p.median);
  CHECK(p.median <= p.p75);
  CHECK(p.p75 <= p.p95);
}

} // namespace

TEST_CASE("type-7 quantiles") {
  // R: quantile(c(3, 1, 4, 1, 5), c(.05, .25, .5, .75, .95)) = 1, 1, 3, 4, 4.8
  const std::vector<double> x{3, 1, 4, 1, 5};
  CHECK(quantile(x, 0.05) == doctest::Approx(1.0));
  CHECK(quantile(x, 0.25) == doctest::Approx(1.0));
  CHECK(quantile(x, 0.5) == doctest::Approx(3.0));
  CHECK(quantile(x, 0.75) == doctest::Approx(4.0));
  CHECK(quantile(x, 0.95) == doctest::Approx(4.8));
  // quantile(1:10, .05) = 1.45
  std::vector<double> y(10);
  for (int k = 0; k < 10; ++k)
    y[k] = k + 1;
  CHECK(quantile(y, 0.05) == doctest::Approx(1.45));
  CHECK(quantile({7.5}, 0.95) == 7.5);
  CHECK_THROWS_AS(quantile({}, 0.5), InvalidInput);
}

TEST_CASE("experiment config validation") {
  ExperimentConfig c;
  c.replications = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.replications = 1;
  c.n = 9;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.n = 10;
  c.methods = {Method::kMPLE, Method::kMPLE};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.methods = {};
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("single replication collapses every percentile") {
  auto c = small_config();
  c.replications = 1;
  c.methods = {Method::kMPLE};
  const auto t = run_experiment(c);
  const auto &s = t.at(Method::kMPLE);
  REQUIRE(s.converged == 1);
  for (int k = 0; k < 3; ++k) {
    const auto &p = s.params[k];
    const double v = s.runs.front().theta_hat[k];
    CHECK(p.median == v);
    CHECK(p.p5 == v);
    CHECK(p.p25 == v);
    CHECK(p.p75 == v);
    CHECK(p.p95 == v);
  }
}

TEST_CASE("experiments are reproducible and independent of the thread count") {
  const auto c = small_config();
  set_max_threads(1);
  const auto a = run_experiment(c);
  set_max_threads(3);
  const auto b = run_experiment(c);
  set_max_threads(0);
  std::ostringstream sa, sb;
  write_percentile_csv(sa, a);
  write_percentile_csv(sb, b);
  CHECK(sa.str() == sb.str());
  for (const auto &s : a.methods) {
    CHECK(s.converged + s.nonconverged == c.replications);
    for (const auto &p : s.params)
      check_ordered(p);
  }
  // A different seed gives different data.
  auto d = c;
  d.seed = 22;
  CHECK(run_experiment(d).at(Method::kMPLE).params[0].median !=
        a.at(Method::kMPLE).params[0].median);
}

TEST_CASE("experiment fails when a method never converges") {
  auto c = small_config();
  c.replications = 2;
  c.methods = {Method::kMFMLE};
  c.mf.bound = 1e-3; // every start sits on the box
  CHECK_THROWS_AS(run_experiment(c), NonConvergence);
}

TEST_CASE("percentile csv layout") {
  auto c = small_config();
  c.replications = 3;
  c.methods = {Method::kMPLE};
  std::ostringstream out;
  write_percentile_csv(out, run_experiment(c));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "method,param,median,p5,p25,p75,p95,n_nonconverged");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("MPLE,", 0) == 0);
  }
  CHECK(rows == 3);
}

TEST_CASE("phase diagram sweep") {
  SUBCASE("published examples") {
    const auto pts = phase_diagram_sweep({-2.0, 0.0}, {4.0});
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].maximizers.size() == 1);
    CHECK(pts[1].maximizers.size() == 2);
    for (const auto &p : pts)
      CHECK(p.alpha1 + p.alpha2 + p.beta == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("two maximizers beyond the threshold, unique below it for small gaps") {
    std::vector<double> diffs, betas;
    for (int k = 0; k < 9; ++k)
      diffs.push_back(-2.0 + 0.5 * k);
    for (int k = 0; k < 40; ++k)
      betas.push_back(0.1 + 0.2 * k);
    const auto pts = phase_diagram_sweep(diffs, betas);
    for (std::size_t d = 0; d < diffs.size(); ++d) {
      const double thr = phase_threshold(diffs[d]);
      for (std::size_t b = 0; b < betas.size(); ++b) {
        const auto &p = pts[d * betas.size() + b];
        CHECK(p.alpha_diff == diffs[d]);
        CHECK(p.beta == betas[b]);
        if (p.beta > thr)
          CHECK(p.maximizers.size() == 2);
        else if (std::abs(diffs[d]) <= 1.0)
          CHECK(p.maximizers.size() == 1);
      }
    }
  }
  SUBCASE("large gaps switch before the stability threshold") {
    // At |alpha_diff| = 2 the symmetric pair overtakes the central point
    // near beta = 4.21 while the central point is still a local maximum.
    const double thr = phase_threshold(2.0);
    for (double d : {-2.0, 2.0}) {
      CHECK(phase_diagram_sweep({d}, {4.1})[0].maximizers.size() == 1);
      const auto p = phase_diagram_sweep({d}, {4.3})[0];
      CHECK(p.beta < thr);
      REQUIRE(p.maximizers.size() == 2);
      CHECK(p.maximizers[0].u == doctest::Approx(1 - p.maximizers[1].v).epsilon(1e-9));
      const auto central = two_group_solve(p.alpha1, p.alpha2, p.beta);
      bool central_is_local_max = false;
      for (const auto &s : central.stationary_points)
        if (std::abs(s.gamma - 1.0) < 1e-9)
          central_is_local_max = s.hessian == HessianClass::kMax && s.value < p.psi - 1e-3;
      CHECK(central_is_local_max);
    }
  }
  CHECK_THROWS_AS(phase_diagram_sweep({}, {1.0}), InvalidInput);
  std::ostringstream out;
  write_phase_csv(out, phase_diagram_sweep({0.0}, {1.0, 4.0}));
  CHECK(out.str().find("alpha_diff,beta,alpha1,alpha2,threshold,count,psi,u1,v1,u2,v2\n") == 0);
}
