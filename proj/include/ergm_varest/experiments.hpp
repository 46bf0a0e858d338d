#pragma once

#include "ergm_varest/estimation.hpp"
#include "ergm_varest/graphon.hpp"
#include "ergm_varest/sampler.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ergm {

struct ExperimentConfig {
  Theta true_theta{-2.0, 1.0, 2.0};
  int n = 50;
  int replications = 100;
  std::vector<Method> methods{Method::kMPLE, Method::kMFMLE};
  ChainConfig chain;      ///< data-generating chain; its seed is replaced per replication
  std::uint64_t seed = 1;
  MfMleOptions mf;
  McMleOptions mc;        ///< chain seed replaced per replication, theta0 = MPLE

  /// Throws InvalidInput unless replications >= 1, n >= 10 and methods are
  /// non-empty and distinct.
  void validate() const;
};

/// Linear-interpolation quantile (R type 7) of unsorted data.
double quantile(std::vector<double> values, double p);

struct Percentiles {
  double median = 0, p5 = 0, p25 = 0, p75 = 0, p95 = 0;

  static Percentiles of(const std::vector<double> &values);
};

struct MethodSummary {
  Method method = Method::kMPLE;
  std::array<Percentiles, 3> params; ///< theta_edge, theta_match, beta
  int converged = 0;
  int nonconverged = 0;
  /// One entry per replication, in replication order.
  std::vector<EstimationResult> runs;
};

struct PercentileTable {
  std::vector<MethodSummary> methods;

  const MethodSummary &at(Method m) const;
};

/// Samples one network per replication at true_theta (seed derived from
/// (seed, replication)), runs each method and summarizes the converged
/// estimates. Replications run concurrently; the table does not depend on
/// the thread count. Throws NonConvergence when some method never converges.
PercentileTable run_experiment(const ExperimentConfig &config);

/// Columns: method,param,median,p5,p25,p75,p95,n_nonconverged.
void write_percentile_csv(std::ostream &out, const PercentileTable &table);

struct PhasePoint {
  double alpha_diff = 0.0;
  double beta = 0.0;
  double alpha1 = 0.0; ///< within-group, (alpha_diff - beta) / 2
  double alpha2 = 0.0; ///< across-group, (-alpha_diff - beta) / 2
  double threshold = 0.0;
  double psi = 0.0;
  std::vector<TwoGroupPoint> maximizers;
};

/// two_group_solve on the plane alpha1 + alpha2 + beta = 0 for every grid pair
/// (alpha_diff outer, beta inner). Throws InvalidInput on an empty grid.
std::vector<PhasePoint> phase_diagram_sweep(const std::vector<double> &alpha_diff_grid,
                                            const std::vector<double> &beta_grid);

/// Columns: alpha_diff,beta,alpha1,alpha2,threshold,count,psi,u1,v1,u2,v2
/// (second maximizer blank when unique).
void write_phase_csv(std::ostream &out, const std::vector<PhasePoint> &points);

} // namespace ergm
