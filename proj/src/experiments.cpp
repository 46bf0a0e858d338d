#include "ergm_varest/experiments.hpp"

#include "ergm_varest/errors.hpp"
#include "ergm_varest/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>

namespace ergm {

void ExperimentConfig::validate() const {
  if (replications < 1)
    throw InvalidInput("replications must be at least 1");
  if (n < 10)
    throw InvalidInput("experiments need n >= 10, got " + std::to_string(n));
  if (!true_theta.allFinite())
    throw InvalidInput("true theta must be finite");
  if (methods.empty())
    throw InvalidInput("no estimation method selected");
  if (std::set<Method>(methods.begin(), methods.end()).size() != methods.size())
    throw InvalidInput("duplicate estimation method");
  chain.burn_in_for(n);
  chain.thin_for(n);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty())
    throw InvalidInput("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Percentiles Percentiles::of(const std::vector<double> &values) {
  return {quantile(values, 0.5), quantile(values, 0.05), quantile(values, 0.25),
          quantile(values, 0.75), quantile(values, 0.95)};
}

const MethodSummary &PercentileTable::at(Method m) const {
  for (const auto &s : methods)
    if (s.method == m)
      return s;
  throw InvalidInput(std::string("method not in table: ") + to_string(m));
}

namespace {

/// Stream indices under a replication seed.
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kMcStream = 1;

EstimationResult estimate_one(Method m, const Graph &g, const NodeTypes &types,
                              const ExperimentConfig &config, std::uint64_t rep_seed) {
  try {
    switch (m) {
    case Method::kMPLE:
      return mple(g, types);
    case Method::kMFMLE:
      return mf_mle(g, types, config.mf);
    case Method::kMCMLE: {
      Theta theta0 = Theta::Zero();
      try {
        const auto start = mple(g, types);
        if (start.theta_hat.allFinite())
          theta0 = start.theta_hat;
      } catch (const SeparationError &) {
      }
      McMleOptions o = config.mc;
      o.chain.seed = derive_seed(rep_seed, kMcStream);
      return mc_mle(g, types, theta0, o);
    }
    }
  } catch (const SeparationError &e) {
    EstimationResult failed;
    failed.method = m;
    failed.theta_hat.setConstant(std::nan(""));
    failed.message = e.what();
    return failed;
  }
  throw InvalidInput("unknown method");
}

} // namespace

PercentileTable run_experiment(const ExperimentConfig &config) {
  config.validate();
  const int n = config.n;
  const auto types = NodeTypes::balanced(n);
  const auto params = parametric_params(config.true_theta);
  const std::size_t k = config.methods.size();

  std::vector<std::vector<EstimationResult>> runs(
      static_cast<std::size_t>(config.replications));
  parallel_for(runs.size(), [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(config.seed, rep);
    ChainConfig chain = config.chain;
    chain.seed = derive_seed(rep_seed, kDataStream);
    const Graph g = sample_chain(chain, UniformMeeting{}, types, params, n, 1).samples.front();
    runs[rep].reserve(k);
    for (Method m : config.methods)
      runs[rep].push_back(estimate_one(m, g, types, config, rep_seed));
  });

  PercentileTable table;
  for (std::size_t j = 0; j < k; ++j) {
    MethodSummary s;
    s.method = config.methods[j];
    std::array<std::vector<double>, 3> kept;
    for (auto &rep : runs) {
      auto &r = rep[j];
      if (r.converged && r.theta_hat.allFinite()) {
        ++s.converged;
        for (int c = 0; c < 3; ++c)
          kept[c].push_back(r.theta_hat[c]);
      } else {
        ++s.nonconverged;
      }
      s.runs.push_back(std::move(r));
    }
    if (s.converged == 0)
      throw NonConvergence(std::string(to_string(s.method)) + " did not converge in any of " +
                           std::to_string(config.replications) + " replications");
    for (int c = 0; c < 3; ++c)
      s.params[c] = Percentiles::of(kept[c]);
    table.methods.push_back(std::move(s));
  }
  return table;
}

void write_percentile_csv(std::ostream &out, const PercentileTable &table) {
  static const char *names[] = {"theta_edge", "theta_match", "beta"};
  out << "method,param,median,p5,p25,p75,p95,n_nonconverged\n";
  out << std::setprecision(10);
  for (const auto &s : table.methods)
    for (int c = 0; c < 3; ++c) {
      const auto &p = s.params[c];
      out << to_string(s.method) << ',' << names[c] << ',' << p.median << ',' << p.p5 << ','
          << p.p25 << ',' << p.p75 << ',' << p.p95 << ',' << s.nonconverged << '\n';
    }
}

std::vector<PhasePoint> phase_diagram_sweep(const std::vector<double> &alpha_diff_grid,
                                            const std::vector<double> &beta_grid) {
  if (alpha_diff_grid.empty() || beta_grid.empty())
    throw InvalidInput("phase sweep grids must be non-empty");
  const std::size_t nb = beta_grid.size();
  std::vector<PhasePoint> out(alpha_diff_grid.size() * nb);
  parallel_for(out.size(), [&](std::size_t idx) {
    PhasePoint &p = out[idx];
    p.alpha_diff = alpha_diff_grid[idx / nb];
    p.beta = beta_grid[idx % nb];
    p.alpha1 = 0.5 * (p.alpha_diff - p.beta);
    p.alpha2 = 0.5 * (-p.alpha_diff - p.beta);
    p.threshold = phase_threshold(p.alpha_diff);
    const auto sol = two_group_solve(p.alpha1, p.alpha2, p.beta);
    p.psi = sol.psi;
    p.maximizers = sol.global_maximizers;
  });
  return out;
}

void write_phase_csv(std::ostream &out, const std::vector<PhasePoint> &points) {
  out << "alpha_diff,beta,alpha1,alpha2,threshold,count,psi,u1,v1,u2,v2\n";
  out << std::setprecision(10);
  for (const auto &p : points) {
    out << p.alpha_diff << ',' << p.beta << ',' << p.alpha1 << ',' << p.alpha2 << ','
        << p.threshold << ',' << p.maximizers.size() << ',' << p.psi;
    for (std::size_t m = 0; m < 2; ++m) {
      if (m < p.maximizers.size())
        out << ',' << p.maximizers[m].u << ',' << p.maximizers[m].v;
      else
        out << ",,";
    }
    out << '\n';
  }
}

} // namespace ergm
