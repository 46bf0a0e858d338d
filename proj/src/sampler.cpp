#include "ergm_varest/sampler.hpp"

#include "ergm_varest/errors.hpp"
#include "ergm_varest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ergm {

void validate(const MeetingKernel &kernel, int n) {
  if (const auto *w = std::get_if<WeightedMeeting>(&kernel)) {
    if (w->rho.rows() != n || w->rho.cols() != n)
      throw InvalidInput("meeting weights must be " + std::to_string(n) + "x" +
                         std::to_string(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j)
          continue;
        const double r = w->rho(i, j);
        if (!std::isfinite(r) || !(r > 0.0))
          throw InvalidInput("meeting weights must be finite and strictly positive");
        if (r != w->rho(j, i))
          throw InvalidInput("meeting weights must be symmetric");
      }
  }
}

PairSampler::PairSampler(const MeetingKernel &kernel, int n)
    : n_(n), uniform_(std::holds_alternative<UniformMeeting>(kernel)) {
  if (n < 2)
    throw InvalidInput("a meeting needs at least two nodes");
  validate(kernel, n);
  const std::size_t count = static_cast<std::size_t>(n) * (n - 1) / 2;
  pairs_.reserve(count);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      pairs_.emplace_back(i, j);
  if (!uniform_) {
    const auto &rho = std::get<WeightedMeeting>(kernel).rho;
    cumulative_.reserve(count);
    double total = 0.0;
    for (const auto &[i, j] : pairs_) {
      total += rho(i, j);
      cumulative_.push_back(total);
    }
    for (double &c : cumulative_)
      c /= total;
    cumulative_.back() = 1.0;
  }
}

std::pair<int, int> PairSampler::draw(Rng &rng) const {
  if (uniform_)
    return pairs_[rng.below(pairs_.size())];
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return pairs_[static_cast<std::size_t>(std::min<std::ptrdiff_t>(
      it - cumulative_.begin(), static_cast<std::ptrdiff_t>(pairs_.size()) - 1))];
}

double PairSampler::probability(int i, int j) const {
  if (i > j)
    std::swap(i, j);
  if (i < 0 || j >= n_ || i == j)
    throw InvalidInput("pair out of range");
  if (uniform_)
    return 1.0 / static_cast<double>(pairs_.size());
  // Lexicographic index of (i, j).
  const std::size_t k = static_cast<std::size_t>(i) * (2 * n_ - i - 1) / 2 + (j - i - 1);
  return cumulative_[k] - (k > 0 ? cumulative_[k - 1] : 0.0);
}

long long ChainConfig::burn_in_for(int n) const {
  const long long v = burn_in.value_or(500LL * n * n);
  if (v < 0)
    throw InvalidInput("burn_in must be >= 0");
  return v;
}

long long ChainConfig::thin_for(int n) const {
  const long long v = thin.value_or(100LL * n * n);
  if (v < 1)
    throw InvalidInput("thin must be >= 1");
  return v;
}

std::pair<int, int> glauber_step(Graph &g, const PairSampler &pairs, const ResolvedModel &model,
                                 Rng &rng) {
  const auto [i, j] = pairs.draw(rng);
  g.set_edge(i, j, rng.bernoulli(logistic(model.potential_difference(g, i, j))));
  return {i, j};
}

Graph glauber_step(const Graph &g, const MeetingKernel &kernel, const NodeTypes &types,
                   const ModelParams &params, Rng &rng) {
  Graph out = g;
  glauber_step(out, PairSampler(kernel, g.size()), ResolvedModel(params, types, g.size()), rng);
  return out;
}

namespace {

Graph initial_graph(const InitialState &init, int n, Rng &rng) {
  switch (init.kind) {
  case InitialState::Kind::kEmpty:
    return Graph(n);
  case InitialState::Kind::kFull:
    return Graph::complete(n);
  case InitialState::Kind::kRandom: {
    if (!(init.p >= 0.0 && init.p <= 1.0))
      throw InvalidInput("random initial state needs p in [0,1]");
    Graph g(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.bernoulli(init.p))
          g.set_edge(i, j, true);
    return g;
  }
  case InitialState::Kind::kGraph:
    if (!init.graph || init.graph->size() != n)
      throw InvalidInput("initial graph is missing or has the wrong size");
    return *init.graph;
  }
  throw InvalidInput("unknown initial state");
}

TraceRow trace_row(const Graph &g, const NodeTypes &types, long long step) {
  TraceRow row;
  row.step = step;
  row.edges = g.edge_count();
  for (int d : g.degrees())
    row.twostar_sum += static_cast<long long>(d) * d;
  if (types.size() == g.size()) {
    const int n = g.size();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (types.same(i, j) && g.has_edge(i, j))
          ++row.match_edges;
  }
  return row;
}

} // namespace

ChainRun sample_chain(const ChainConfig &config, const MeetingKernel &kernel,
                      const NodeTypes &types, const ModelParams &params, int n, int count) {
  if (count < 1)
    throw InvalidInput("sample_chain needs count >= 1");
  const long long burn = config.burn_in_for(n);
  const long long thin = config.thin_for(n);
  const ResolvedModel model(params, types, n);
  const PairSampler pairs(kernel, n);
  Rng rng(config.seed);
  Graph g = initial_graph(config.initial, n, rng);

  ChainRun run;
  run.samples.reserve(static_cast<std::size_t>(count));
  long long step = 0;
  for (; step < burn; ++step)
    glauber_step(g, pairs, model, rng);
  for (int s = 0; s < count; ++s) {
    if (s > 0)
      for (long long t = 0; t < thin; ++t, ++step)
        glauber_step(g, pairs, model, rng);
    run.samples.push_back(g);
    run.trace.push_back(trace_row(g, types, step));
  }
  return run;
}

StationaryComparison exact_stationary_distribution(int n, const MeetingKernel &kernel,
                                                   const NodeTypes &types,
                                                   const ModelParams &params) {
  if (n < 2)
    throw InvalidInput("the chain needs n >= 2");
  if (n > kExactChainMaxNodes)
    throw ResourceLimit("exact transition matrix is limited to n <= " +
                        std::to_string(kExactChainMaxNodes) + ", got n=" + std::to_string(n));
  const ResolvedModel model(params, types, n);
  const PairSampler pairs(kernel, n);
  const int npairs = n * (n - 1) / 2;
  const int states = 1 << npairs;

  StationaryComparison out;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(states, states);
  std::vector<double> q(states);
  for (int code = 0; code < states; ++code) {
    const Graph g = graph_from_code(n, static_cast<unsigned long long>(code));
    q[code] = model.potential(g);
    int bit = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++bit) {
        const double meet = pairs.probability(i, j);
        const double on = logistic(model.potential_difference(g, i, j));
        const int with = code | (1 << bit);
        const int without = code & ~(1 << bit);
        P(code, with) += meet * on;
        P(code, without) += meet * (1.0 - on);
      }
  }

  // pi (P - I) = 0 with sum(pi) = 1: replace one equation by the normalization.
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(states, states);
  A.row(states - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(states);
  b[states - 1] = 1.0;
  const Eigen::VectorXd pi = A.fullPivLu().solve(b);

  const double qmax = *std::max_element(q.begin(), q.end());
  double z = 0.0;
  for (double v : q)
    z += std::exp(v - qmax);
  out.from_transition.resize(states);
  out.from_potential.resize(states);
  for (int s = 0; s < states; ++s) {
    out.from_transition[s] = pi[s];
    out.from_potential[s] = std::exp(q[s] - qmax) / z;
    out.max_discrepancy =
        std::max(out.max_discrepancy, std::abs(out.from_transition[s] - out.from_potential[s]));
  }
  out.transition = std::move(P);
  return out;
}

} // namespace ergm
