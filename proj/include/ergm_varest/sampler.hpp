#pragma once

#include "ergm_varest/graph.hpp"
#include "ergm_varest/model.hpp"
#include "ergm_varest/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace ergm {

struct UniformMeeting {};

/// Pair (i, j) is met with probability proportional to rho(i, j).
struct WeightedMeeting {
  Eigen::MatrixXd rho;
};

using MeetingKernel = std::variant<UniformMeeting, WeightedMeeting>;

/// Throws InvalidInput unless the weights are symmetric, finite and strictly
/// positive off the diagonal for an n-node network.
void validate(const MeetingKernel &kernel, int n);

/// Draws pairs i < j from a meeting kernel in O(log n^2).
class PairSampler {
public:
  PairSampler(const MeetingKernel &kernel, int n);
  std::pair<int, int> draw(Rng &rng) const;
  /// Probability that pair (i, j) meets in one period.
  double probability(int i, int j) const;

private:
  int n_;
  bool uniform_;
  std::vector<double> cumulative_; // over pairs in lexicographic order
  std::vector<std::pair<int, int>> pairs_;
};

struct InitialState {
  enum class Kind { kEmpty, kFull, kRandom, kGraph };
  Kind kind = Kind::kEmpty;
  double p = 0.5;             ///< link probability for kRandom
  std::optional<Graph> graph; ///< for kGraph

  static InitialState empty() { return {}; }
  static InitialState full() { return {Kind::kFull, 0.5, std::nullopt}; }
  static InitialState random(double p) { return {Kind::kRandom, p, std::nullopt}; }
  static InitialState from(Graph g) { return {Kind::kGraph, 0.5, std::move(g)}; }
};

struct ChainConfig {
  /// Unset: 500 n^2 steps.
  std::optional<long long> burn_in;
  /// Unset: 100 n^2 steps between retained samples.
  std::optional<long long> thin;
  std::uint64_t seed = 0;
  InitialState initial;

  long long burn_in_for(int n) const;
  long long thin_for(int n) const;
};

/// One meeting: draws a pair from the kernel and sets the link with
/// probability logistic(Delta Q), else removes it. Returns the pair.
std::pair<int, int> glauber_step(Graph &g, const PairSampler &pairs, const ResolvedModel &model,
                                 Rng &rng);
Graph glauber_step(const Graph &g, const MeetingKernel &kernel, const NodeTypes &types,
                   const ModelParams &params, Rng &rng);

struct TraceRow {
  long long step = 0;
  long long edges = 0;
  long long match_edges = 0;
  long long twostar_sum = 0;
};

struct ChainRun {
  std::vector<Graph> samples;
  std::vector<TraceRow> trace; ///< one row per retained sample
};

/// burn_in steps, then `count` states separated by `thin` steps. Bitwise
/// deterministic given the seed.
ChainRun sample_chain(const ChainConfig &config, const MeetingKernel &kernel,
                      const NodeTypes &types, const ModelParams &params, int n, int count);

inline constexpr int kExactChainMaxNodes = 4;

struct StationaryComparison {
  std::vector<double> from_transition; ///< indexed by graph_code
  std::vector<double> from_potential;  ///< exp(Q) / Z
  double max_discrepancy = 0.0;
  Eigen::MatrixXd transition;          ///< row-stochastic, P(g -> g')
};

/// Full one-step transition matrix of the Glauber chain and its stationary
/// vector, next to the Gibbs law exp(Q)/Z. Throws ResourceLimit for n > 4.
StationaryComparison exact_stationary_distribution(int n, const MeetingKernel &kernel,
                                                   const NodeTypes &types,
                                                   const ModelParams &params);

} // namespace ergm
