#include "ergm_varest/graph.hpp"

#include "ergm_varest/errors.hpp"

#include <string>

namespace ergm {

Graph::Graph(int n) : n_(n) {
  if (n < 1)
    throw InvalidInput("graph must have at least one node, got n=" + std::to_string(n));
  adj_.assign(static_cast<std::size_t>(n) * n, 0);
  deg_.assign(n, 0);
}

Graph Graph::complete(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      g.set_edge(i, j, true);
  return g;
}

Graph Graph::from_edges(int n, std::span<const std::pair<int, int>> edges) {
  Graph g(n);
  for (const auto &[i, j] : edges)
    g.set_edge(i, j, true);
  return g;
}

void Graph::check_pair(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw InvalidInput("node index out of range: (" + std::to_string(i) + ", " +
                       std::to_string(j) + ") for n=" + std::to_string(n_));
  if (i == j)
    throw InvalidInput("self-loop requested at node " + std::to_string(i));
}

bool Graph::set_edge(int i, int j, bool on) {
  check_pair(i, j);
  auto &a = adj_[static_cast<std::size_t>(i) * n_ + j];
  const std::uint8_t value = on ? 1 : 0;
  if (a == value)
    return false;
  a = value;
  adj_[static_cast<std::size_t>(j) * n_ + i] = value;
  const int delta = on ? 1 : -1;
  deg_[i] += delta;
  deg_[j] += delta;
  edges_ += delta;
  return true;
}

std::vector<std::pair<int, int>> Graph::edge_list() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(edges_));
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (has_edge(i, j))
        out.emplace_back(i, j);
  return out;
}

NodeTypes NodeTypes::balanced(int n, int groups) {
  if (n < 1 || groups < 1)
    throw InvalidInput("balanced types need n >= 1 and groups >= 1");
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i)
    labels[i] = static_cast<int>(static_cast<long long>(i) * groups / n);
  return NodeTypes(std::move(labels));
}

} // namespace ergm
