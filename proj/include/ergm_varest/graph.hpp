#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ergm {

/// Undirected simple graph on n nodes, stored as a dense adjacency matrix
/// with cached degrees. Self-loops are rejected.
class Graph {
public:
  explicit Graph(int n = 1);

  static Graph complete(int n);
  static Graph from_edges(int n, std::span<const std::pair<int, int>> edges);

  int size() const { return n_; }
  bool has_edge(int i, int j) const {
    return adj_[static_cast<std::size_t>(i) * n_ + j] != 0;
  }
  /// Sets g_ij = g_ji = on. Returns true if the state changed.
  bool set_edge(int i, int j, bool on);

  int degree(int i) const { return deg_[i]; }
  std::span<const int> degrees() const { return deg_; }
  long long edge_count() const { return edges_; }
  /// Unordered pairs (i, j), i < j, in lexicographic order.
  std::vector<std::pair<int, int>> edge_list() const;

  bool operator==(const Graph &other) const {
    return n_ == other.n_ && adj_ == other.adj_;
  }

private:
  void check_pair(int i, int j) const;

  int n_;
  std::vector<std::uint8_t> adj_;
  std::vector<int> deg_;
  long long edges_ = 0;
};

/// Exogenous discrete node labels tau_i.
struct NodeTypes {
  std::vector<int> labels;

  NodeTypes() = default;
  explicit NodeTypes(std::vector<int> l) : labels(std::move(l)) {}

  /// n nodes split into `groups` contiguous groups of (near-)equal size,
  /// first block labelled 0.
  static NodeTypes balanced(int n, int groups = 2);
  static NodeTypes uniform(int n) { return NodeTypes(std::vector<int>(n, 0)); }

  int size() const { return static_cast<int>(labels.size()); }
  int operator[](int i) const { return labels[i]; }
  bool same(int i, int j) const { return labels[i] == labels[j]; }
};

} // namespace ergm
