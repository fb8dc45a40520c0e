#pragma once

#include <utility>
#include <vector>

#include "gmap/model.hpp"

namespace gmap {

struct CliqueNode {
  std::vector<int> vars;               // sorted ascending
  std::vector<int> energy_factors;     // indices into model.energy_factors()
  std::vector<int> statistic_factors;  // indices into model.statistic_factors()
};

struct RipReport {
  bool ok = true;
  int violating_variable = -1;
};

// Family-preserving clique tree with running intersection property. Nodes
// and edges are immutable once built; the transforms return new trees.
class CliqueTree {
 public:
  CliqueTree(const Model& model, std::vector<CliqueNode> nodes,
             std::vector<std::pair<int, int>> edges);

  const Model& model() const { return *model_; }
  const std::vector<CliqueNode>& nodes() const { return nodes_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int node) const { return adj_[node]; }
  // Sepset of an adjacent pair, sorted ascending.
  const std::vector<int>& sepset(int i, int j) const;

  int root() const { return root_; }
  void set_root(int r);

  int width() const { return width_; }
  int max_degree() const { return max_degree_; }

 private:
  const Model* model_;
  std::vector<CliqueNode> nodes_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::vector<std::vector<int>>> sepsets_;  // parallel to adj_
  int root_ = 0;
  int width_ = 0;
  int max_degree_ = 0;
};

// Min-fill elimination order, ties broken by smallest variable id.
std::vector<int> min_fill_order(const Model& model);

// Variable elimination under `order`; maximal elimination cliques joined by
// a maximum-sepset-weight spanning tree. Disconnected components end up
// bridged by empty sepsets. Every factor is assigned to exactly one clique.
CliqueTree build_clique_tree(const Model& model, const std::vector<int>& order);

RipReport check_running_intersection(const CliqueTree& tree);

// Clone-chain transform: every node with more than three neighbors is
// replaced by a chain of clones, one original neighbor per clone. The first
// clone keeps the node id and the factors; the others carry zero potentials.
CliqueTree reduce_neighbors(const CliqueTree& tree);

// Sepset deduplication: rearranges edges until every node sees each sepset
// value at most twice, giving max degree <= 2^(width+2) - 4.
CliqueTree reshape_dedup_sepsets(const CliqueTree& tree);

}  // namespace gmap
