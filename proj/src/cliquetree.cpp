#include "gmap/cliquetree.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace gmap {

namespace {

std::vector<int> sorted_intersection(const std::vector<int>& a,
                                     const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Moral adjacency: every pair of variables sharing a factor scope.
std::vector<std::set<int>> moral_graph(const Model& model) {
  std::vector<std::set<int>> adj(model.num_variables());
  auto connect = [&](const std::vector<int>& scope) {
    for (std::size_t a = 0; a < scope.size(); ++a)
      for (std::size_t b = a + 1; b < scope.size(); ++b) {
        adj[scope[a]].insert(scope[b]);
        adj[scope[b]].insert(scope[a]);
      }
  };
  for (const auto& f : model.energy_factors()) connect(f.scope);
  for (const auto& g : model.statistic_factors()) connect(g.scope);
  return adj;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

CliqueTree::CliqueTree(const Model& model, std::vector<CliqueNode> nodes,
                       std::vector<std::pair<int, int>> edges)
    : model_(&model), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const int n = static_cast<int>(nodes_.size());
  adj_.resize(n);
  sepsets_.resize(n);
  for (auto& [i, j] : edges_) {
    auto sep = sorted_intersection(nodes_[i].vars, nodes_[j].vars);
    adj_[i].push_back(j);
    sepsets_[i].push_back(sep);
    adj_[j].push_back(i);
    sepsets_[j].push_back(std::move(sep));
  }
  // Keep neighbor lists ordered for deterministic traversal.
  for (int i = 0; i < n; ++i) {
    std::vector<std::size_t> perm(adj_[i].size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return adj_[i][a] < adj_[i][b]; });
    std::vector<int> na;
    std::vector<std::vector<int>> ns;
    for (std::size_t k : perm) {
      na.push_back(adj_[i][k]);
      ns.push_back(std::move(sepsets_[i][k]));
    }
    adj_[i] = std::move(na);
    sepsets_[i] = std::move(ns);
  }
  width_ = 0;
  max_degree_ = 0;
  for (int i = 0; i < n; ++i) {
    width_ = std::max(width_, static_cast<int>(nodes_[i].vars.size()) - 1);
    max_degree_ = std::max(max_degree_, static_cast<int>(adj_[i].size()));
  }
}

const std::vector<int>& CliqueTree::sepset(int i, int j) const {
  for (std::size_t k = 0; k < adj_[i].size(); ++k)
    if (adj_[i][k] == j) return sepsets_[i][k];
  throw Error("sepset query on non-edge (" + std::to_string(i) + "," +
              std::to_string(j) + ")");
}

void CliqueTree::set_root(int r) {
  if (r < 0 || r >= static_cast<int>(nodes_.size()))
    throw Error("root id out of range");
  root_ = r;
}

std::vector<int> min_fill_order(const Model& model) {
  auto adj = moral_graph(model);
  const int m = model.num_variables();
  std::vector<bool> eliminated(m, false);
  std::vector<int> order;
  order.reserve(m);
  for (int step = 0; step < m; ++step) {
    int best = -1;
    long long best_fill = -1;
    for (int v = 0; v < m; ++v) {
      if (eliminated[v]) continue;
      long long fill = 0;
      for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
        for (auto b = std::next(a); b != adj[v].end(); ++b)
          if (!adj[*a].count(*b)) ++fill;
      if (best < 0 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }
    order.push_back(best);
    eliminated[best] = true;
    std::vector<int> nb(adj[best].begin(), adj[best].end());
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        adj[nb[a]].insert(nb[b]);
        adj[nb[b]].insert(nb[a]);
      }
    for (int u : nb) adj[u].erase(best);
    adj[best].clear();
  }
  return order;
}

CliqueTree build_clique_tree(const Model& model,
                             const std::vector<int>& order) {
  const int m = model.num_variables();
  {
    std::vector<bool> seen(m, false);
    if (static_cast<int>(order.size()) != m)
      throw Error("elimination order must cover all variables");
    for (int v : order) {
      if (v < 0 || v >= m || seen[v])
        throw Error("elimination order is not a permutation");
      seen[v] = true;
    }
  }

  auto adj = moral_graph(model);
  std::vector<std::vector<int>> cliques;
  for (int v : order) {
    std::vector<int> clique(adj[v].begin(), adj[v].end());
    clique.push_back(v);
    std::sort(clique.begin(), clique.end());
    cliques.push_back(std::move(clique));
    std::vector<int> nb(adj[v].begin(), adj[v].end());
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        adj[nb[a]].insert(nb[b]);
        adj[nb[b]].insert(nb[a]);
      }
    for (int u : nb) adj[u].erase(v);
    adj[v].clear();
  }

  // Keep maximal cliques only; on duplicates keep the earliest.
  std::vector<bool> drop(cliques.size(), false);
  for (std::size_t i = 0; i < cliques.size(); ++i)
    for (std::size_t j = 0; j < cliques.size(); ++j) {
      if (i == j || drop[j]) continue;
      if (cliques[i] == cliques[j]) {
        if (i > j) drop[i] = true;
      } else if (is_subset(cliques[i], cliques[j])) {
        drop[i] = true;
      }
    }
  std::vector<CliqueNode> nodes;
  for (std::size_t i = 0; i < cliques.size(); ++i)
    if (!drop[i]) nodes.push_back(CliqueNode{std::move(cliques[i]), {}, {}});

  // Maximum-weight spanning tree over sepset sizes; zero-weight edges bridge
  // disconnected components.
  const int n = static_cast<int>(nodes.size());
  struct Cand {
    int w, i, j;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      cands.push_back(
          {static_cast<int>(
               sorted_intersection(nodes[i].vars, nodes[j].vars).size()),
           i, j});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.w != b.w) return a.w > b.w;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  UnionFind uf(n);
  std::vector<std::pair<int, int>> edges;
  for (const auto& c : cands)
    if (uf.merge(c.i, c.j)) edges.emplace_back(c.i, c.j);

  // Assign each factor to the lowest-id containing clique.
  auto host = [&](const std::vector<int>& scope) {
    std::vector<int> s = scope;
    std::sort(s.begin(), s.end());
    for (int i = 0; i < n; ++i)
      if (is_subset(s, nodes[i].vars)) return i;
    throw Error("no clique contains a factor scope");
  };
  const auto& ef = model.energy_factors();
  const auto& gf = model.statistic_factors();
  for (std::size_t t = 0; t < ef.size(); ++t)
    nodes[host(ef[t].scope)].energy_factors.push_back(static_cast<int>(t));
  for (std::size_t t = 0; t < gf.size(); ++t)
    nodes[host(gf[t].scope)].statistic_factors.push_back(static_cast<int>(t));

  return CliqueTree(model, std::move(nodes), std::move(edges));
}

RipReport check_running_intersection(const CliqueTree& tree) {
  const auto& nodes = tree.nodes();
  const int m = tree.model().num_variables();
  for (int v = 0; v < m; ++v) {
    std::vector<int> holders;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (std::binary_search(nodes[i].vars.begin(), nodes[i].vars.end(), v))
        holders.push_back(static_cast<int>(i));
    if (holders.size() <= 1) continue;
    // BFS restricted to holders must reach them all.
    std::set<int> holder_set(holders.begin(), holders.end());
    std::vector<int> stack{holders[0]};
    std::set<int> seen{holders[0]};
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int nb : tree.neighbors(cur))
        if (holder_set.count(nb) && !seen.count(nb)) {
          seen.insert(nb);
          stack.push_back(nb);
        }
    }
    if (seen.size() != holders.size()) return RipReport{false, v};
  }
  return RipReport{true, -1};
}

CliqueTree reduce_neighbors(const CliqueTree& tree) {
  if (tree.max_degree() <= 3) return tree;
  const auto& old_nodes = tree.nodes();
  const int n = static_cast<int>(old_nodes.size());

  std::vector<CliqueNode> nodes = old_nodes;
  std::vector<std::pair<int, int>> edges;
  // clone_of[i][k]: node standing in for i on the edge toward its k-th
  // neighbor (ascending id). Degree <= 3 nodes map every slot to i.
  std::vector<std::vector<int>> clone_of(n);
  int next_id = n;
  for (int i = 0; i < n; ++i) {
    const auto& nb = tree.neighbors(i);
    const int d = static_cast<int>(nb.size());
    clone_of[i].assign(d, i);
    if (d <= 3) continue;
    for (int k = 1; k < d; ++k) {
      clone_of[i][k] = next_id++;
      nodes.push_back(CliqueNode{old_nodes[i].vars, {}, {}});
    }
    // Chain of clones over the same clique; sepset is the full clique.
    for (int k = 0; k + 1 < d; ++k)
      edges.emplace_back(clone_of[i][k], clone_of[i][k + 1]);
  }
  for (const auto& [u, v] : tree.edges()) {
    const auto& nu = tree.neighbors(u);
    const auto& nv = tree.neighbors(v);
    int ku = static_cast<int>(std::lower_bound(nu.begin(), nu.end(), v) -
                              nu.begin());
    int kv = static_cast<int>(std::lower_bound(nv.begin(), nv.end(), u) -
                              nv.begin());
    edges.emplace_back(clone_of[u][ku], clone_of[v][kv]);
  }
  CliqueTree out(tree.model(), std::move(nodes), std::move(edges));
  out.set_root(tree.root());
  return out;
}

CliqueTree reshape_dedup_sepsets(const CliqueTree& tree) {
  const int tau = tree.width();
  const long long bound = (1LL << (tau + 2)) - 4;
  if (tree.max_degree() <= bound) return tree;

  const int n = static_cast<int>(tree.nodes().size());
  // Mutable adjacency; edges move toward the leaves until every node sees
  // each sepset value at most twice.
  std::vector<std::set<int>> adj(n);
  for (const auto& [u, v] : tree.edges()) {
    adj[u].insert(v);
    adj[v].insert(u);
  }
  const auto& nodes = tree.nodes();
  auto sep = [&](int a, int b) {
    return sorted_intersection(nodes[a].vars, nodes[b].vars);
  };

  bool changed = true;
  int guard = 0;
  while (changed && guard++ < 100 * n) {
    changed = false;
    for (int r = 0; r < n; ++r) {
      if (static_cast<long long>(adj[r].size()) <= bound) continue;
      std::map<std::vector<int>, std::vector<int>> groups;
      for (int nb : adj[r]) groups[sep(r, nb)].push_back(nb);
      for (auto& [key, members] : groups) {
        if (members.size() <= 2) continue;
        // Keep the two lowest-id duplicates on r, chain the rest off the
        // second one.
        for (std::size_t k = 2; k < members.size(); ++k) {
          adj[r].erase(members[k]);
          adj[members[k]].erase(r);
          adj[members[k - 1]].insert(members[k]);
          adj[members[k]].insert(members[k - 1]);
        }
        changed = true;
      }
    }
  }

  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v : adj[u])
      if (u < v) edges.emplace_back(u, v);
  CliqueTree out(tree.model(), std::vector<CliqueNode>(tree.nodes()),
                 std::move(edges));
  out.set_root(tree.root());
  return out;
}

}  // namespace gmap
