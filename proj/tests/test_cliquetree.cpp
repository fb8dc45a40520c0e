#include <doctest.h>

#include <algorithm>

#include "gmap/cliquetree.hpp"
#include "gmap/inference.hpp"
#include "helpers.hpp"

using namespace gmap;

namespace {

Model chain3() {
  EnergyFactor f01{{0, 1}, {0.1, 0.7, 0.3, 0.2}};
  EnergyFactor f12{{1, 2}, {0.6, 0.4, 0.9, 0.5}};
  return Model({2, 2, 2}, {f01, f12}, {}, {});
}

Model star(int m) {
  // Center variable 0 with pairwise factors to every other variable.
  std::vector<EnergyFactor> fs;
  testutil::Rng rng{99};
  for (int k = 1; k < m; ++k) {
    EnergyFactor f{{0, k}, {}};
    for (int i = 0; i < 4; ++i) f.values.push_back(rng.real());
    fs.push_back(std::move(f));
  }
  return Model(std::vector<int>(m, 2), std::move(fs), {}, {});
}

int count_assigned_factors(const CliqueTree& tree) {
  int n = 0;
  for (const auto& node : tree.nodes())
    n += static_cast<int>(node.energy_factors.size() +
                          node.statistic_factors.size());
  return n;
}

bool family_preserving(const CliqueTree& tree) {
  const Model& m = tree.model();
  std::vector<int> ecount(m.energy_factors().size(), 0);
  std::vector<int> gcount(m.statistic_factors().size(), 0);
  for (const auto& node : tree.nodes()) {
    for (int t : node.energy_factors) {
      ++ecount[t];
      for (int v : m.energy_factors()[t].scope)
        if (!std::binary_search(node.vars.begin(), node.vars.end(), v))
          return false;
    }
    for (int t : node.statistic_factors) {
      ++gcount[t];
      for (int v : m.statistic_factors()[t].scope)
        if (!std::binary_search(node.vars.begin(), node.vars.end(), v))
          return false;
    }
  }
  for (int c : ecount)
    if (c != 1) return false;
  for (int c : gcount)
    if (c != 1) return false;
  return true;
}

}  // namespace

TEST_CASE("min-fill order on a chain gives width 1") {
  Model m = chain3();
  auto order = min_fill_order(m);
  CHECK(order.size() == 3);
  CliqueTree tree = build_clique_tree(m, order);
  CHECK(tree.width() == 1);
}

TEST_CASE("min-fill order on a single variable") {
  Model m({3}, {EnergyFactor{{0}, {0, 1, 2}}}, {}, {});
  CHECK(min_fill_order(m) == std::vector<int>{0});
}

TEST_CASE("min-fill on a 4-cycle gives width 2") {
  std::vector<EnergyFactor> fs;
  for (auto [a, b] : {std::pair{0, 1}, {1, 2}, {2, 3}, {0, 3}})
    fs.push_back(EnergyFactor{{a, b}, {0, 0, 0, 0}});
  Model m({2, 2, 2, 2}, fs, {}, {});
  CliqueTree tree = build_clique_tree(m, min_fill_order(m));
  CHECK(tree.width() == 2);
}

TEST_CASE("chain clique tree structure") {
  Model m = chain3();
  CliqueTree tree = build_clique_tree(m, min_fill_order(m));
  REQUIRE(tree.nodes().size() == 2);
  CHECK(tree.nodes()[0].vars == std::vector<int>{0, 1});
  CHECK(tree.nodes()[1].vars == std::vector<int>{1, 2});
  CHECK(tree.sepset(0, 1) == std::vector<int>{1});
  CHECK(tree.width() == 1);
  CHECK(tree.max_degree() == 1);
  CHECK(family_preserving(tree));
}

TEST_CASE("single factor over three variables is one clique") {
  EnergyFactor f{{0, 1, 2}, std::vector<double>(8, 0.0)};
  Model m({2, 2, 2}, {f}, {}, {});
  CliqueTree tree = build_clique_tree(m, min_fill_order(m));
  CHECK(tree.nodes().size() == 1);
  CHECK(tree.width() == 2);
  CHECK(tree.max_degree() == 0);
}

TEST_CASE("running intersection holds on built trees and fails on a bad one") {
  Model m = chain3();
  CliqueTree good = build_clique_tree(m, min_fill_order(m));
  CHECK(check_running_intersection(good).ok);

  // Path {y0,y1} - {y2} - {y1,y3}: y1's holders are disconnected.
  EnergyFactor f{{0}, {0, 0}};
  Model m4({2, 2, 2, 2}, {f}, {}, {});
  std::vector<CliqueNode> nodes{CliqueNode{{0, 1}, {0}, {}},
                                CliqueNode{{2}, {}, {}},
                                CliqueNode{{1, 3}, {}, {}}};
  CliqueTree bad(m4, std::move(nodes), {{0, 1}, {1, 2}});
  RipReport rep = check_running_intersection(bad);
  CHECK_FALSE(rep.ok);
  CHECK(rep.violating_variable == 1);
}

TEST_CASE("running intersection on 100 random builds") {
  testutil::Rng rng{21};
  for (int i = 0; i < 100; ++i) {
    testutil::InstanceOptions opt;
    opt.m = 3 + rng.uniform(6);
    opt.max_card = 3;
    opt.width2 = rng.uniform(2) == 1;
    Model m = testutil::random_instance(rng, opt);
    CliqueTree tree = build_clique_tree(m, min_fill_order(m));
    CHECK(check_running_intersection(tree).ok);
    CHECK(family_preserving(tree));
  }
}

TEST_CASE("disconnected models get bridged by empty sepsets") {
  EnergyFactor f0{{0}, {0.2, 0.9}};
  EnergyFactor f1{{1}, {0.8, 0.1}};
  Model m({2, 2}, {f0, f1}, {}, {});
  CliqueTree tree = build_clique_tree(m, min_fill_order(m));
  REQUIRE(tree.nodes().size() == 2);
  CHECK(tree.sepset(0, 1).empty());
  Solution sol = standard_junction_tree(tree);
  CHECK(sol.assignment == std::vector<int>{1, 0});
  CHECK(sol.value == doctest::Approx(1.7));
}

TEST_CASE("degree reduction chains high-degree nodes") {
  Model m = star(7);
  CliqueTree tree = build_clique_tree(m, min_fill_order(m));
  REQUIRE(tree.nodes().size() == 6);  // six pairwise cliques
  CHECK(tree.max_degree() == 5);

  CliqueTree reduced = reduce_neighbors(tree);
  CHECK(reduced.max_degree() <= 3);
  CHECK(check_running_intersection(reduced).ok);
  CHECK(family_preserving(reduced));
  // Node count grows by (d - 1) for the one node with degree d = 5.
  CHECK(reduced.nodes().size() == tree.nodes().size() + 4);

  Solution before = standard_junction_tree(tree);
  Solution after = standard_junction_tree(reduced);
  CHECK(after.value == doctest::Approx(before.value).epsilon(1e-12));
  CHECK(after.assignment == before.assignment);
}

TEST_CASE("degree reduction is a no-op at degree <= 3") {
  Model m = chain3();
  CliqueTree tree = build_clique_tree(m, min_fill_order(m));
  CliqueTree reduced = reduce_neighbors(tree);
  CHECK(reduced.nodes().size() == tree.nodes().size());
  CHECK(reduced.max_degree() == tree.max_degree());
}

TEST_CASE("sepset deduplication respects the width-based degree bound") {
  Model m = star(8);
  CliqueTree tree = build_clique_tree(m, min_fill_order(m));
  CHECK(tree.width() == 1);
  CHECK(tree.max_degree() == 6);
  CliqueTree reshaped = reshape_dedup_sepsets(tree);
  CHECK(reshaped.max_degree() <= 4);  // 2^(1+2) - 4
  CHECK(check_running_intersection(reshaped).ok);
  CHECK(reshaped.nodes().size() == tree.nodes().size());

  Solution before = standard_junction_tree(tree);
  Solution after = standard_junction_tree(reshaped);
  CHECK(after.value == doctest::Approx(before.value).epsilon(1e-12));
  CHECK(after.assignment == before.assignment);
}

TEST_CASE("sepset deduplication bound on 100 random trees") {
  testutil::Rng rng{31};
  for (int i = 0; i < 100; ++i) {
    testutil::InstanceOptions opt;
    opt.m = 3 + rng.uniform(6);
    opt.max_card = 2;
    opt.width2 = true;
    Model m = testutil::random_instance(rng, opt);
    CliqueTree tree = build_clique_tree(m, min_fill_order(m));
    CliqueTree reshaped = reshape_dedup_sepsets(tree);
    const long long bound = (1LL << (tree.width() + 2)) - 4;
    CHECK(reshaped.max_degree() <= bound);
    CHECK(check_running_intersection(reshaped).ok);
    Solution a = standard_junction_tree(tree);
    Solution b = standard_junction_tree(reshaped);
    CHECK(b.value == doctest::Approx(a.value).epsilon(1e-9));
  }
}

TEST_CASE("width equals max elimination clique size minus one") {
  testutil::Rng rng{41};
  for (int i = 0; i < 20; ++i) {
    testutil::InstanceOptions opt;
    opt.m = 4 + rng.uniform(4);
    opt.width2 = true;
    Model m = testutil::random_instance(rng, opt);
    auto order = min_fill_order(m);
    CliqueTree tree = build_clique_tree(m, order);
    // Re-run elimination independently to find the largest clique.
    std::vector<std::vector<bool>> adj(opt.m, std::vector<bool>(opt.m, false));
    auto connect = [&](const std::vector<int>& scope) {
      for (std::size_t a = 0; a < scope.size(); ++a)
        for (std::size_t b = a + 1; b < scope.size(); ++b)
          adj[scope[a]][scope[b]] = adj[scope[b]][scope[a]] = true;
    };
    for (const auto& f : m.energy_factors()) connect(f.scope);
    std::vector<bool> gone(opt.m, false);
    int biggest = 0;
    for (int v : order) {
      std::vector<int> nb;
      for (int u = 0; u < opt.m; ++u)
        if (!gone[u] && adj[v][u]) nb.push_back(u);
      biggest = std::max(biggest, static_cast<int>(nb.size()) + 1);
      for (std::size_t a = 0; a < nb.size(); ++a)
        for (std::size_t b = a + 1; b < nb.size(); ++b)
          adj[nb[a]][nb[b]] = adj[nb[b]][nb[a]] = true;
      gone[v] = true;
    }
    CHECK(tree.width() == biggest - 1);
  }
  (void)count_assigned_factors;
}
