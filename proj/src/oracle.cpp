#include "gmap/oracle.hpp"

#include <algorithm>

namespace gmap {
namespace oracle {

namespace {

unsigned long long joint_state_count(const std::vector<int>& cards,
                                     const std::vector<int>& vars) {
  unsigned long long n = 1;
  for (int v : vars) {
    n *= static_cast<unsigned long long>(cards[v]);
    if (n > (1ULL << 62)) return n;
  }
  return n;
}

}  // namespace

Solution brute_force(const Model& model, const Combinator& comb,
                     OracleBudget budget) {
  const auto& cards = model.cardinalities();
  std::vector<int> all_vars(model.num_variables());
  for (int i = 0; i < model.num_variables(); ++i) all_vars[i] = i;
  if (joint_state_count(cards, all_vars) > budget.max_joint_states)
    throw BudgetExceededError("joint state space exceeds oracle budget");

  struct Stratum {
    double energy;
    std::vector<int> y;
  };
  std::map<AuxVec, Stratum> strata;

  std::vector<int> y(model.num_variables(), 0);
  while (true) {
    double f = model.evaluate_F(y);
    if (f != kNegInf) {
      AuxVec l = model.evaluate_G(y);
      auto it = strata.find(l);
      // Strict improvement keeps the first (lexicographically smallest) y.
      if (it == strata.end())
        strata.emplace(std::move(l), Stratum{f, y});
      else if (f > it->second.energy)
        it->second = Stratum{f, y};
    }
    // Next assignment in lexicographic order.
    int k = model.num_variables() - 1;
    while (k >= 0 && y[k] == cards[k] - 1) y[k--] = 0;
    if (k < 0) break;
    ++y[k];
  }

  Solution sol;
  const Stratum* best = nullptr;
  const AuxVec* best_l = nullptr;
  double best_value = kNegInf;
  for (const auto& [l, s] : strata) {
    double v = comb.apply(s.energy, l);
    if (v == kNegInf) continue;
    if (!best || v > best_value) {
      best = &s;
      best_l = &l;
      best_value = v;
    }
  }
  if (!best) {
    sol.status = SolveStatus::Infeasible;
    return sol;
  }
  sol.status = SolveStatus::Optimal;
  sol.value = best_value;
  sol.energy = best->energy;
  sol.assignment = best->y;
  sol.statistics = *best_l;
  return sol;
}

std::map<AuxVec, double> brute_force_message_table(
    const CliqueTree& tree, int i, int j,
    const std::vector<int>& sepset_assignment, OracleBudget budget) {
  const Model& model = tree.model();
  const auto& cards = model.cardinalities();
  const auto& sepset = tree.sepset(i, j);
  if (sepset_assignment.size() != sepset.size())
    throw AssignmentError("sepset assignment length mismatch");

  // Nodes on the C_i side of the edge.
  std::vector<int> side{i};
  {
    std::vector<bool> seen(tree.nodes().size(), false);
    seen[i] = true;
    seen[j] = true;
    for (std::size_t head = 0; head < side.size(); ++head)
      for (int nb : tree.neighbors(side[head]))
        if (!seen[nb]) {
          seen[nb] = true;
          side.push_back(nb);
        }
  }

  std::vector<int> side_vars;
  std::vector<int> f_side, g_side;
  for (int node : side) {
    for (int v : tree.nodes()[node].vars) side_vars.push_back(v);
    for (int t : tree.nodes()[node].energy_factors) f_side.push_back(t);
    for (int t : tree.nodes()[node].statistic_factors) g_side.push_back(t);
  }
  std::sort(side_vars.begin(), side_vars.end());
  side_vars.erase(std::unique(side_vars.begin(), side_vars.end()),
                  side_vars.end());
  std::sort(f_side.begin(), f_side.end());
  std::sort(g_side.begin(), g_side.end());
  std::vector<int> elim;
  std::set_difference(side_vars.begin(), side_vars.end(), sepset.begin(),
                      sepset.end(), std::back_inserter(elim));
  if (joint_state_count(cards, elim) > budget.max_joint_states)
    throw BudgetExceededError("subtree state space exceeds oracle budget");

  std::vector<int> full(model.num_variables(), 0);
  for (std::size_t k = 0; k < sepset.size(); ++k)
    full[sepset[k]] = sepset_assignment[k];

  const int p = model.statistic_dim();
  const auto& accum = model.accumulation();
  std::map<AuxVec, double> table;
  const std::size_t nstates = joint_size(elim, cards);
  std::vector<int> states;
  for (std::size_t flat = 0; flat < nstates; ++flat) {
    decode_index(elim, cards, flat, states);
    for (std::size_t k = 0; k < elim.size(); ++k) full[elim[k]] = states[k];
    double f = 0.0;
    bool ok = true;
    for (int t : f_side) {
      const auto& fac = model.energy_factors()[t];
      double v = fac.values[flat_index(fac.scope, cards, full)];
      if (v == kNegInf) {
        ok = false;
        break;
      }
      f += v;
    }
    if (!ok) continue;
    AuxVec l(p, 0);
    for (int t : g_side) {
      const auto& fac = model.statistic_factors()[t];
      const AuxVec& e = fac.values[flat_index(fac.scope, cards, full)];
      for (int d = 0; d < p; ++d) l[d] = accum_combine(accum[d], l[d], e[d]);
    }
    auto it = table.find(l);
    if (it == table.end())
      table.emplace(std::move(l), f);
    else if (f > it->second)
      it->second = f;
  }
  return table;
}

double brute_force_message(const CliqueTree& tree, int i, int j,
                           const std::vector<int>& sepset_assignment,
                           const AuxVec& l, OracleBudget budget) {
  auto table = brute_force_message_table(tree, i, j, sepset_assignment,
                                         budget);
  auto it = table.find(l);
  return it == table.end() ? kNegInf : it->second;
}

}  // namespace oracle
}  // namespace gmap
