#pragma once

#include <map>

#include "gmap/inference.hpp"

namespace gmap {
namespace oracle {

struct OracleBudget {
  unsigned long long max_joint_states = 1'000'000;
};

// Exhaustive reference solver. Shares only Model evaluation and the H
// definition with the engine; ties resolve like the engine's root rule:
// smallest l among equal H values, and within a stratum the smallest
// assignment among F-maximizers.
Solution brute_force(const Model& model, const Combinator& comb,
                     OracleBudget budget = {});

// Direct maximization over the C_i side of edge (i, j): sum of that side's
// energy factors subject to the side's accumulated statistics equaling l.
// Returns -inf when (sepset_assignment, l) is unreachable.
double brute_force_message(const CliqueTree& tree, int i, int j,
                           const std::vector<int>& sepset_assignment,
                           const AuxVec& l, OracleBudget budget = {});

// All reachable (l -> max energy) pairs for one edge and sepset assignment;
// the reference for both stored values and absent keys.
std::map<AuxVec, double> brute_force_message_table(
    const CliqueTree& tree, int i, int j,
    const std::vector<int>& sepset_assignment, OracleBudget budget = {});

}  // namespace oracle
}  // namespace gmap
