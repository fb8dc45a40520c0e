#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "gmap/cliquetree.hpp"

namespace gmap {

// The monotone coupling H between the energy F and the statistics l.
// Built-in forms are non-decreasing in the first argument; PRODUCT checks
// eta >= 0 at every queried l.
struct Combinator {
  enum class Kind { Sum, Product, Gate, General };

  Kind kind = Kind::Sum;
  std::function<double(const AuxVec&)> eta;        // Sum, Product, Gate
  std::function<bool(const AuxVec&)> predicate;    // Gate
  std::function<double(double, const AuxVec&)> h;  // General

  static Combinator sum(std::function<double(const AuxVec&)> eta);
  static Combinator product(std::function<double(const AuxVec&)> eta);
  static Combinator gate(std::function<bool(const AuxVec&)> predicate,
                         std::function<double(const AuxVec&)> eta = nullptr);
  // The caller declares h non-decreasing in its first argument.
  static Combinator general(std::function<double(double, const AuxVec&)> h,
                            bool non_decreasing_in_f);

  double apply(double f, const AuxVec& l) const;
};

// Decision record for one stored message value: the maximizing eliminated
// assignment and the maximizing child auxiliary states (concatenated in
// ascending child id). When the child key is derivable (single child, all
// ADD dimensions) it is left empty and reconstructed during backtracking.
struct MessageEntry {
  double value = kNegInf;
  std::uint32_t elim = 0;
  std::vector<long long> child_keys;
};

using MessageBucket = std::map<AuxVec, MessageEntry>;

struct MessageTable {
  int from = -1;
  int to = -1;
  std::vector<int> sepset;                 // sorted variable ids
  std::vector<int> eliminated;             // C_from \ sepset, sorted
  std::vector<int> children;               // ne(from) \ {to}, ascending
  bool child_key_derivable = false;
  std::vector<MessageBucket> buckets;      // per flat sepset assignment
};

struct Diagnostics {
  std::size_t messages_sent = 0;
  std::size_t max_l_states = 0;  // max distinct l per message / root belief
};

enum class SolveStatus { Optimal, Infeasible };

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<int> assignment;  // y*
  double value = kNegInf;       // p*
  double energy = kNegInf;      // F(y*)
  AuxVec statistics;            // G(y*)
  Diagnostics diagnostics;
};

// One step of the constrained protocol: message from clique i to neighbor j.
// `incoming[k]` must hold the table sent from tree node k toward i for every
// k in ne(i) \ {j}; anything else may be null.
MessageTable send_message(const CliqueTree& tree, int i, int j,
                          const std::vector<const MessageTable*>& incoming,
                          bool use_statistics = true);

struct RootEntry {
  double value = kNegInf;
  std::uint32_t clique_assignment = 0;  // flat index over the root clique
  std::vector<long long> child_keys;
};

using RootBeliefs = std::map<AuxVec, RootEntry>;

// Beliefs at the root given all inbound tables, stratified by l.
RootBeliefs root_beliefs(const CliqueTree& tree,
                         const std::vector<MessageTable>& tables,
                         bool use_statistics = true);

// Reconstructs the full assignment for the chosen root stratum.
std::vector<int> backtrack(const CliqueTree& tree,
                           const std::vector<MessageTable>& tables,
                           const AuxVec& l_star, const RootEntry& root_argmax);

// Algorithm: leaves-to-root constrained max-product, root stratification,
// outer maximization of H over l, then backtracking. Deterministic: all
// argmax ties resolve to the lexicographically smallest (assignment, l).
Solution run_constrained_mp(const CliqueTree& tree, const Combinator& comb);

// Conventional max-product on the same tree (statistics ignored).
Solution standard_junction_tree(const CliqueTree& tree);

}  // namespace gmap
