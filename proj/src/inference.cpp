#include "gmap/inference.hpp"

#include <algorithm>
#include <utility>

namespace gmap {

Combinator Combinator::sum(std::function<double(const AuxVec&)> eta) {
  Combinator c;
  c.kind = Kind::Sum;
  c.eta = std::move(eta);
  return c;
}

Combinator Combinator::product(std::function<double(const AuxVec&)> eta) {
  Combinator c;
  c.kind = Kind::Product;
  c.eta = std::move(eta);
  return c;
}

Combinator Combinator::gate(std::function<bool(const AuxVec&)> predicate,
                            std::function<double(const AuxVec&)> eta) {
  Combinator c;
  c.kind = Kind::Gate;
  c.predicate = std::move(predicate);
  c.eta = std::move(eta);
  return c;
}

Combinator Combinator::general(std::function<double(double, const AuxVec&)> h,
                               bool non_decreasing_in_f) {
  if (!non_decreasing_in_f)
    throw MonotonicityError(
        "general combinator requires h non-decreasing in its first argument");
  Combinator c;
  c.kind = Kind::General;
  c.h = std::move(h);
  return c;
}

double Combinator::apply(double f, const AuxVec& l) const {
  switch (kind) {
    case Kind::Sum:
      return f + (eta ? eta(l) : 0.0);
    case Kind::Product: {
      double e = eta(l);
      if (e < 0.0)
        throw MonotonicityError("slack scaling requires eta >= 0, got " +
                                std::to_string(e));
      return f * e;
    }
    case Kind::Gate:
      if (!predicate(l)) return kNegInf;
      return f + (eta ? eta(l) : 0.0);
    case Kind::General:
      return h(f, l);
  }
  return kNegInf;
}

namespace {

std::vector<int> sorted_difference(const std::vector<int>& a,
                                   const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

struct Candidate {
  double value;
  std::vector<long long> child_keys;
};

// Local energy / statistics of a clique at the given full assignment.
bool local_energy(const Model& model, const CliqueNode& node,
                  const std::vector<int>& full, double* out) {
  double total = 0.0;
  for (int t : node.energy_factors) {
    const auto& f = model.energy_factors()[t];
    double v = f.values[flat_index(f.scope, model.cardinalities(), full)];
    if (v == kNegInf) return false;
    total += v;
  }
  *out = total;
  return true;
}

AuxVec local_statistics(const Model& model, const CliqueNode& node,
                        const std::vector<int>& full) {
  AuxVec g(model.statistic_dim(), 0);
  for (int t : node.statistic_factors) {
    const auto& gf = model.statistic_factors()[t];
    const AuxVec& e = gf.values[flat_index(gf.scope, model.cardinalities(), full)];
    for (std::size_t d = 0; d < g.size(); ++d)
      g[d] = accum_combine(model.accumulation()[d], g[d], e[d]);
  }
  return g;
}

bool all_add(const Model& model) {
  for (AccumOp op : model.accumulation())
    if (op != AccumOp::Add) return false;
  return true;
}

// Sparse convolution under the per-dimension accumulation: fold one child
// message bucket into the candidate map. Ties keep the smaller key tuple.
void fold_child(const Model& model, const MessageBucket& bucket,
                bool keep_child_keys, std::map<AuxVec, Candidate>& acc) {
  std::map<AuxVec, Candidate> next;
  for (const auto& [k1, cand] : acc) {
    for (const auto& [k2, entry] : bucket) {
      AuxVec nk = accum_combine(model.accumulation(), k1, k2);
      double nv = cand.value + entry.value;
      auto it = next.find(nk);
      if (it == next.end()) {
        Candidate nc{nv, {}};
        if (keep_child_keys) {
          nc.child_keys = cand.child_keys;
          nc.child_keys.insert(nc.child_keys.end(), k2.begin(), k2.end());
        }
        next.emplace(std::move(nk), std::move(nc));
        continue;
      }
      bool better = nv > it->second.value;
      if (!better && keep_child_keys && nv == it->second.value) {
        std::vector<long long> ck = cand.child_keys;
        ck.insert(ck.end(), k2.begin(), k2.end());
        if (ck < it->second.child_keys) {
          it->second.child_keys = std::move(ck);
          continue;
        }
      }
      if (better) {
        it->second.value = nv;
        if (keep_child_keys) {
          it->second.child_keys = cand.child_keys;
          it->second.child_keys.insert(it->second.child_keys.end(), k2.begin(),
                                       k2.end());
        }
      }
    }
  }
  acc = std::move(next);
}

std::size_t distinct_keys(const std::vector<MessageBucket>& buckets) {
  // Buckets are sorted; multiway merge without materializing the union.
  std::vector<std::pair<MessageBucket::const_iterator,
                        MessageBucket::const_iterator>>
      its;
  for (const auto& b : buckets)
    if (!b.empty()) its.emplace_back(b.begin(), b.end());
  std::size_t count = 0;
  while (!its.empty()) {
    const AuxVec* mink = nullptr;
    for (auto& [it, end] : its)
      if (!mink || it->first < *mink) mink = &it->first;
    ++count;
    AuxVec key = *mink;
    for (auto& [it, end] : its)
      if (it->first == key) ++it;
    std::erase_if(its, [](const auto& p) { return p.first == p.second; });
  }
  return count;
}

}  // namespace

MessageTable send_message(const CliqueTree& tree, int i, int j,
                          const std::vector<const MessageTable*>& incoming,
                          bool use_statistics) {
  const Model& model = tree.model();
  const auto& cards = model.cardinalities();
  const CliqueNode& node = tree.nodes()[i];

  MessageTable out;
  out.from = i;
  out.to = j;
  out.sepset = tree.sepset(i, j);
  out.eliminated = sorted_difference(node.vars, out.sepset);
  for (int nb : tree.neighbors(i))
    if (nb != j) out.children.push_back(nb);
  for (int c : out.children) {
    if (c >= static_cast<int>(incoming.size()) || !incoming[c] ||
        incoming[c]->from != c || incoming[c]->to != i)
      throw NotReadyError("clique " + std::to_string(i) +
                          " missing message from neighbor " +
                          std::to_string(c));
  }
  out.child_key_derivable =
      out.children.size() <= 1 && (!use_statistics || all_add(model));
  out.buckets.resize(joint_size(out.sepset, cards));

  const std::size_t nstates = joint_size(node.vars, cards);
  std::vector<int> states;
  std::vector<int> full(model.num_variables(), 0);
  const AuxVec empty_key;
  for (std::size_t flat = 0; flat < nstates; ++flat) {
    decode_index(node.vars, cards, flat, states);
    for (std::size_t k = 0; k < node.vars.size(); ++k)
      full[node.vars[k]] = states[k];
    double f_local;
    if (!local_energy(model, node, full, &f_local)) continue;
    AuxVec g_local = use_statistics ? local_statistics(model, node, full)
                                    : empty_key;

    std::map<AuxVec, Candidate> acc;
    acc.emplace(std::move(g_local), Candidate{f_local, {}});
    for (int c : out.children) {
      const MessageTable& mt = *incoming[c];
      const MessageBucket& bucket =
          mt.buckets[flat_index(mt.sepset, cards, full)];
      fold_child(model, bucket, !out.child_key_derivable, acc);
      if (acc.empty()) break;
    }
    if (acc.empty()) continue;

    const std::size_t sepidx = flat_index(out.sepset, cards, full);
    const auto elimidx = static_cast<std::uint32_t>(
        flat_index(out.eliminated, cards, full));
    MessageBucket& bucket = out.buckets[sepidx];
    for (auto& [key, cand] : acc) {
      auto it = bucket.find(key);
      if (it == bucket.end()) {
        bucket.emplace(key,
                       MessageEntry{cand.value, elimidx,
                                    std::move(cand.child_keys)});
        continue;
      }
      MessageEntry& cur = it->second;
      bool better = cand.value > cur.value;
      if (!better && cand.value == cur.value) {
        better = elimidx < cur.elim ||
                 (elimidx == cur.elim && cand.child_keys < cur.child_keys);
      }
      if (better)
        cur = MessageEntry{cand.value, elimidx, std::move(cand.child_keys)};
    }
  }
  return out;
}

RootBeliefs root_beliefs(const CliqueTree& tree,
                         const std::vector<MessageTable>& tables,
                         bool use_statistics) {
  const Model& model = tree.model();
  const auto& cards = model.cardinalities();
  const int r = tree.root();
  const CliqueNode& node = tree.nodes()[r];
  for (int c : tree.neighbors(r)) {
    if (c >= static_cast<int>(tables.size()) || tables[c].from != c ||
        tables[c].to != r)
      throw NotReadyError("root missing message from neighbor " +
                          std::to_string(c));
  }
  const bool keep_keys =
      !(tree.neighbors(r).size() <= 1 && (!use_statistics || all_add(model)));

  RootBeliefs beliefs;
  const std::size_t nstates = joint_size(node.vars, cards);
  std::vector<int> states;
  std::vector<int> full(model.num_variables(), 0);
  for (std::size_t flat = 0; flat < nstates; ++flat) {
    decode_index(node.vars, cards, flat, states);
    for (std::size_t k = 0; k < node.vars.size(); ++k)
      full[node.vars[k]] = states[k];
    double f_local;
    if (!local_energy(model, node, full, &f_local)) continue;
    AuxVec g_local = use_statistics ? local_statistics(model, node, full)
                                    : AuxVec{};

    std::map<AuxVec, Candidate> acc;
    acc.emplace(std::move(g_local), Candidate{f_local, {}});
    for (int c : tree.neighbors(r)) {
      const MessageBucket& bucket =
          tables[c].buckets[flat_index(tables[c].sepset, cards, full)];
      fold_child(model, bucket, keep_keys, acc);
      if (acc.empty()) break;
    }
    for (auto& [key, cand] : acc) {
      auto it = beliefs.find(key);
      const auto cliq = static_cast<std::uint32_t>(flat);
      if (it == beliefs.end()) {
        beliefs.emplace(key, RootEntry{cand.value, cliq,
                                       std::move(cand.child_keys)});
        continue;
      }
      RootEntry& cur = it->second;
      bool better = cand.value > cur.value;
      if (!better && cand.value == cur.value)
        better = cliq < cur.clique_assignment ||
                 (cliq == cur.clique_assignment &&
                  cand.child_keys < cur.child_keys);
      if (better)
        cur = RootEntry{cand.value, cliq, std::move(cand.child_keys)};
    }
  }
  return beliefs;
}

namespace {

void backtrack_child(const CliqueTree& tree,
                     const std::vector<MessageTable>& tables, int child,
                     const AuxVec& key, std::vector<int>& y);

// Having fixed the full assignment of clique `node_id`, resolve the keys its
// children must have carried and recurse.
void descend(const CliqueTree& tree, const std::vector<MessageTable>& tables,
             int node_id, const std::vector<int>& children,
             const AuxVec& own_key, bool derivable,
             const std::vector<long long>& child_keys, std::vector<int>& y) {
  if (children.empty()) return;
  const Model& model = tree.model();
  const std::size_t p = own_key.size();
  if (derivable) {
    // Single child, all-ADD dimensions: key = g_local + child key.
    AuxVec g = local_statistics(model, tree.nodes()[node_id], y);
    AuxVec ck(p);
    for (std::size_t d = 0; d < p; ++d) ck[d] = own_key[d] - g[d];
    backtrack_child(tree, tables, children[0], ck, y);
    return;
  }
  if (child_keys.size() != p * children.size())
    throw CorruptRecordError("decision record child-key length mismatch");
  for (std::size_t k = 0; k < children.size(); ++k) {
    AuxVec ck(child_keys.begin() + k * p, child_keys.begin() + (k + 1) * p);
    backtrack_child(tree, tables, children[k], ck, y);
  }
}

void backtrack_child(const CliqueTree& tree,
                     const std::vector<MessageTable>& tables, int child,
                     const AuxVec& key, std::vector<int>& y) {
  const Model& model = tree.model();
  const auto& cards = model.cardinalities();
  const MessageTable& mt = tables[child];
  const std::size_t sepidx = flat_index(mt.sepset, cards, y);
  const MessageBucket& bucket = mt.buckets[sepidx];
  auto it = bucket.find(key);
  if (it == bucket.end())
    throw CorruptRecordError("missing decision record at clique " +
                             std::to_string(child));
  std::vector<int> states;
  decode_index(mt.eliminated, cards, it->second.elim, states);
  for (std::size_t k = 0; k < mt.eliminated.size(); ++k)
    y[mt.eliminated[k]] = states[k];
  descend(tree, tables, child, mt.children, key, mt.child_key_derivable,
          it->second.child_keys, y);
}

}  // namespace

std::vector<int> backtrack(const CliqueTree& tree,
                           const std::vector<MessageTable>& tables,
                           const AuxVec& l_star,
                           const RootEntry& root_argmax) {
  const Model& model = tree.model();
  const auto& cards = model.cardinalities();
  const int r = tree.root();
  const CliqueNode& node = tree.nodes()[r];
  std::vector<int> y(model.num_variables(), 0);
  std::vector<int> states;
  decode_index(node.vars, cards, root_argmax.clique_assignment, states);
  for (std::size_t k = 0; k < node.vars.size(); ++k)
    y[node.vars[k]] = states[k];
  const auto& children = tree.neighbors(r);
  const bool derivable = root_argmax.child_keys.empty() &&
                         (children.size() <= 1);
  descend(tree, tables, r, children, l_star, derivable,
          root_argmax.child_keys, y);
  return y;
}

namespace {

Solution run_engine(const CliqueTree& tree, const Combinator& comb,
                    bool use_statistics) {
  const int n = static_cast<int>(tree.nodes().size());
  const int r = tree.root();

  // Leaves-to-root schedule: reverse BFS order from the root.
  std::vector<int> order;
  std::vector<int> parent(n, -1);
  {
    std::vector<bool> seen(n, false);
    order.push_back(r);
    seen[r] = true;
    for (std::size_t head = 0; head < order.size(); ++head) {
      int cur = order[head];
      for (int nb : tree.neighbors(cur))
        if (!seen[nb]) {
          seen[nb] = true;
          parent[nb] = cur;
          order.push_back(nb);
        }
    }
  }

  std::vector<MessageTable> tables(n);
  std::vector<const MessageTable*> incoming(n, nullptr);
  Diagnostics diag;
  for (std::size_t k = order.size(); k-- > 0;) {
    int i = order[k];
    if (i == r) continue;
    tables[i] = send_message(tree, i, parent[i], incoming, use_statistics);
    incoming[i] = &tables[i];
    ++diag.messages_sent;
    diag.max_l_states =
        std::max(diag.max_l_states, distinct_keys(tables[i].buckets));
  }

  RootBeliefs beliefs = root_beliefs(tree, tables, use_statistics);
  diag.max_l_states = std::max(diag.max_l_states, beliefs.size());

  Solution sol;
  sol.diagnostics = diag;
  const RootEntry* best = nullptr;
  const AuxVec* best_l = nullptr;
  double best_value = kNegInf;
  for (const auto& [l, entry] : beliefs) {
    double v = comb.apply(entry.value, l);
    if (v == kNegInf) continue;
    if (!best || v > best_value) {
      best = &entry;
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
  sol.energy = best->value;
  sol.assignment = backtrack(tree, tables, *best_l, *best);
  sol.statistics =
      use_statistics ? *best_l : tree.model().evaluate_G(sol.assignment);
  return sol;
}

}  // namespace

Solution run_constrained_mp(const CliqueTree& tree, const Combinator& comb) {
  return run_engine(tree, comb, true);
}

Solution standard_junction_tree(const CliqueTree& tree) {
  return run_engine(tree, Combinator::sum(nullptr), false);
}

}  // namespace gmap
