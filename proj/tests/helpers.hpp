#pragma once

#include <cstdint>
#include <vector>

#include "gmap/model.hpp"

namespace testutil {

// splitmix64: platform-independent stream for reproducible instances.
struct Rng {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  int uniform(int n) { return static_cast<int>(next() % n); }
};

struct InstanceOptions {
  int m = 5;
  int max_card = 2;
  int p = 0;          // statistic dimension
  bool width2 = false;  // add skip-level factors (treewidth 2)
  bool max_dims = false;  // odd dimensions accumulate by MAX
  int g_range = 3;    // statistic entries in [0, g_range)
};

// Random model whose per-stratum energy argmax is almost surely unique:
// every variable carries a continuous-valued unary factor.
inline gmap::Model random_instance(Rng& rng, const InstanceOptions& opt) {
  std::vector<int> cards;
  for (int i = 0; i < opt.m; ++i) cards.push_back(2 + rng.uniform(opt.max_card - 1 ? opt.max_card - 1 : 1));
  if (opt.max_card == 2) std::fill(cards.begin(), cards.end(), 2);

  std::vector<gmap::EnergyFactor> energy;
  auto add_energy = [&](std::vector<int> scope) {
    gmap::EnergyFactor f;
    f.scope = std::move(scope);
    const std::size_t len = gmap::joint_size(f.scope, cards);
    for (std::size_t i = 0; i < len; ++i)
      f.values.push_back(4.0 * rng.real() - 2.0);
    energy.push_back(std::move(f));
  };
  for (int t = 0; t < opt.m; ++t) add_energy({t});
  for (int t = 1; t < opt.m; ++t) add_energy({t - 1, t});
  if (opt.width2)
    for (int t = 2; t < opt.m; ++t)
      if (rng.uniform(2) == 0) add_energy({t - 2, t});

  std::vector<gmap::AccumOp> accum;
  for (int d = 0; d < opt.p; ++d)
    accum.push_back(opt.max_dims && d % 2 == 1 ? gmap::AccumOp::Max
                                               : gmap::AccumOp::Add);
  std::vector<gmap::StatisticFactor> stats;
  if (opt.p > 0) {
    for (int t = 0; t < opt.m; ++t) {
      gmap::StatisticFactor g;
      g.scope = {t};
      g.dim = opt.p;
      for (int s = 0; s < cards[t]; ++s) {
        gmap::AuxVec e;
        for (int d = 0; d < opt.p; ++d) e.push_back(rng.uniform(opt.g_range));
        g.values.push_back(std::move(e));
      }
      stats.push_back(std::move(g));
    }
  }
  return gmap::Model(std::move(cards), std::move(energy), std::move(stats),
                     std::move(accum));
}

// Lexicographic odometer over full assignments; returns false at wrap.
inline bool next_assignment(std::vector<int>& y, const std::vector<int>& cards) {
  int k = static_cast<int>(y.size()) - 1;
  while (k >= 0 && y[k] == cards[k] - 1) y[k--] = 0;
  if (k < 0) return false;
  ++y[k];
  return true;
}

}  // namespace testutil
