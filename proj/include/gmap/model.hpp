#pragma once

#include <vector>

#include "gmap/base.hpp"

namespace gmap {

// Real-valued table factor; -inf entries forbid configurations.
struct EnergyFactor {
  std::vector<int> scope;      // ordered variable ids
  std::vector<double> values;  // dense, last scope variable fastest
};

// Integer-vector-valued table factor feeding the statistics G.
struct StatisticFactor {
  std::vector<int> scope;
  int dim = 0;                 // P
  std::vector<AuxVec> values;  // one length-P vector per joint scope state
};

// Immutable discrete model: variables, energy factors for F, statistic
// factors for G, and a per-dimension accumulation spec (ADD or MAX).
class Model {
 public:
  Model(std::vector<int> cardinalities, std::vector<EnergyFactor> energy,
        std::vector<StatisticFactor> statistics,
        std::vector<AccumOp> accumulation);

  int num_variables() const { return static_cast<int>(cards_.size()); }
  int cardinality(int var) const { return cards_[var]; }
  const std::vector<int>& cardinalities() const { return cards_; }
  int max_cardinality() const { return max_card_; }
  int statistic_dim() const { return static_cast<int>(accum_.size()); }
  const std::vector<AccumOp>& accumulation() const { return accum_; }
  const std::vector<EnergyFactor>& energy_factors() const { return energy_; }
  const std::vector<StatisticFactor>& statistic_factors() const {
    return stats_;
  }

  double evaluate_F(const std::vector<int>& y) const;
  AuxVec evaluate_G(const std::vector<int>& y) const;

  void check_assignment(const std::vector<int>& y) const;

 private:
  std::vector<int> cards_;
  std::vector<EnergyFactor> energy_;
  std::vector<StatisticFactor> stats_;
  std::vector<AccumOp> accum_;
  int max_card_ = 0;
};

inline Model build_model(std::vector<int> cardinalities,
                         std::vector<EnergyFactor> energy,
                         std::vector<StatisticFactor> statistics,
                         std::vector<AccumOp> accumulation) {
  return Model(std::move(cardinalities), std::move(energy),
               std::move(statistics), std::move(accumulation));
}

}  // namespace gmap
