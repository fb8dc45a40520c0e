#include "gmap/model.hpp"

#include <algorithm>
#include <cmath>

namespace gmap {

namespace {

void check_scope(const std::vector<int>& scope, int num_vars,
                 const char* what, std::size_t factor_idx) {
  std::vector<int> seen;
  for (int v : scope) {
    if (v < 0 || v >= num_vars)
      throw ScopeError(std::string(what) + " factor " +
                       std::to_string(factor_idx) +
                       " references unknown variable " + std::to_string(v));
    if (std::find(seen.begin(), seen.end(), v) != seen.end())
      throw ScopeError(std::string(what) + " factor " +
                       std::to_string(factor_idx) +
                       " repeats variable " + std::to_string(v));
    seen.push_back(v);
  }
}

}  // namespace

Model::Model(std::vector<int> cardinalities, std::vector<EnergyFactor> energy,
             std::vector<StatisticFactor> statistics,
             std::vector<AccumOp> accumulation)
    : cards_(std::move(cardinalities)),
      energy_(std::move(energy)),
      stats_(std::move(statistics)),
      accum_(std::move(accumulation)) {
  if (cards_.empty()) throw ShapeError("model needs at least one variable");
  for (int c : cards_)
    if (c < 1) throw ShapeError("variable cardinality must be >= 1");
  max_card_ = *std::max_element(cards_.begin(), cards_.end());

  const int p = static_cast<int>(accum_.size());
  for (std::size_t t = 0; t < energy_.size(); ++t) {
    const auto& f = energy_[t];
    check_scope(f.scope, num_variables(), "energy", t);
    if (f.values.size() != joint_size(f.scope, cards_))
      throw ShapeError("energy factor " + std::to_string(t) +
                       " table length mismatch");
    for (double v : f.values) {
      if (std::isnan(v)) throw ValueError("NaN in energy factor table");
      if (v == std::numeric_limits<double>::infinity())
        throw ValueError("+inf in energy factor table");
    }
  }
  for (std::size_t t = 0; t < stats_.size(); ++t) {
    const auto& g = stats_[t];
    check_scope(g.scope, num_variables(), "statistic", t);
    if (g.dim != p)
      throw ShapeError("statistic factor " + std::to_string(t) +
                       " dimension mismatch");
    if (g.values.size() != joint_size(g.scope, cards_))
      throw ShapeError("statistic factor " + std::to_string(t) +
                       " table length mismatch");
    for (const auto& entry : g.values) {
      if (entry.size() != static_cast<std::size_t>(p))
        throw ShapeError("statistic entry length mismatch in factor " +
                         std::to_string(t));
      for (std::size_t d = 0; d < entry.size(); ++d)
        if (accum_[d] == AccumOp::Max && entry[d] < 0)
          throw ValueError("negative statistic on a MAX dimension");
    }
  }
}

void Model::check_assignment(const std::vector<int>& y) const {
  if (y.size() != cards_.size())
    throw AssignmentError("assignment length " + std::to_string(y.size()) +
                          " != " + std::to_string(cards_.size()));
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] < 0 || y[i] >= cards_[i])
      throw AssignmentError("state out of range for variable " +
                            std::to_string(i));
}

double Model::evaluate_F(const std::vector<int>& y) const {
  check_assignment(y);
  double total = 0.0;
  for (const auto& f : energy_) {
    double v = f.values[flat_index(f.scope, cards_, y)];
    if (v == kNegInf) return kNegInf;
    total += v;
  }
  return total;
}

AuxVec Model::evaluate_G(const std::vector<int>& y) const {
  check_assignment(y);
  // MAX dimensions fold with identity 0; entries there are validated >= 0.
  AuxVec total(accum_.size(), 0);
  for (const auto& g : stats_) {
    const AuxVec& entry = g.values[flat_index(g.scope, cards_, y)];
    for (std::size_t d = 0; d < total.size(); ++d)
      total[d] = accum_combine(accum_[d], total[d], entry[d]);
  }
  return total;
}

}  // namespace gmap
