#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gmap/model.hpp"

namespace gmap {

// A dissimilarity measure in sufficient-statistics form: statistic factors
// building G(.; y*) for a sequence model, the evaluator eta over the
// accumulated statistics, and a bound on the number of reachable states.
struct LossSpec {
  std::string name;
  int dim = 0;
  std::vector<AccumOp> accumulation;
  std::vector<StatisticFactor> factors;
  std::function<double(const AuxVec&)> eta;

  // eta(l) = linear_const + linear_coeff . l, when representable; enables
  // the folded margin-scaling fast path.
  bool linear = false;
  double linear_const = 0.0;
  std::vector<double> linear_coeff;

  // Reachable-state bound as a function of the sequence length.
  std::function<unsigned long long(int)> r_bound;
};

// Per-position positive-label convention for TP/FP statistics.
struct GroundTruth {
  std::vector<int> states;
  std::vector<int> positive_labels;  // sorted ascending

  bool is_positive(int s) const;
  int positive_count() const;  // |y*|_+ = number of positive positions
};

// All builders take the per-position cardinalities of the sequence model the
// statistics attach to; truth must have the same length.
LossSpec hamming(const std::vector<int>& truth, const std::vector<int>& cards,
                 bool normalized = false);

// weight is N x N row-major: weight[s_truth * n_states + s_pred].
LossSpec weighted_hamming(const std::vector<double>& weight, int n_states,
                          const std::vector<int>& truth,
                          const std::vector<int>& cards);

// P=2 ADD statistics (TP, FP) under the given positive-label set.
std::vector<StatisticFactor> tp_fp(const GroundTruth& truth,
                                   const std::vector<int>& cards);

LossSpec fp_count(const GroundTruth& truth, const std::vector<int>& cards);
LossSpec recall_loss(const GroundTruth& truth, const std::vector<int>& cards);
LossSpec precision_loss(const GroundTruth& truth,
                        const std::vector<int>& cards);
LossSpec f_beta_loss(double beta, const GroundTruth& truth,
                     const std::vector<int>& cards);
LossSpec iou_loss(const GroundTruth& truth, const std::vector<int>& cards);

// Plain eta evaluators over (TP, FP), (TP) or (FP); positives = |y*|_+.
std::function<double(const AuxVec&)> eta_f_beta(double beta, int positives);
std::function<double(const AuxVec&)> eta_precision();
std::function<double(const AuxVec&)> eta_recall(int positives);
std::function<double(const AuxVec&)> eta_iou(int positives);
std::function<double(const AuxVec&)> eta_fp_count();

// Binary labels only.
LossSpec label_count(const std::vector<int>& truth,
                     const std::vector<int>& cards, bool normalized = false);

// G = (TP, 1[FP>0]) with MAX on the second dimension.
LossSpec zero_one(const GroundTruth& truth, const std::vector<int>& cards);

// Lookup by CLI name: hamming, hamming-norm, whamming, fp-count, recall,
// precision, fbeta:<beta>, iou, label-count, label-count-norm, zero-one.
LossSpec loss_by_name(const std::string& name, const GroundTruth& truth,
                      const std::vector<int>& cards,
                      const std::vector<double>& weight = {});

}  // namespace gmap
