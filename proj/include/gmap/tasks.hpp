#pragma once

#include "gmap/inference.hpp"
#include "gmap/losses.hpp"

namespace gmap {
namespace tasks {

enum class ScalingMode { Margin, Slack };

struct TaskOptions {
  bool reduce = true;    // clone-chain transform, on by default
  bool reshape = false;  // sepset deduplication
  int root = 0;
  bool force_general_path = false;  // disable the folded margin fast path
};

// Attaches the loss statistics to the model's energy and builds the default
// inference pipeline (min-fill order, clique tree, optional transforms).
Model augment_with_loss(const Model& model_F, const LossSpec& loss);
CliqueTree default_tree(const Model& model, const TaskOptions& opts);

// Margin scaling H = F + eta(G); slack scaling H = F * eta(G). Margin with
// a linear, all-ADD loss folds the statistics into the energy tables and
// runs conventional max-product.
Solution loss_augmented(const Model& model_F, const LossSpec& loss,
                        ScalingMode mode, const TaskOptions& opts = {});

// MAP subject to sum(y) == b over binary labels.
Solution label_count_constrained(const Model& model, long long b,
                                 const TaskOptions& opts = {});

// Chain scorer whose energy is w . G over unary (observation, state) and
// pairwise (state, state) count statistics.
struct SequenceScorer {
  int num_states = 2;                // N
  int dictionary_size = 1;           // D
  std::vector<int> observations;     // length M, values in [0, D)
  std::vector<double> unary_weight;    // D x N row-major
  std::vector<double> pairwise_weight; // N x N row-major
};

// MAP subject to a <= F(y) <= b. Weights are scaled to integers at the
// given precision so the score is exact on integer statistics.
Solution objective_range_constrained(const SequenceScorer& scorer, double a,
                                     double b, double precision = 1e3,
                                     const TaskOptions& opts = {});

// MAP over Y minus the given complete assignments.
Solution exclude_patterns(const Model& model,
                          const std::vector<std::vector<int>>& patterns,
                          const TaskOptions& opts = {});

struct KBestResult {
  std::vector<Solution> solutions;
  bool complete = false;  // false when some round came back infeasible
};

// Sequential diverse K-best: solution j must differ from every earlier one
// by Hamming distance at least margins[j-2] (margins has K-1 entries).
KBestResult diverse_kbest(const Model& model, int k,
                          const std::vector<long long>& margins,
                          const TaskOptions& opts = {});

// Per-example term of the PAC-Bayes bound: max over y of the Hamming-margin
// indicator times the F1 loss against truth. score_star = w . Psi(x, y*).
double generalization_bound_term(const Model& model_F, double score_star,
                                 const GroundTruth& truth,
                                 const TaskOptions& opts = {});

}  // namespace tasks
}  // namespace gmap
