#include "gmap/tasks.hpp"

#include <algorithm>
#include <cmath>

namespace gmap {
namespace tasks {

Model augment_with_loss(const Model& model_F, const LossSpec& loss) {
  return Model(model_F.cardinalities(), model_F.energy_factors(),
               loss.factors, loss.accumulation);
}

CliqueTree default_tree(const Model& model, const TaskOptions& opts) {
  CliqueTree tree = build_clique_tree(model, min_fill_order(model));
  if (opts.reduce) tree = reduce_neighbors(tree);
  if (opts.reshape) tree = reshape_dedup_sepsets(tree);
  tree.set_root(opts.root);
  return tree;
}

namespace {

// Margin scaling with a linear all-ADD loss: add the weighted statistic
// tables onto the energy and run conventional max-product.
Solution folded_margin(const Model& model_F, const LossSpec& loss,
                       const TaskOptions& opts) {
  std::vector<EnergyFactor> energy = model_F.energy_factors();
  for (const auto& g : loss.factors) {
    EnergyFactor f;
    f.scope = g.scope;
    f.values.reserve(g.values.size());
    for (const AuxVec& e : g.values) {
      double v = 0.0;
      for (std::size_t d = 0; d < e.size(); ++d)
        v += loss.linear_coeff[d] * e[d];
      f.values.push_back(v);
    }
    energy.push_back(std::move(f));
  }
  Model folded(model_F.cardinalities(), std::move(energy), {}, {});
  Solution sol = standard_junction_tree(default_tree(folded, opts));
  if (sol.status != SolveStatus::Optimal) return sol;
  sol.value += loss.linear_const;
  // Report against the original decomposition.
  sol.energy = model_F.evaluate_F(sol.assignment);
  Model augmented = augment_with_loss(model_F, loss);
  sol.statistics = augmented.evaluate_G(sol.assignment);
  return sol;
}

bool loss_all_add(const LossSpec& loss) {
  return std::all_of(loss.accumulation.begin(), loss.accumulation.end(),
                     [](AccumOp op) { return op == AccumOp::Add; });
}

}  // namespace

Solution loss_augmented(const Model& model_F, const LossSpec& loss,
                        ScalingMode mode, const TaskOptions& opts) {
  if (mode == ScalingMode::Margin && loss.linear && loss_all_add(loss) &&
      !opts.force_general_path)
    return folded_margin(model_F, loss, opts);
  Model augmented = augment_with_loss(model_F, loss);
  CliqueTree tree = default_tree(augmented, opts);
  Combinator comb = mode == ScalingMode::Margin
                        ? Combinator::sum(loss.eta)
                        : Combinator::product(loss.eta);
  return run_constrained_mp(tree, comb);
}

Solution label_count_constrained(const Model& model, long long b,
                                 const TaskOptions& opts) {
  for (int c : model.cardinalities())
    if (c != 2)
      throw ValueError("label-count constraint requires binary labels");
  std::vector<StatisticFactor> stats;
  for (int t = 0; t < model.num_variables(); ++t)
    stats.push_back(StatisticFactor{{t}, 1, {AuxVec{0}, AuxVec{1}}});
  Model augmented(model.cardinalities(), model.energy_factors(),
                  std::move(stats), {AccumOp::Add});
  CliqueTree tree = default_tree(augmented, opts);
  return run_constrained_mp(
      tree, Combinator::gate([b](const AuxVec& l) { return l[0] == b; }));
}

Solution objective_range_constrained(const SequenceScorer& scorer, double a,
                                     double b, double precision,
                                     const TaskOptions& opts) {
  const int n = scorer.num_states;
  const int d = scorer.dictionary_size;
  const int m = static_cast<int>(scorer.observations.size());
  if (m < 1) throw ShapeError("empty observation sequence");
  for (int o : scorer.observations)
    if (o < 0 || o >= d) throw ValueError("observation out of dictionary");
  if (scorer.unary_weight.size() != static_cast<std::size_t>(d) * n ||
      scorer.pairwise_weight.size() != static_cast<std::size_t>(n) * n)
    throw ShapeError("weight table size mismatch");

  auto scale = [&](double w) {
    double s = w * precision;
    double r = std::round(s);
    if (std::abs(s - r) > 1e-6)
      throw ScaleError("weight " + std::to_string(w) +
                       " not integerizable at precision " +
                       std::to_string(precision));
    return static_cast<long long>(r);
  };
  std::vector<long long> wu(scorer.unary_weight.size());
  std::vector<long long> wp(scorer.pairwise_weight.size());
  for (std::size_t i = 0; i < wu.size(); ++i)
    wu[i] = scale(scorer.unary_weight[i]);
  for (std::size_t i = 0; i < wp.size(); ++i)
    wp[i] = scale(scorer.pairwise_weight[i]);

  // Statistics: unary (observation, state) counts then pairwise
  // (state, state) transition counts.
  const int p = d * n + n * n;
  std::vector<int> cards(m, n);
  std::vector<EnergyFactor> energy;
  std::vector<StatisticFactor> stats;
  for (int t = 0; t < m; ++t) {
    const int o = scorer.observations[t];
    EnergyFactor f;
    f.scope = {t};
    StatisticFactor g;
    g.scope = {t};
    g.dim = p;
    for (int s = 0; s < n; ++s) {
      f.values.push_back(static_cast<double>(wu[o * n + s]) / precision);
      AuxVec e(p, 0);
      e[o * n + s] = 1;
      g.values.push_back(std::move(e));
    }
    energy.push_back(std::move(f));
    stats.push_back(std::move(g));
  }
  for (int t = 1; t < m; ++t) {
    EnergyFactor f;
    f.scope = {t - 1, t};
    StatisticFactor g;
    g.scope = {t - 1, t};
    g.dim = p;
    for (int s1 = 0; s1 < n; ++s1)
      for (int s2 = 0; s2 < n; ++s2) {
        f.values.push_back(static_cast<double>(wp[s1 * n + s2]) / precision);
        AuxVec e(p, 0);
        e[d * n + s1 * n + s2] = 1;
        g.values.push_back(std::move(e));
      }
    energy.push_back(std::move(f));
    stats.push_back(std::move(g));
  }
  Model model(std::move(cards), std::move(energy), std::move(stats),
              std::vector<AccumOp>(p, AccumOp::Add));
  CliqueTree tree = default_tree(model, opts);
  auto gate = [wu, wp, precision, a, b](const AuxVec& l) {
    long long scaled = 0;
    for (std::size_t i = 0; i < wu.size(); ++i) scaled += wu[i] * l[i];
    for (std::size_t i = 0; i < wp.size(); ++i)
      scaled += wp[i] * l[wu.size() + i];
    const double score = static_cast<double>(scaled) / precision;
    return a <= score && score <= b;
  };
  return run_constrained_mp(tree, Combinator::gate(gate));
}

Solution exclude_patterns(const Model& model,
                          const std::vector<std::vector<int>>& patterns,
                          const TaskOptions& opts) {
  const int k = static_cast<int>(patterns.size());
  for (const auto& pat : patterns) model.check_assignment(pat);
  std::vector<StatisticFactor> stats;
  for (int t = 0; t < model.num_variables(); ++t) {
    StatisticFactor g;
    g.scope = {t};
    g.dim = k;
    for (int s = 0; s < model.cardinality(t); ++s) {
      AuxVec e(k);
      for (int i = 0; i < k; ++i) e[i] = patterns[i][t] != s ? 1 : 0;
      g.values.push_back(std::move(e));
    }
    stats.push_back(std::move(g));
  }
  Model augmented(model.cardinalities(), model.energy_factors(),
                  std::move(stats), std::vector<AccumOp>(k, AccumOp::Max));
  CliqueTree tree = default_tree(augmented, opts);
  // l[i] == 0 means y coincides with pattern i.
  auto gate = [](const AuxVec& l) {
    return std::all_of(l.begin(), l.end(),
                       [](long long v) { return v != 0; });
  };
  return run_constrained_mp(tree, Combinator::gate(gate));
}

KBestResult diverse_kbest(const Model& model, int k,
                          const std::vector<long long>& margins,
                          const TaskOptions& opts) {
  if (k < 1) throw ValueError("k must be >= 1");
  if (margins.size() != static_cast<std::size_t>(k) - 1)
    throw ShapeError("need k-1 margins");
  KBestResult result;
  for (int round = 0; round < k; ++round) {
    Solution sol;
    if (round == 0) {
      CliqueTree tree = default_tree(model, opts);
      sol = standard_junction_tree(tree);
    } else {
      // Hamming statistics against each previous solution.
      std::vector<StatisticFactor> stats;
      for (int t = 0; t < model.num_variables(); ++t) {
        StatisticFactor g;
        g.scope = {t};
        g.dim = round;
        for (int s = 0; s < model.cardinality(t); ++s) {
          AuxVec e(round);
          for (int i = 0; i < round; ++i)
            e[i] = result.solutions[i].assignment[t] != s ? 1 : 0;
          g.values.push_back(std::move(e));
        }
        stats.push_back(std::move(g));
      }
      Model augmented(model.cardinalities(), model.energy_factors(),
                      std::move(stats),
                      std::vector<AccumOp>(round, AccumOp::Add));
      CliqueTree tree = default_tree(augmented, opts);
      const long long margin = margins[round - 1];
      auto gate = [margin](const AuxVec& l) {
        return std::all_of(l.begin(), l.end(),
                           [margin](long long v) { return v >= margin; });
      };
      sol = run_constrained_mp(tree, Combinator::gate(gate));
    }
    if (sol.status != SolveStatus::Optimal) return result;  // partial
    result.solutions.push_back(std::move(sol));
  }
  result.complete = true;
  return result;
}

double generalization_bound_term(const Model& model_F, double score_star,
                                 const GroundTruth& truth,
                                 const TaskOptions& opts) {
  LossSpec loss = f_beta_loss(1.0, truth, model_F.cardinalities());
  Model augmented = augment_with_loss(model_F, loss);
  CliqueTree tree = default_tree(augmented, opts);
  const int positives = truth.positive_count();
  auto eta = loss.eta;
  // Indicator is non-decreasing in f: raising f can only keep it on.
  auto h = [score_star, positives, eta](double f, const AuxVec& l) {
    const double hamming_margin =
        static_cast<double>(positives - l[0] + l[1]);  // FN + FP
    return (score_star - f <= hamming_margin) ? eta(l) : 0.0;
  };
  Solution sol =
      run_constrained_mp(tree, Combinator::general(std::move(h), true));
  return sol.status == SolveStatus::Optimal ? sol.value : 0.0;
}

}  // namespace tasks
}  // namespace gmap
