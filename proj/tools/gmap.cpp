#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmap/bench.hpp"
#include "gmap/model_io.hpp"
#include "gmap/oracle.hpp"
#include "gmap/tasks.hpp"

namespace {

using namespace gmap;

struct SolveFlags {
  std::string model_path;
  int root = 0;
  bool no_reduce = false;
  bool reshape = false;
  std::string mode;
  std::string loss;
  std::string loss_eta;
  std::vector<int> truth;
  std::vector<int> positive;
  std::vector<double> weights;
  std::vector<long long> gate_equals;
  bool diag = false;
  bool json = false;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("model", f.model_path, "model file")->required();
  cmd->add_option("--root", f.root, "root clique id");
  cmd->add_flag("--no-reduce", f.no_reduce, "skip the clone-chain transform");
  cmd->add_flag("--reshape", f.reshape, "apply sepset deduplication");
  cmd->add_option("--mode", f.mode, "margin|slack|gate|general");
  cmd->add_option("--loss", f.loss, "packaged loss name");
  cmd->add_option("--loss-eta", f.loss_eta,
                  "eta over the model's own statistics (identity)");
  cmd->add_option("--truth", f.truth, "ground-truth states");
  cmd->add_option("--positive", f.positive, "positive-label set");
  cmd->add_option("--weights", f.weights, "N*N loss weight matrix, row-major");
  cmd->add_option("--gate-equals", f.gate_equals,
                  "gate: require G(y) == this vector");
  cmd->add_flag("--diag", f.diag, "print diagnostics");
  cmd->add_flag("--json", f.json, "structured output");
}

struct Prepared {
  Model model;
  Combinator comb;
};

// Model-file H block fills in whatever the flags left unset.
void merge_hspec(SolveFlags& f, const HSpec& h) {
  if (!h.present) return;
  if (f.mode.empty()) f.mode = h.mode;
  if (f.loss.empty()) f.loss = h.loss;
  if (f.truth.empty()) f.truth = h.truth;
  if (f.positive.empty()) f.positive = h.positive;
  if (f.gate_equals.empty()) f.gate_equals = h.equals;
}

Prepared prepare(const SolveFlags& flags) {
  HSpec h;
  Model model = load_model(flags.model_path, &h);
  SolveFlags f = flags;
  merge_hspec(f, h);
  if (f.mode.empty()) f.mode = "margin";

  std::function<double(const AuxVec&)> eta;
  if (!f.loss.empty()) {
    GroundTruth truth;
    truth.states = f.truth;
    truth.positive_labels = f.positive.empty() ? std::vector<int>{1}
                                               : f.positive;
    std::sort(truth.positive_labels.begin(), truth.positive_labels.end());
    LossSpec loss = loss_by_name(f.loss, truth, model.cardinalities(),
                                 f.weights);
    eta = loss.eta;
    model = tasks::augment_with_loss(model, loss);
  } else if (f.loss_eta == "identity") {
    if (model.statistic_dim() != 1)
      throw ValueError("--loss-eta identity needs exactly one statistic");
    eta = [](const AuxVec& l) { return static_cast<double>(l[0]); };
  } else if (!f.loss_eta.empty()) {
    throw ValueError("unknown --loss-eta: " + f.loss_eta);
  }

  Combinator comb = Combinator::sum(nullptr);
  if (f.mode == "margin") {
    comb = Combinator::sum(eta);
  } else if (f.mode == "slack") {
    if (!eta) eta = [](const AuxVec&) { return 1.0; };
    comb = Combinator::product(eta);
  } else if (f.mode == "gate") {
    if (f.gate_equals.empty())
      throw ValueError("gate mode requires --gate-equals (or an H block)");
    AuxVec target(f.gate_equals.begin(), f.gate_equals.end());
    if (static_cast<int>(target.size()) != model.statistic_dim())
      throw ShapeError("--gate-equals length != statistic dimension");
    comb = Combinator::gate(
        [target](const AuxVec& l) { return l == target; }, eta);
  } else if (f.mode == "general") {
    // Margin objective routed through the general-combinator path.
    auto e = eta;
    comb = Combinator::general(
        [e](double v, const AuxVec& l) { return v + (e ? e(l) : 0.0); },
        true);
  } else {
    throw ValueError("unknown mode: " + f.mode);
  }
  return Prepared{std::move(model), std::move(comb)};
}

int emit(const Solution& sol, const SolveFlags& f) {
  std::cout << (f.json ? solution_json(sol, f.diag)
                       : format_solution(sol, f.diag));
  return sol.status == SolveStatus::Optimal ? 0 : 2;
}

int cmd_solve(const SolveFlags& f) {
  Prepared p = prepare(f);
  tasks::TaskOptions opts;
  opts.reduce = !f.no_reduce;
  opts.reshape = f.reshape;
  opts.root = f.root;
  CliqueTree tree = tasks::default_tree(p.model, opts);
  Solution sol = p.model.statistic_dim() == 0 &&
                         p.comb.kind == Combinator::Kind::Sum && !p.comb.eta
                     ? standard_junction_tree(tree)
                     : run_constrained_mp(tree, p.comb);
  return emit(sol, f);
}

int cmd_oracle(const SolveFlags& f) {
  Prepared p = prepare(f);
  Solution sol = oracle::brute_force(p.model, p.comb);
  return emit(sol, f);
}

void print_tree(const CliqueTree& tree, const std::string& label) {
  std::cout << label << ": " << tree.nodes().size()
            << " cliques, width " << tree.width() << ", max degree "
            << tree.max_degree() << "\n";
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    std::cout << "  C" << i << " {";
    const auto& vars = tree.nodes()[i].vars;
    for (std::size_t k = 0; k < vars.size(); ++k)
      std::cout << (k ? " " : "") << "y" << vars[k];
    std::cout << "} f:" << tree.nodes()[i].energy_factors.size()
              << " g:" << tree.nodes()[i].statistic_factors.size() << "\n";
  }
  for (const auto& [a, b] : tree.edges()) {
    std::cout << "  C" << a << " -- C" << b << " sepset {";
    const auto& s = tree.sepset(a, b);
    for (std::size_t k = 0; k < s.size(); ++k)
      std::cout << (k ? " " : "") << "y" << s[k];
    std::cout << "}\n";
  }
}

int cmd_inspect(const std::string& path) {
  Model model = load_model(path);
  CliqueTree tree = build_clique_tree(model, min_fill_order(model));
  print_tree(tree, "initial");
  CliqueTree reduced = reduce_neighbors(tree);
  print_tree(reduced, "after degree reduction");
  CliqueTree reshaped = reshape_dedup_sepsets(tree);
  print_tree(reshaped, "after sepset deduplication");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact MAP inference with global statistics on clique trees"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "run the message-passing engine");
  add_solve_flags(solve, solve_flags);

  SolveFlags oracle_flags;
  auto* orc = app.add_subcommand("oracle", "exhaustive reference solver");
  add_solve_flags(orc, oracle_flags);

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "print clique-tree structure");
  inspect->add_option("model", inspect_path, "model file")->required();

  std::string bench_task = "plain";
  std::string bench_m = "20:200:20";
  int bench_n = 2, bench_reps = 3;
  unsigned long long bench_seed = 1;
  bool bench_fit = false;
  auto* bench = app.add_subcommand("bench", "runtime scaling benchmark");
  bench->add_option("task", bench_task, "plain|label-count|slack-fbeta")
      ->required();
  bench->add_option("--M", bench_m, "M range lo:hi:step");
  bench->add_option("--N", bench_n, "states per variable");
  bench->add_option("--reps", bench_reps, "repetitions per M");
  bench->add_option("--seed", bench_seed, "generator seed");
  bench->add_flag("--fit", bench_fit, "append log-log slope");

  SolveFlags lc_flags;
  long long lc_count = 0;
  auto* lc = app.add_subcommand("label-count",
                                "MAP subject to sum(y) == count");
  add_solve_flags(lc, lc_flags);
  lc->add_option("--count", lc_count, "required positive-label count")
      ->required();

  SolveFlags ex_flags;
  std::vector<std::string> ex_patterns;
  auto* ex = app.add_subcommand("exclude", "MAP avoiding given assignments");
  add_solve_flags(ex, ex_flags);
  ex->add_option("--pattern", ex_patterns,
                 "excluded assignment, space-separated states (repeatable)")
      ->required();

  SolveFlags kb_flags;
  int kb_k = 1;
  std::vector<long long> kb_margins;
  auto* kb = app.add_subcommand("kbest", "diverse K-best MAP");
  add_solve_flags(kb, kb_flags);
  kb->add_option("--k", kb_k, "number of solutions")->required();
  kb->add_option("--margins", kb_margins, "K-1 Hamming margins");

  SolveFlags bd_flags;
  double bd_score = 0.0;
  auto* bd = app.add_subcommand("bound",
                                "generalization-bound term (F1 loss)");
  add_solve_flags(bd, bd_flags);
  bd->add_option("--score-star", bd_score, "w . Psi(x, y*)")->required();

  std::vector<int> rg_obs;
  int rg_states = 2, rg_dict = 1;
  std::vector<double> rg_unary, rg_pair;
  double rg_a = 0, rg_b = 0, rg_prec = 1e3;
  bool rg_diag = false, rg_json = false;
  auto* rg = app.add_subcommand("range", "MAP subject to a <= F(y) <= b");
  rg->add_option("--obs", rg_obs, "observation sequence")->required();
  rg->add_option("--num-states", rg_states, "states per position");
  rg->add_option("--dict", rg_dict, "observation dictionary size");
  rg->add_option("--unary", rg_unary, "D*N unary weights")->required();
  rg->add_option("--pairwise", rg_pair, "N*N transition weights")->required();
  rg->add_option("--a", rg_a, "lower bound")->required();
  rg->add_option("--b", rg_b, "upper bound")->required();
  rg->add_option("--precision", rg_prec, "integer scaling factor");
  rg->add_flag("--diag", rg_diag, "print diagnostics");
  rg->add_flag("--json", rg_json, "structured output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_flags);
    if (orc->parsed()) return cmd_oracle(oracle_flags);
    if (inspect->parsed()) return cmd_inspect(inspect_path);
    if (bench->parsed()) {
      auto records = gmap::bench::run_bench(
          bench_task, gmap::bench::parse_m_range(bench_m), bench_n,
          bench_reps, bench_seed);
      std::cout << gmap::bench::to_csv(records);
      if (bench_fit) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f",
                      gmap::bench::fit_slope(records));
        std::cout << "# slope " << buf << "\n";
      }
      return 0;
    }
    tasks::TaskOptions opts;
    if (lc->parsed()) {
      opts.reduce = !lc_flags.no_reduce;
      opts.reshape = lc_flags.reshape;
      opts.root = lc_flags.root;
      Model model = load_model(lc_flags.model_path);
      return emit(tasks::label_count_constrained(model, lc_count, opts),
                  lc_flags);
    }
    if (ex->parsed()) {
      opts.reduce = !ex_flags.no_reduce;
      opts.reshape = ex_flags.reshape;
      opts.root = ex_flags.root;
      Model model = load_model(ex_flags.model_path);
      std::vector<std::vector<int>> patterns;
      for (const auto& text : ex_patterns) {
        std::istringstream in(text);
        std::vector<int> pat;
        int s;
        while (in >> s) pat.push_back(s);
        patterns.push_back(std::move(pat));
      }
      return emit(tasks::exclude_patterns(model, patterns, opts), ex_flags);
    }
    if (kb->parsed()) {
      opts.reduce = !kb_flags.no_reduce;
      opts.reshape = kb_flags.reshape;
      opts.root = kb_flags.root;
      Model model = load_model(kb_flags.model_path);
      auto result = tasks::diverse_kbest(model, kb_k, kb_margins, opts);
      for (std::size_t i = 0; i < result.solutions.size(); ++i) {
        std::cout << "# solution " << (i + 1) << "\n";
        std::cout << format_solution(result.solutions[i], kb_flags.diag);
      }
      if (!result.complete) {
        std::cout << "INFEASIBLE after " << result.solutions.size()
                  << " solutions\n";
        return 2;
      }
      return 0;
    }
    if (bd->parsed()) {
      opts.reduce = !bd_flags.no_reduce;
      opts.reshape = bd_flags.reshape;
      opts.root = bd_flags.root;
      Model model = load_model(bd_flags.model_path);
      GroundTruth truth;
      truth.states = bd_flags.truth;
      truth.positive_labels = bd_flags.positive.empty()
                                  ? std::vector<int>{1}
                                  : bd_flags.positive;
      std::sort(truth.positive_labels.begin(), truth.positive_labels.end());
      double v = tasks::generalization_bound_term(model, bd_score, truth,
                                                  opts);
      std::cout << "bound-term " << format_double(v) << "\n";
      return 0;
    }
    if (rg->parsed()) {
      tasks::SequenceScorer scorer;
      scorer.num_states = rg_states;
      scorer.dictionary_size = rg_dict;
      scorer.observations = rg_obs;
      scorer.unary_weight = rg_unary;
      scorer.pairwise_weight = rg_pair;
      Solution sol = tasks::objective_range_constrained(scorer, rg_a, rg_b,
                                                        rg_prec);
      SolveFlags f;
      f.diag = rg_diag;
      f.json = rg_json;
      return emit(sol, f);
    }
  } catch (const gmap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
