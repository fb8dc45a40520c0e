#include "gmap/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

namespace gmap {
namespace bench {

namespace {

// splitmix64: identical streams on every platform, unlike the standard
// distributions.
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

// Inner repetition count keeping each measurement comfortably above timer
// resolution; deterministic in (task, m).
int repetitions_for(const std::string& task, int m) {
  const auto mm = static_cast<long long>(m);
  long long r = 1;
  if (task == "plain")
    r = 50000 / mm;
  else if (task == "label-count")
    r = 400000 / (mm * mm);
  else
    r = 4000000 / (mm * mm * mm);
  return static_cast<int>(std::max(1LL, r));
}

}  // namespace

Model random_chain(int m, int n, unsigned long long seed) {
  Rng rng{seed};
  std::vector<int> cards(m, n);
  std::vector<EnergyFactor> energy;
  for (int t = 0; t < m; ++t) {
    EnergyFactor f;
    f.scope = {t};
    for (int s = 0; s < n; ++s) f.values.push_back(rng.real());
    energy.push_back(std::move(f));
  }
  for (int t = 1; t < m; ++t) {
    EnergyFactor f;
    f.scope = {t - 1, t};
    for (int s = 0; s < n * n; ++s) f.values.push_back(rng.real());
    energy.push_back(std::move(f));
  }
  return Model(std::move(cards), std::move(energy), {}, {});
}

BenchRecord run_once(const std::string& task, int m, int n,
                     unsigned long long seed) {
  Model base = random_chain(m, n, seed);
  Rng rng{seed ^ 0x5eedULL};

  // Everything ahead of inference (loss construction, triangulation, tree
  // transforms) stays outside the timed region.
  Solution sol;
  const int reps = repetitions_for(task, m);
  double seconds = 0.0;
  auto timed = [&](auto&& solve) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) sol = solve();
    const auto t1 = std::chrono::steady_clock::now();
    seconds = std::chrono::duration<double>(t1 - t0).count() / reps;
  };

  if (task == "plain") {
    CliqueTree tree = tasks::default_tree(base, {});
    timed([&] { return standard_junction_tree(tree); });
  } else if (task == "label-count") {
    std::vector<StatisticFactor> stats;
    for (int t = 0; t < m; ++t) {
      StatisticFactor g;
      g.scope = {t};
      g.dim = 1;
      for (int s = 0; s < n; ++s) g.values.push_back(AuxVec{s > 0 ? 1 : 0});
      stats.push_back(std::move(g));
    }
    Model model(base.cardinalities(), base.energy_factors(), std::move(stats),
                {AccumOp::Add});
    CliqueTree tree = tasks::default_tree(model, {});
    const long long b = m / 2;
    Combinator comb =
        Combinator::gate([b](const AuxVec& l) { return l[0] == b; });
    timed([&] { return run_constrained_mp(tree, comb); });
  } else if (task == "slack-fbeta") {
    GroundTruth truth;
    for (int t = 0; t < m; ++t) truth.states.push_back(rng.uniform(n));
    for (int s = 1; s < n; ++s) truth.positive_labels.push_back(s);
    LossSpec loss = f_beta_loss(1.0, truth, base.cardinalities());
    Model augmented = tasks::augment_with_loss(base, loss);
    CliqueTree tree = tasks::default_tree(augmented, {});
    Combinator comb = Combinator::product(loss.eta);
    timed([&] { return run_constrained_mp(tree, comb); });
  } else {
    throw ValueError("unknown bench task: " + task);
  }

  BenchRecord rec;
  rec.task = task;
  rec.m = m;
  rec.n = n;
  rec.seconds = seconds;
  rec.max_l_states = sol.diagnostics.max_l_states;
  rec.messages = sol.diagnostics.messages_sent;
  return rec;
}

MRange parse_m_range(const std::string& text) {
  MRange r;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':' ||
      r.lo < 1 || r.hi < r.lo || r.step < 1 || !(in >> std::ws).eof())
    throw ValueError("bad M range (expected lo:hi:step): " + text);
  return r;
}

std::vector<BenchRecord> run_bench(const std::string& task, const MRange& ms,
                                   int n, int repetitions,
                                   unsigned long long seed) {
  // Repetition is the outer loop so the samples of any one problem size are
  // spread across the whole run; slow timing drift (frequency scaling, CPU
  // quotas) then shows up as independent noise that the per-size median
  // rejects, instead of biasing every sample of a size the same way.
  std::vector<BenchRecord> out;
  for (int rep = 0; rep < repetitions; ++rep)
    for (int m = ms.lo; m <= ms.hi; m += ms.step)
      out.push_back(run_once(task, m, n,
                             seed + static_cast<unsigned long long>(rep)));
  return out;
}

double fit_slope(const std::vector<BenchRecord>& records) {
  std::map<int, std::vector<double>> by_m;
  for (const auto& r : records) by_m[r.m].push_back(r.seconds);
  std::vector<std::pair<double, double>> pts;  // (log m, log median)
  for (auto& [m, v] : by_m) {
    std::sort(v.begin(), v.end());
    const double median = v.size() % 2 == 1
                              ? v[v.size() / 2]
                              : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    pts.emplace_back(std::log(static_cast<double>(m)), std::log(median));
  }
  // Upper half of the M values only: small-M timings are dominated by
  // constant factors.
  const std::size_t keep = (pts.size() + 1) / 2;
  pts.erase(pts.begin(), pts.end() - keep);
  if (pts.size() < 2) throw ValueError("slope fit needs >= 2 M values");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string to_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "task,M,N,seconds,max_l_states,messages\n";
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%.9f", r.seconds);
    out << r.task << "," << r.m << "," << r.n << "," << buf << ","
        << r.max_l_states << "," << r.messages << "\n";
  }
  return out.str();
}

}  // namespace bench
}  // namespace gmap
