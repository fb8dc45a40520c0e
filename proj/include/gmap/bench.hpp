#pragma once

#include <string>

#include "gmap/tasks.hpp"

namespace gmap {
namespace bench {

// One CSV row: task,M,N,seconds,max_l_states,messages. Everything except
// `seconds` is deterministic for a fixed seed.
struct BenchRecord {
  std::string task;
  int m = 0;
  int n = 0;
  double seconds = 0.0;
  std::size_t max_l_states = 0;
  std::size_t messages = 0;
};

// Seeded random binary chain: unary and pairwise energy factors with
// uniform values in [0, 1).
Model random_chain(int m, int n, unsigned long long seed);

// Tasks: "plain" (conventional max-product, no statistics),
// "label-count" (count gate at b = M/2), "slack-fbeta" (slack scaling with
// the F1 loss against a random ground truth from the same seed).
BenchRecord run_once(const std::string& task, int m, int n,
                     unsigned long long seed);

struct MRange {
  int lo = 20;
  int hi = 200;
  int step = 20;
};

// "lo:hi:step"
MRange parse_m_range(const std::string& text);

std::vector<BenchRecord> run_bench(const std::string& task, const MRange& ms,
                                   int n, int repetitions,
                                   unsigned long long seed);

// Least-squares slope of log(median seconds) vs log(M), fitted over the
// upper half of the distinct M values.
double fit_slope(const std::vector<BenchRecord>& records);

std::string to_csv(const std::vector<BenchRecord>& records);

}  // namespace bench
}  // namespace gmap
