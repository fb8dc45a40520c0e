#pragma once

#include <string>

#include "gmap/inference.hpp"

namespace gmap {

// Optional H block of a model file: a default combinator configuration the
// CLI applies unless overridden by flags.
struct HSpec {
  bool present = false;
  std::string mode;               // margin | slack | gate | general
  std::string loss;               // packaged loss name, or "identity"
  std::vector<int> truth;         // ground-truth states
  std::vector<int> positive;      // positive-label set for TP/FP losses
  std::vector<long long> equals;  // gate: require l == equals
};

// Text model format:
//   GMAP 1
//   VARS <M>
//   <M cardinalities>
//   FACTORS <T>
//   per factor: <scope size> <scope ids>, then the dense table
//               (last scope variable fastest; -inf allowed)
//   STATS <P>            (optional)
//   <P accumulation ops, ADD or MAX>
//   <T_g>
//   per factor: <scope size> <scope ids>, then table-length * P integers
//   H <mode> [loss <name>] [truth <M states>] [positive <k> <labels>]
//     [equals <P ints>]  (optional)
// Whitespace-insensitive within lines; trailing garbage is rejected.
Model parse_model_text(const std::string& text, HSpec* h = nullptr);
Model load_model(const std::string& path, HSpec* h = nullptr);

std::string write_model(const Model& model);

// Plain-text solution record: p*, F, G, y — one line each.
std::string format_solution(const Solution& sol, bool diagnostics = false);
std::string solution_json(const Solution& sol, bool diagnostics = false);

std::string format_double(double v);

}  // namespace gmap
