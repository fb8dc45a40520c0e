#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmap {

// Realized state of an auxiliary variable: an integer vector of length P.
// Element-wise equality; std::vector's operator< gives the lexicographic
// order used for deterministic tie-breaking.
using AuxVec = std::vector<long long>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class AccumOp { Add, Max };

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScopeError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct ValueError : Error { using Error::Error; };
struct AssignmentError : Error { using Error::Error; };
struct NotReadyError : Error { using Error::Error; };
struct MonotonicityError : Error { using Error::Error; };
struct CorruptRecordError : Error { using Error::Error; };
struct LengthError : Error { using Error::Error; };
struct ScaleError : Error { using Error::Error; };
struct BudgetExceededError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// Dense table convention: the last scope variable runs fastest.
inline std::size_t joint_size(const std::vector<int>& scope,
                              const std::vector<int>& cards) {
  std::size_t n = 1;
  for (int v : scope) n *= static_cast<std::size_t>(cards[v]);
  return n;
}

inline std::size_t flat_index(const std::vector<int>& scope,
                              const std::vector<int>& cards,
                              const std::vector<int>& full_assignment) {
  std::size_t idx = 0;
  for (int v : scope) idx = idx * cards[v] + full_assignment[v];
  return idx;
}

// Decodes `flat` into states of `scope` (same convention as flat_index).
inline void decode_index(const std::vector<int>& scope,
                         const std::vector<int>& cards, std::size_t flat,
                         std::vector<int>& out_states) {
  out_states.resize(scope.size());
  for (std::size_t k = scope.size(); k-- > 0;) {
    int c = cards[scope[k]];
    out_states[k] = static_cast<int>(flat % c);
    flat /= c;
  }
}

inline long long accum_combine(AccumOp op, long long a, long long b) {
  return op == AccumOp::Add ? a + b : (a > b ? a : b);
}

inline AuxVec accum_combine(const std::vector<AccumOp>& ops, const AuxVec& a,
                            const AuxVec& b) {
  AuxVec out(a.size());
  for (std::size_t d = 0; d < a.size(); ++d)
    out[d] = accum_combine(ops[d], a[d], b[d]);
  return out;
}

}  // namespace gmap
