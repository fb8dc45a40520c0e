#include "gmap/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmap {

namespace {

void check_sequence(const std::vector<int>& truth,
                    const std::vector<int>& cards) {
  if (truth.size() != cards.size())
    throw LengthError("ground truth length " + std::to_string(truth.size()) +
                      " != model size " + std::to_string(cards.size()));
  for (std::size_t t = 0; t < truth.size(); ++t)
    if (truth[t] < 0 || truth[t] >= cards[t])
      throw AssignmentError("ground-truth state out of range at position " +
                            std::to_string(t));
}

unsigned long long saturating_mul(unsigned long long a, unsigned long long b) {
  if (a != 0 && b > std::numeric_limits<unsigned long long>::max() / a)
    return std::numeric_limits<unsigned long long>::max();
  return a * b;
}

// C(n, k) with saturation; used only for diagnostics.
unsigned long long binomial(unsigned long long n, unsigned long long k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned long long r = 1;
  for (unsigned long long i = 1; i <= k; ++i) {
    if (r > std::numeric_limits<unsigned long long>::max() / (n - k + i))
      return std::numeric_limits<unsigned long long>::max();
    r = r * (n - k + i) / i;
  }
  return r;
}

// Unary statistic factors: entry(t, s) provided by `f`.
std::vector<StatisticFactor> unary_statistics(
    const std::vector<int>& cards, int dim,
    const std::function<AuxVec(int, int)>& f) {
  std::vector<StatisticFactor> out;
  for (std::size_t t = 0; t < cards.size(); ++t) {
    StatisticFactor g;
    g.scope = {static_cast<int>(t)};
    g.dim = dim;
    for (int s = 0; s < cards[t]; ++s)
      g.values.push_back(f(static_cast<int>(t), s));
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

bool GroundTruth::is_positive(int s) const {
  return std::binary_search(positive_labels.begin(), positive_labels.end(),
                            s);
}

int GroundTruth::positive_count() const {
  int n = 0;
  for (int s : states)
    if (is_positive(s)) ++n;
  return n;
}

LossSpec hamming(const std::vector<int>& truth, const std::vector<int>& cards,
                 bool normalized) {
  check_sequence(truth, cards);
  const double scale = normalized ? 1.0 / static_cast<double>(truth.size())
                                  : 1.0;
  LossSpec spec;
  spec.name = normalized ? "hamming-norm" : "hamming";
  spec.dim = 1;
  spec.accumulation = {AccumOp::Add};
  spec.factors = unary_statistics(cards, 1, [&](int t, int s) {
    return AuxVec{truth[t] != s ? 1 : 0};
  });
  spec.eta = [scale](const AuxVec& l) { return scale * l[0]; };
  spec.linear = true;
  spec.linear_coeff = {scale};
  spec.r_bound = [](int m) {
    return static_cast<unsigned long long>(m) + 1;
  };
  return spec;
}

LossSpec weighted_hamming(const std::vector<double>& weight, int n_states,
                          const std::vector<int>& truth,
                          const std::vector<int>& cards) {
  check_sequence(truth, cards);
  if (weight.size() != static_cast<std::size_t>(n_states) * n_states)
    throw ShapeError("weight matrix must be N x N");
  for (double w : weight)
    if (!std::isfinite(w)) throw ValueError("non-finite weight entry");
  const int p = n_states * n_states;
  LossSpec spec;
  spec.name = "whamming";
  spec.dim = p;
  spec.accumulation.assign(p, AccumOp::Add);
  spec.factors = unary_statistics(cards, p, [&](int t, int s) {
    AuxVec e(p, 0);
    e[truth[t] * n_states + s] = 1;
    return e;
  });
  spec.eta = [weight](const AuxVec& l) {
    double v = 0;
    for (std::size_t d = 0; d < l.size(); ++d) v += weight[d] * l[d];
    return v;
  };
  spec.linear = true;
  spec.linear_coeff = weight;
  spec.r_bound = [p](int m) {
    return binomial(static_cast<unsigned long long>(m) + p - 1, m);
  };
  return spec;
}

std::vector<StatisticFactor> tp_fp(const GroundTruth& truth,
                                   const std::vector<int>& cards) {
  check_sequence(truth.states, cards);
  if (truth.positive_labels.empty())
    throw ValueError("positive-label set must be nonempty");
  return unary_statistics(cards, 2, [&](int t, int s) {
    const bool pos = truth.is_positive(s);
    long long tp = (pos && s == truth.states[t]) ? 1 : 0;
    long long fp = (pos && s != truth.states[t]) ? 1 : 0;
    return AuxVec{tp, fp};
  });
}

std::function<double(const AuxVec&)> eta_fp_count() {
  return [](const AuxVec& l) { return static_cast<double>(l[0]); };
}

std::function<double(const AuxVec&)> eta_recall(int positives) {
  return [positives](const AuxVec& l) {
    if (positives == 0) return 0.0;  // empty truth matches anything
    return 1.0 - static_cast<double>(l[0]) / positives;
  };
}

std::function<double(const AuxVec&)> eta_precision() {
  return [](const AuxVec& l) {
    const double denom = static_cast<double>(l[0] + l[1]);
    if (denom == 0.0) return 0.0;
    return 1.0 - static_cast<double>(l[0]) / denom;
  };
}

std::function<double(const AuxVec&)> eta_f_beta(double beta, int positives) {
  const double b2 = beta * beta;
  return [b2, positives](const AuxVec& l) {
    const double denom = b2 * positives + l[0] + l[1];
    if (denom == 0.0) return 0.0;
    return 1.0 - (1.0 + b2) * l[0] / denom;
  };
}

std::function<double(const AuxVec&)> eta_iou(int positives) {
  return [positives](const AuxVec& l) {
    const double denom = positives + static_cast<double>(l[1]);
    if (denom == 0.0) return 0.0;
    return 1.0 - static_cast<double>(l[0]) / denom;
  };
}

namespace {

LossSpec tp_fp_loss(const std::string& name, const GroundTruth& truth,
                    const std::vector<int>& cards,
                    std::function<double(const AuxVec&)> eta,
                    std::function<unsigned long long(int)> r_bound) {
  LossSpec spec;
  spec.name = name;
  spec.dim = 2;
  spec.accumulation = {AccumOp::Add, AccumOp::Add};
  spec.factors = tp_fp(truth, cards);
  spec.eta = std::move(eta);
  spec.r_bound = std::move(r_bound);
  return spec;
}

unsigned long long square_bound(int m) {
  auto s = static_cast<unsigned long long>(m) + 1;
  return saturating_mul(s, s);
}

}  // namespace

LossSpec fp_count(const GroundTruth& truth, const std::vector<int>& cards) {
  check_sequence(truth.states, cards);
  if (truth.positive_labels.empty())
    throw ValueError("positive-label set must be nonempty");
  LossSpec spec;
  spec.name = "fp-count";
  spec.dim = 1;
  spec.accumulation = {AccumOp::Add};
  spec.factors = unary_statistics(cards, 1, [&](int t, int s) {
    const bool p = truth.is_positive(s);
    return AuxVec{(p && s != truth.states[t]) ? 1 : 0};
  });
  spec.eta = [](const AuxVec& l) { return static_cast<double>(l[0]); };
  spec.linear = true;
  spec.linear_coeff = {1.0};
  spec.r_bound = [](int m) {
    return static_cast<unsigned long long>(m) + 1;
  };
  return spec;
}

LossSpec recall_loss(const GroundTruth& truth, const std::vector<int>& cards) {
  check_sequence(truth.states, cards);
  if (truth.positive_labels.empty())
    throw ValueError("positive-label set must be nonempty");
  const int pos = truth.positive_count();
  LossSpec spec;
  spec.name = "recall";
  spec.dim = 1;
  spec.accumulation = {AccumOp::Add};
  spec.factors = unary_statistics(cards, 1, [&](int t, int s) {
    const bool p = truth.is_positive(s);
    return AuxVec{(p && s == truth.states[t]) ? 1 : 0};
  });
  spec.eta = [pos](const AuxVec& l) {
    if (pos == 0) return 0.0;  // empty truth matches anything
    return 1.0 - static_cast<double>(l[0]) / pos;
  };
  spec.linear = true;
  spec.linear_const = pos == 0 ? 0.0 : 1.0;
  spec.linear_coeff = {pos == 0 ? 0.0 : -1.0 / pos};
  spec.r_bound = [](int m) {
    return static_cast<unsigned long long>(m) + 1;
  };
  return spec;
}

LossSpec precision_loss(const GroundTruth& truth,
                        const std::vector<int>& cards) {
  return tp_fp_loss("precision", truth, cards, eta_precision(), square_bound);
}

LossSpec f_beta_loss(double beta, const GroundTruth& truth,
                     const std::vector<int>& cards) {
  return tp_fp_loss("fbeta", truth, cards,
                    eta_f_beta(beta, truth.positive_count()), square_bound);
}

LossSpec iou_loss(const GroundTruth& truth, const std::vector<int>& cards) {
  return tp_fp_loss("iou", truth, cards, eta_iou(truth.positive_count()),
                    square_bound);
}

LossSpec label_count(const std::vector<int>& truth,
                     const std::vector<int>& cards, bool normalized) {
  check_sequence(truth, cards);
  for (int c : cards)
    if (c != 2) throw ValueError("label-count loss requires binary labels");
  long long target = 0;
  for (int s : truth) target += s;
  const double scale = normalized ? 1.0 / static_cast<double>(truth.size())
                                  : 1.0;
  LossSpec spec;
  spec.name = normalized ? "label-count-norm" : "label-count";
  spec.dim = 1;
  spec.accumulation = {AccumOp::Add};
  spec.factors = unary_statistics(cards, 1, [](int, int s) {
    return AuxVec{s};
  });
  spec.eta = [target, scale](const AuxVec& l) {
    return scale * std::llabs(l[0] - target);
  };
  spec.r_bound = [](int m) {
    return static_cast<unsigned long long>(m) + 1;
  };
  return spec;
}

LossSpec zero_one(const GroundTruth& truth, const std::vector<int>& cards) {
  check_sequence(truth.states, cards);
  if (truth.positive_labels.empty())
    throw ValueError("positive-label set must be nonempty");
  const int pos = truth.positive_count();
  LossSpec spec;
  spec.name = "zero-one";
  spec.dim = 2;
  spec.accumulation = {AccumOp::Add, AccumOp::Max};
  spec.factors = unary_statistics(cards, 2, [&](int t, int s) {
    const bool p = truth.is_positive(s);
    long long tp = (p && s == truth.states[t]) ? 1 : 0;
    long long fp = (p && s != truth.states[t]) ? 1 : 0;
    return AuxVec{tp, fp};
  });
  // FN = |y*|_+ - TP; any miss or any false positive costs 1.
  spec.eta = [pos](const AuxVec& l) {
    return (pos - l[0] > 0 || l[1] > 0) ? 1.0 : 0.0;
  };
  spec.r_bound = [](int m) {
    return 2ULL * (static_cast<unsigned long long>(m) + 1);
  };
  return spec;
}

LossSpec loss_by_name(const std::string& name, const GroundTruth& truth,
                      const std::vector<int>& cards,
                      const std::vector<double>& weight) {
  if (name == "hamming") return hamming(truth.states, cards, false);
  if (name == "hamming-norm") return hamming(truth.states, cards, true);
  if (name == "whamming") {
    const int n = *std::max_element(cards.begin(), cards.end());
    return weighted_hamming(weight, n, truth.states, cards);
  }
  if (name == "fp-count") return fp_count(truth, cards);
  if (name == "recall") return recall_loss(truth, cards);
  if (name == "precision") return precision_loss(truth, cards);
  if (name.rfind("fbeta:", 0) == 0)
    return f_beta_loss(std::stod(name.substr(6)), truth, cards);
  if (name == "iou") return iou_loss(truth, cards);
  if (name == "label-count") return label_count(truth.states, cards, false);
  if (name == "label-count-norm")
    return label_count(truth.states, cards, true);
  if (name == "zero-one") return zero_one(truth, cards);
  throw ValueError("unknown loss: " + name);
}

}  // namespace gmap
