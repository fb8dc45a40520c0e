#include <doctest.h>

#include <cmath>

#include "gmap/losses.hpp"
#include "helpers.hpp"

using namespace gmap;

namespace {

// Evaluate a loss the packaged way: statistics through a model, then eta.
double loss_value(const LossSpec& spec, const std::vector<int>& cards,
                  const std::vector<int>& y) {
  Model m(cards, {}, spec.factors, spec.accumulation);
  return spec.eta(m.evaluate_G(y));
}

// Independent reference implementations, written directly from the loss
// definitions rather than from statistics.
int ref_hamming(const std::vector<int>& a, const std::vector<int>& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

struct Counts {
  int tp = 0, fp = 0, pos = 0;
};

Counts ref_counts(const GroundTruth& truth, const std::vector<int>& y) {
  Counts c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool p = truth.is_positive(y[i]);
    c.tp += p && y[i] == truth.states[i];
    c.fp += p && y[i] != truth.states[i];
    c.pos += truth.is_positive(truth.states[i]);
  }
  return c;
}

}  // namespace

TEST_CASE("hamming statistics and eta") {
  std::vector<int> truth{0, 1, 0};
  std::vector<int> cards{2, 2, 2};
  LossSpec spec = hamming(truth, cards);
  CHECK(loss_value(spec, cards, {0, 1, 0}) == doctest::Approx(0));
  CHECK(loss_value(spec, cards, {1, 1, 1}) == doctest::Approx(2));
  CHECK(spec.linear);
  CHECK(spec.r_bound(3) == 4);

  LossSpec norm = hamming(truth, cards, true);
  CHECK(loss_value(norm, cards, {1, 1, 1}) == doctest::Approx(2.0 / 3));
  CHECK_THROWS_AS(hamming({0, 1}, cards), LengthError);
}

TEST_CASE("weighted hamming with identity costs reduces to hamming") {
  std::vector<int> truth{0, 1, 1};
  std::vector<int> cards{2, 2, 2};
  std::vector<double> w{0, 1, 1, 0};
  LossSpec spec = weighted_hamming(w, 2, truth, cards);
  std::vector<int> y(3, 0);
  do {
    CHECK(loss_value(spec, cards, y) == doctest::Approx(ref_hamming(truth, y)));
  } while (testutil::next_assignment(y, cards));
}

TEST_CASE("weighted hamming counts occurrences per (truth, predicted) pair") {
  std::vector<double> w{0, 3, 5, 0};
  LossSpec spec = weighted_hamming(w, 2, {0, 1}, {2, 2});
  CHECK(loss_value(spec, {2, 2}, {1, 0}) == doctest::Approx(8));
  Model m({2, 2}, {}, spec.factors, spec.accumulation);
  CHECK(m.evaluate_G({1, 0}) == AuxVec{0, 1, 1, 0});
  CHECK_THROWS_AS(weighted_hamming({0, 1}, 2, {0, 1}, {2, 2}), ShapeError);
}

TEST_CASE("TP/FP statistics under a positive-label set") {
  GroundTruth truth;
  truth.states = {1, 0, 1};
  truth.positive_labels = {1};
  auto gs = tp_fp(truth, {2, 2, 2});
  Model m({2, 2, 2}, {}, gs, {AccumOp::Add, AccumOp::Add});
  CHECK(m.evaluate_G({1, 0, 1}) == AuxVec{2, 0});  // perfect: TP = |y*|_+
  CHECK(m.evaluate_G({1, 1, 0}) == AuxVec{1, 1});
  GroundTruth empty = truth;
  empty.positive_labels = {};
  CHECK_THROWS_AS(tp_fp(empty, {2, 2, 2}), ValueError);
}

TEST_CASE("F-beta, precision, recall, IoU eta formulas") {
  CHECK(eta_f_beta(1.0, 3)(AuxVec{3, 0}) == doctest::Approx(0));
  CHECK(eta_f_beta(1.0, 3)(AuxVec{1, 1}) == doctest::Approx(0.6));
  CHECK(eta_iou(2)(AuxVec{1, 1}) == doctest::Approx(1.0 - 1.0 / 3));
  CHECK(eta_precision()(AuxVec{1, 1}) == doctest::Approx(0.5));
  CHECK(eta_precision()(AuxVec{0, 0}) == doctest::Approx(0));  // degenerate
  CHECK(eta_recall(4)(AuxVec{3}) == doctest::Approx(0.25));
  CHECK(eta_recall(0)(AuxVec{0}) == doctest::Approx(0));  // degenerate
  CHECK(eta_fp_count()(AuxVec{5}) == doctest::Approx(5));
}

TEST_CASE("label count loss") {
  std::vector<int> cards{2, 2, 2, 2};
  LossSpec spec = label_count({1, 1, 0, 0}, cards);
  CHECK(loss_value(spec, cards, {0, 1, 1, 0}) == doctest::Approx(0));
  CHECK(loss_value(spec, cards, {0, 0, 0, 0}) == doctest::Approx(2));
  LossSpec norm = label_count({1, 1, 0, 0}, cards, true);
  CHECK(loss_value(norm, cards, {0, 0, 0, 0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(label_count({0, 0}, {2, 3}), ValueError);
}

TEST_CASE("zero-one loss fires on any mismatch") {
  GroundTruth truth;
  truth.states = {1, 0, 1};
  truth.positive_labels = {1};
  std::vector<int> cards{2, 2, 2};
  LossSpec spec = zero_one(truth, cards);
  CHECK(spec.accumulation[0] == AccumOp::Add);
  CHECK(spec.accumulation[1] == AccumOp::Max);
  CHECK(loss_value(spec, cards, {1, 0, 1}) == doctest::Approx(0));
  CHECK(loss_value(spec, cards, {1, 1, 1}) == doctest::Approx(1));
  CHECK(loss_value(spec, cards, {0, 0, 1}) == doctest::Approx(1));
  CHECK(spec.r_bound(3) == 8);
}

TEST_CASE("every packaged loss matches its direct definition exhaustively") {
  testutil::Rng rng{91};
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 3 + rng.uniform(3);
    std::vector<int> cards(m, 2);
    GroundTruth truth;
    for (int t = 0; t < m; ++t) truth.states.push_back(rng.uniform(2));
    truth.positive_labels = {1};
    const int pos = truth.positive_count();

    LossSpec specs[] = {hamming(truth.states, cards),
                        fp_count(truth, cards),
                        recall_loss(truth, cards),
                        precision_loss(truth, cards),
                        f_beta_loss(1.0, truth, cards),
                        f_beta_loss(0.5, truth, cards),
                        iou_loss(truth, cards),
                        label_count(truth.states, cards),
                        zero_one(truth, cards)};

    std::vector<int> y(m, 0);
    do {
      const Counts c = ref_counts(truth, y);
      const int hd = ref_hamming(truth.states, y);
      long long cnt_y = 0, cnt_t = 0;
      for (int t = 0; t < m; ++t) {
        cnt_y += y[t];
        cnt_t += truth.states[t];
      }
      double expect[9];
      expect[0] = hd;
      expect[1] = c.fp;
      expect[2] = pos == 0 ? 0.0 : 1.0 - static_cast<double>(c.tp) / pos;
      expect[3] = c.tp + c.fp == 0
                      ? 0.0
                      : 1.0 - static_cast<double>(c.tp) / (c.tp + c.fp);
      auto fbeta = [&](double b) {
        const double b2 = b * b;
        const double den = b2 * pos + c.tp + c.fp;
        return den == 0 ? 0.0 : 1.0 - (1.0 + b2) * c.tp / den;
      };
      expect[4] = fbeta(1.0);
      expect[5] = fbeta(0.5);
      expect[6] = pos + c.fp == 0
                      ? 0.0
                      : 1.0 - static_cast<double>(c.tp) / (pos + c.fp);
      expect[7] = std::llabs(cnt_y - cnt_t);
      expect[8] = (y == truth.states) ? 0.0 : 1.0;
      for (int k = 0; k < 9; ++k)
        CHECK(loss_value(specs[k], cards, y) ==
              doctest::Approx(expect[k]).epsilon(1e-12));
    } while (testutil::next_assignment(y, cards));
  }
}

TEST_CASE("eta stays within documented ranges") {
  testutil::Rng rng{101};
  const int m = 5;
  std::vector<int> cards(m, 2);
  GroundTruth truth;
  for (int t = 0; t < m; ++t) truth.states.push_back(rng.uniform(2));
  truth.positive_labels = {1};
  LossSpec bounded[] = {hamming(truth.states, cards, true),
                        recall_loss(truth, cards),
                        precision_loss(truth, cards),
                        f_beta_loss(2.0, truth, cards),
                        iou_loss(truth, cards),
                        zero_one(truth, cards),
                        label_count(truth.states, cards, true)};
  std::vector<int> y(m, 0);
  do {
    for (const auto& spec : bounded) {
      const double v = loss_value(spec, cards, y);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    const double h = loss_value(hamming(truth.states, cards), cards, y);
    CHECK(h >= 0.0);
    CHECK(h <= m);
  } while (testutil::next_assignment(y, cards));
}

TEST_CASE("lookup by CLI name") {
  GroundTruth truth;
  truth.states = {1, 0};
  truth.positive_labels = {1};
  std::vector<int> cards{2, 2};
  CHECK(loss_by_name("hamming", truth, cards).name == "hamming");
  CHECK(loss_by_name("fbeta:0.5", truth, cards).name == "fbeta");
  CHECK(loss_by_name("zero-one", truth, cards).name == "zero-one");
  CHECK(loss_by_name("whamming", truth, cards, {0, 1, 1, 0}).name ==
        "whamming");
  CHECK_THROWS_AS(loss_by_name("nope", truth, cards), ValueError);
}
