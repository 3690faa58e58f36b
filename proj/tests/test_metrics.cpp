#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "support/metric_oracles.hpp"

using namespace zsml;

namespace {

struct RandomInstance {
  Matrix scores;
  AnnotationMatrix truth;
};

RandomInstance random_instance(Rng& rng, bool allow_ties) {
  const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform() * 6);
  const std::size_t l = 2 + static_cast<std::size_t>(rng.uniform() * 11);
  RandomInstance inst{Matrix(m, l), AnnotationMatrix(m, l)};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < l; ++j) {
      double s = rng.normal();
      if (allow_ties) s = std::round(s * 2.0) / 2.0;  // coarse grid forces ties
      inst.scores(i, j) = s;
      inst.truth.set(i, j, rng.uniform() < 0.4 ? 1 : -1);
    }
  // ensure at least one relevant label overall
  inst.truth.set(0, 0, 1);
  return inst;
}

}  // namespace

TEST_CASE("hamming_loss examples") {
  AnnotationMatrix truth(2, 3);
  truth.values = {1, -1, 1, -1, 1, -1};
  AnnotationMatrix pred = truth;
  CHECK(hamming_loss(pred, truth) == 0.0);

  AnnotationMatrix inverted = truth;
  for (auto& v : inverted.values) v = -v;
  CHECK(hamming_loss(inverted, truth) == 1.0);

  AnnotationMatrix two_off = truth;
  two_off.set(0, 0, -1);
  two_off.set(0, 2, -1);
  CHECK(hamming_loss(two_off, truth) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(hamming_loss(AnnotationMatrix(2, 2), truth), ContractError);
}

TEST_CASE("hamming complement identity") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const RandomInstance inst = random_instance(rng, true);
    AnnotationMatrix pred(inst.truth.rows, inst.truth.cols);
    for (std::size_t i = 0; i < pred.values.size(); ++i)
      pred.values[i] = rng.uniform() < 0.5 ? 1 : -1;
    AnnotationMatrix anti = pred;
    for (auto& v : anti.values) v = -v;
    CHECK(hamming_loss(pred, inst.truth) + hamming_loss(anti, inst.truth) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("average_precision examples") {
  const std::vector<std::int8_t> top_hit{1, -1, -1};
  CHECK(average_precision(std::vector<double>{3.0, 2.0, 1.0}, top_hit) == 1.0);

  const std::vector<std::int8_t> all{1, 1, 1};
  CHECK(average_precision(std::vector<double>{0.3, 0.2, 0.1}, all) == 1.0);

  const std::vector<std::int8_t> truth{-1, 1, 1};
  const double ap =
      average_precision(std::vector<double>{0.9, 0.8, 0.7}, truth);
  CHECK(ap == doctest::Approx(7.0 / 12.0).epsilon(1e-15));

  CHECK_THROWS_AS(
      average_precision(std::vector<double>{1.0, 2.0},
                        std::vector<std::int8_t>{-1, -1}),
      ContractError);
}

TEST_CASE("miap examples and permutation symmetry") {
  Matrix scores(2, 3);
  scores(0, 0) = 0.1;  // row 0: relevant label ranked first
  scores(0, 1) = 0.0;
  scores(0, 2) = -0.2;
  scores(1, 0) = 0.9;
  scores(1, 1) = 0.8;
  scores(1, 2) = 0.7;
  AnnotationMatrix truth(2, 3);
  truth.values = {1, -1, -1, -1, 1, 1};
  CHECK(miap(scores, truth) == doctest::Approx(19.0 / 24.0).epsilon(1e-15));

  // permuting image order leaves MiAP unchanged
  Matrix swapped = select_rows(scores, {1, 0});
  AnnotationMatrix truth_swapped = select_rows(truth, {1, 0});
  CHECK(miap(swapped, truth_swapped) == miap(scores, truth));

  AnnotationMatrix empty(2, 3);  // all -1
  CHECK_THROWS_AS(miap(scores, empty), ContractError);
}

TEST_CASE("topk_prf examples") {
  // k=3, K_m=4, 2 hits -> p=2/3, r=1/2, f1=4/7
  Matrix scores(1, 6);
  for (std::size_t j = 0; j < 6; ++j) scores(0, j) = 6.0 - static_cast<double>(j);
  AnnotationMatrix truth(1, 6);
  truth.values = {1, 1, -1, 1, -1, 1};
  const TopkResult r = topk_prf(scores, truth, 3);
  CHECK(r.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.recall == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.f1 == doctest::Approx(4.0 / 7.0).epsilon(1e-15));

  // perfect: all relevant in top-k with K_m = k
  AnnotationMatrix perfect(1, 6);
  perfect.values = {1, 1, 1, -1, -1, -1};
  const TopkResult p = topk_prf(scores, perfect, 3);
  CHECK(p.precision == 1.0);
  CHECK(p.recall == 1.0);
  CHECK(p.f1 == 1.0);

  // equal scores: top-k is the first k indices
  Matrix flat(1, 6);
  const TopkResult t = topk_prf(flat, truth, 3);
  CHECK(t.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(topk_prf(scores, truth, 7), ContractError);
}

TEST_CASE("metric implementations agree exactly with brute-force oracles") {
  Rng rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    const RandomInstance inst = random_instance(rng, trial % 3 == 0);
    CHECK(miap(inst.scores, inst.truth) ==
          oracle::miap(inst.scores, inst.truth));
    const std::size_t k =
        1 + static_cast<std::size_t>(rng.uniform() *
                                     static_cast<double>(inst.truth.cols));
    const TopkResult mine = topk_prf(inst.scores, inst.truth, k);
    const TopkResult ref = oracle::topk(inst.scores, inst.truth, k);
    CHECK(mine.precision == ref.precision);
    CHECK(mine.recall == ref.recall);
    CHECK(mine.f1 == ref.f1);
    CHECK(mine.precision >= 0.0);
    CHECK(mine.precision <= 1.0);
    CHECK(mine.recall >= 0.0);
    CHECK(mine.recall <= 1.0);

    AnnotationMatrix pred(inst.truth.rows, inst.truth.cols);
    for (std::size_t i = 0; i < pred.values.size(); ++i)
      pred.values[i] = rng.uniform() < 0.5 ? 1 : -1;
    CHECK(hamming_loss(pred, inst.truth) == oracle::hamming(pred, inst.truth));
  }
}

TEST_CASE("label-column permutation invariance with distinct scores") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 4);
    const std::size_t l = 3 + static_cast<std::size_t>(rng.uniform() * 8);
    Matrix scores(m, l);
    AnnotationMatrix truth(m, l);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < l; ++j) {
        scores(i, j) = rng.normal();
        truth.set(i, j, rng.uniform() < 0.5 ? 1 : -1);
      }
    truth.set(0, 0, 1);

    std::vector<std::size_t> perm(l);
    for (std::size_t j = 0; j < l; ++j) perm[j] = j;
    for (std::size_t j = l; j > 1; --j)
      std::swap(perm[j - 1],
                perm[static_cast<std::size_t>(rng.uniform() * j)]);

    const Matrix ps = select_cols(scores, perm);
    const AnnotationMatrix pt = select_cols(truth, perm);
    CHECK(miap(ps, pt) == doctest::Approx(miap(scores, truth)).epsilon(1e-14));
    const TopkResult a = topk_prf(scores, truth, 3);
    const TopkResult b = topk_prf(ps, pt, 3);
    CHECK(a.precision == doctest::Approx(b.precision).epsilon(1e-14));
    CHECK(a.recall == doctest::Approx(b.recall).epsilon(1e-14));
  }
}

TEST_CASE("distance_bins grouping and remainder rule") {
  Rng rng(31);
  Matrix seen(10, 2);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 2; ++j) seen(i, j) = rng.normal();
  Matrix unseen(2990, 2);
  for (std::size_t i = 0; i < 2990; ++i)
    for (std::size_t j = 0; j < 2; ++j) unseen(i, j) = 5.0 * rng.normal();

  const DistanceBins bins = distance_bins(seen, unseen, BinSpec{});
  REQUIRE(bins.groups.size() == 7);
  CHECK(bins.groups[0].seen);
  CHECK(bins.groups[0].labels.size() == 10);
  for (int g = 1; g <= 5; ++g) CHECK(bins.groups[g].labels.size() == 500);
  CHECK(bins.groups[6].labels.size() == 490);

  // distances ascend across bins
  for (std::size_t g = 2; g < bins.groups.size(); ++g)
    CHECK(bins.groups[g].mean_distance >= bins.groups[g - 1].mean_distance);

  // a coincident unseen label has distance 0 and lands in the first bin
  Matrix coincident = unseen;
  coincident(17, 0) = seen(3, 0);
  coincident(17, 1) = seen(3, 1);
  const DistanceBins bins2 = distance_bins(seen, coincident, BinSpec{});
  CHECK(bins2.groups[1].labels.front() == 10 + 17);

  // bin size >= L_unseen puts everything in one bin
  BinSpec wide;
  wide.bin_size = 5000;
  const DistanceBins single = distance_bins(seen, unseen, wide);
  CHECK(single.groups.size() == 2);
  CHECK(single.groups[1].labels.size() == 2990);

  BinSpec no_seen;
  no_seen.include_seen_group = false;
  CHECK(distance_bins(seen, unseen, no_seen).groups.size() == 6);
}

TEST_CASE("evaluate_scores bundles consistent values") {
  Rng rng(8);
  const RandomInstance inst = random_instance(rng, false);
  const MetricReport report = evaluate_scores(inst.scores, inst.truth, 2);
  CHECK(report.k == 2);
  CHECK(report.miap >= 0.0);
  CHECK(report.miap <= 1.0);
  CHECK(report.hamming >= 0.0);
  CHECK(report.hamming <= 1.0);
  if (report.precision_at_k + report.recall_at_k > 0.0)
    CHECK(report.f1_at_k ==
          doctest::Approx(2.0 * report.precision_at_k * report.recall_at_k /
                          (report.precision_at_k + report.recall_at_k)));
}
