#include <doctest.h>
#include <fscil/gaussian.hpp>

#include <cmath>

using namespace fscil;

namespace {

Mat identity(int d) {
  Mat m(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

ClassGaussian unit_gaussian(int class_id, Vec mean) {
  ClassGaussian g;
  g.class_id = class_id;
  g.layer_id = 0;
  g.cov = identity(static_cast<int>(mean.size()));
  g.mean = std::move(mean);
  return g;
}

}  // namespace

TEST_SUITE("gaussian") {

TEST_CASE("fit matches the hand-computed unbiased estimate") {
  std::vector<Vec> samples = {{1.0, 2.0}, {-1.0, -2.0}};
  ClassGaussian g = fit_gaussian(samples, 3, 1);
  CHECK(g.class_id == 3);
  CHECK(g.layer_id == 1);
  CHECK(g.mean[0] == doctest::Approx(0.0));
  CHECK(g.mean[1] == doctest::Approx(0.0));
  CHECK(g.cov(0, 0) == doctest::Approx(2.0));
  CHECK(g.cov(0, 1) == doctest::Approx(4.0));
  CHECK(g.cov(1, 0) == doctest::Approx(4.0));
  CHECK(g.cov(1, 1) == doctest::Approx(8.0));
  CHECK_THROWS_AS(fit_gaussian({{1.0}}, 0, 0), Error);
}

TEST_CASE("novel covariance averages the most similar base classes") {
  std::vector<ClassGaussian> base;
  base.push_back(unit_gaussian(0, {1.0, 0.0}));
  base.push_back(unit_gaussian(1, {0.0, 1.0}));
  base.push_back(unit_gaussian(2, {-1.0, 0.0}));
  base[1].cov(0, 0) = 5.0;
  base[2].cov(0, 0) = 9.0;

  // nearest to (0.9, 0.1) is class 0 (cov I), then class 1
  Mat top1 = novel_covariance({0.9, 0.1}, base, 1);
  CHECK(top1(0, 0) == doctest::Approx(1.0));
  Mat top2 = novel_covariance({0.9, 0.1}, base, 2);
  CHECK(top2(0, 0) == doctest::Approx(3.0));  // (1 + 5) / 2

  // equidistant between classes 0 and 1: the lower id wins the tiebreak
  Mat tied = novel_covariance({1.0, 1.0}, base, 1);
  CHECK(tied(0, 0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(novel_covariance({1.0, 0.0}, base, 4), Error);
}

TEST_CASE("cholesky factors known matrices and rejects the rest") {
  Mat a(2, 2);
  a(0, 0) = 4.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 3.0;
  Mat l = cholesky(a);
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(1, 0) == doctest::Approx(1.0));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(l(0, 1) == 0.0);

  Mat indefinite(2, 2);
  indefinite(0, 0) = 1.0;
  indefinite(0, 1) = 2.0;
  indefinite(1, 0) = 2.0;
  indefinite(1, 1) = 1.0;
  CHECK_THROWS_AS(cholesky(indefinite), Error);

  CHECK_THROWS_AS(cholesky(Mat(2, 3)), Error);
}

TEST_CASE("sampling is deterministic under a fixed stream") {
  ClassGaussian g = unit_gaussian(0, {1.0, -1.0, 0.5});
  Rng r1 = stream_rng(5, 9);
  Rng r2 = stream_rng(5, 9);
  auto a = sample_gaussian(g, 8, r1);
  auto b = sample_gaussian(g, 8, r2);
  REQUIRE(a.size() == 8);
  CHECK(a == b);
  Rng r3 = stream_rng(5, 10);
  CHECK(sample_gaussian(g, 8, r3) != a);
}

TEST_CASE("sample moments approach the model") {
  int d = 4, n = 20000;
  Vec mu = {2.0, -1.0, 0.5, 3.0};
  Mat cov(d, d);
  for (int i = 0; i < d; ++i) cov(i, i) = 1.0 + 0.5 * i;
  cov(0, 1) = cov(1, 0) = 0.4;
  ClassGaussian g;
  g.mean = mu;
  g.cov = cov;
  Rng rng = stream_rng(42, 0);
  auto draws = sample_gaussian(g, n, rng);

  Vec mean(d, 0.0);
  for (const Vec& x : draws) {
    for (int i = 0; i < d; ++i) mean[i] += x[i];
  }
  for (int i = 0; i < d; ++i) mean[i] /= n;
  for (int i = 0; i < d; ++i) CHECK(std::abs(mean[i] - mu[i]) < 0.05);

  Mat sample_cov(d, d);
  for (const Vec& x : draws) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        sample_cov(i, j) += (x[i] - mean[i]) * (x[j] - mean[j]);
      }
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      sample_cov(i, j) /= n - 1;
      CHECK(std::abs(sample_cov(i, j) - cov(i, j)) < 0.1);
    }
  }
}

}  // TEST_SUITE
