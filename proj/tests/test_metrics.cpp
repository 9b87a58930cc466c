#include <doctest.h>
#include <fscil/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "test_support.hpp"

using namespace fscil;

namespace {

#define CHECK_CODE(expr, expected)                      \
  do {                                                  \
    try {                                               \
      (void)(expr);                                     \
      FAIL_CHECK("expected " #expected " from " #expr); \
    } catch (const Error& e) {                          \
      CHECK(e.code() == ErrorCode::expected);           \
    }                                                   \
  } while (0)

// 3 sessions, 4 base classes, 2 per novel task -> r = 2
AccuracyMatrix hand_matrix() {
  AccuracyMatrix m(TaskLayout{3, 4, 2});
  m.set(1, 1, 80.0);
  m.set(2, 1, 70.0);
  m.set(2, 2, 50.0);
  m.set(3, 1, 60.0);
  m.set(3, 2, 40.0);
  m.set(3, 3, 30.0);
  return m;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("hand-computed values on a small matrix") {
  AccuracyMatrix m = hand_matrix();
  CHECK(aacc_session(m, 1) == doctest::Approx(80.0));
  CHECK(aacc_session(m, 2) == doctest::Approx((2 * 70.0 + 50.0) / 3.0));
  CHECK(aacc_session(m, 3) == doctest::Approx((2 * 60.0 + 40.0 + 30.0) / 4.0));
  CHECK(tacc_session(m, 2) == doctest::Approx(60.0));
  CHECK(tacc_session(m, 3) == doctest::Approx(130.0 / 3.0));
  CHECK(novel_only(m, 2) == doctest::Approx(50.0));
  CHECK(novel_only(m, 3) == doctest::Approx(35.0));
  CHECK(gacc_alpha(m, 2, 0.5) == doctest::Approx(60.0));  // alpha = 1/r
  CHECK(lacc(m) == doctest::Approx(47.5));
  CHECK(tacc_overall(m) == doctest::Approx((80.0 + 60.0 + 130.0 / 3.0) / 3.0));
}

TEST_CASE("session-1 conventions") {
  AccuracyMatrix m = hand_matrix();
  CHECK(gacc_alpha(m, 1, 0.0) == 0.0);
  CHECK(gacc_alpha(m, 1, 0.25) == 80.0);
  CHECK(gacc_alpha(m, 1, 1.0) == 80.0);
  int grid = 12;
  CHECK(gacc_auc(m, 1, grid) == doctest::Approx(80.0 * (1.0 - 1.0 / (2.0 * grid))));
  CHECK(gacc_auc_closed_form(m, 1) == 80.0);
  CHECK_CODE(novel_only(m, 1), NoNovelTasks);
  CHECK_CODE(hacc(m, 1), NoNovelTasks);
}

TEST_CASE("endpoint identities hold on random matrices") {
  Rng rng = stream_rng(21, 0);
  for (int trial = 0; trial < 200; ++trial) {
    TaskLayout layout = testsup::random_layout(rng);
    AccuracyMatrix m = testsup::random_matrix(layout, rng);
    double r = layout.base_ratio();
    for (int i = 1; i <= layout.n_tasks; ++i) {
      CHECK(gacc_alpha(m, i, 1.0) == aacc_session(m, i));
      if (r >= 1.0) {  // 1/r is inside the alpha domain only for base-heavy layouts
        double g = gacc_alpha(m, i, 1.0 / r);
        double t = tacc_session(m, i);
        CHECK(std::abs(g - t) <= 1e-12 * std::max(std::abs(t), 1.0));
      }
      if (i >= 2) CHECK(gacc_alpha(m, i, 0.0) == novel_only(m, i));
    }
  }
}

TEST_CASE("gacc is monotone with the base-novel gap and bounded by row extremes") {
  Rng rng = stream_rng(22, 0);
  for (int trial = 0; trial < 100; ++trial) {
    TaskLayout layout = testsup::random_layout(rng);
    AccuracyMatrix m = testsup::random_matrix(layout, rng);
    for (int i = 2; i <= layout.n_tasks; ++i) {
      double gap = m.at(i, 1) - novel_only(m, i);
      double lo = 100.0, hi = 0.0;
      for (int j = 1; j <= i; ++j) {
        lo = std::min(lo, m.at(i, j));
        hi = std::max(hi, m.at(i, j));
      }
      double prev = gacc_alpha(m, i, 0.0);
      for (int k = 1; k <= 10; ++k) {
        double cur = gacc_alpha(m, i, k / 10.0);
        if (gap > 1e-9) CHECK(cur >= prev - 1e-12);
        if (gap < -1e-9) CHECK(cur <= prev + 1e-12);
        CHECK(cur >= lo - 1e-9);
        CHECK(cur <= hi + 1e-9);
        prev = cur;
      }
    }
  }
}

TEST_CASE("auc of a constant row is the constant") {
  AccuracyMatrix m(TaskLayout{3, 6, 3});
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= i; ++j) m.set(i, j, 42.0);
  }
  CHECK(gacc_auc(m, 2, 50) == doctest::Approx(42.0).epsilon(1e-12));
  CHECK(gacc_auc(m, 3, 50) == doctest::Approx(42.0).epsilon(1e-12));
  CHECK(gacc_auc_closed_form(m, 3) == doctest::Approx(42.0).epsilon(1e-9));
}

TEST_CASE("fine trapezoid agrees with the closed form") {
  Rng rng = stream_rng(23, 0);
  for (int trial = 0; trial < 20; ++trial) {
    TaskLayout layout = testsup::random_layout(rng);
    AccuracyMatrix m = testsup::random_matrix(layout, rng);
    for (int i = 2; i <= layout.n_tasks; ++i) {
      double fine = gacc_auc(m, i, 20000);
      double exact = gacc_auc_closed_form(m, i);
      CHECK(std::abs(fine - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("default grid rounds the base ratio and clamps at 2") {
  CHECK(default_grid(TaskLayout{9, 60, 5}) == 12);
  CHECK(default_grid(TaskLayout{3, 10, 3}) == 3);
  CHECK(default_grid(TaskLayout{3, 1, 1}) == 2);
  CHECK(default_grid(TaskLayout{3, 1, 4}) == 2);
}

TEST_CASE("curve covers the grid endpoints") {
  AccuracyMatrix m = hand_matrix();
  GaccCurve c = gacc_curve(m, 3, 4);
  REQUIRE(c.alphas.size() == 5);
  CHECK(c.alphas.front() == 0.0);
  CHECK(c.alphas.back() == 1.0);
  CHECK(c.values.front() == doctest::Approx(35.0));
  CHECK(c.values.back() == doctest::Approx(47.5));
}

TEST_CASE("hacc behaves like a harmonic mean with a zero convention") {
  CHECK(harmonic_mean(0.0, 0.0) == 0.0);
  CHECK(harmonic_mean(80.0, 0.0) == 0.0);
  CHECK(harmonic_mean(0.0, 80.0) == 0.0);
  CHECK(harmonic_mean(50.0, 50.0) == doctest::Approx(50.0));
  AccuracyMatrix m = hand_matrix();
  CHECK(hacc(m, 3) == doctest::Approx(2.0 * 60.0 * 35.0 / 95.0));
}

TEST_CASE("forgetting block on the hand matrix") {
  ForgettingBlock fb = forgetting_block(hand_matrix());
  REQUIRE(fb.pd.size() == 3);
  CHECK(fb.pd[0] == doctest::Approx(20.0));
  CHECK(fb.pd[1] == doctest::Approx(10.0));
  CHECK(fb.pd[2] == doctest::Approx(0.0));
  CHECK(fb.rpd[0].value() == doctest::Approx(0.25));
  CHECK(fb.rpd[1].value() == doctest::Approx(0.2));
  CHECK(fb.f[0] == doctest::Approx(20.0));
  CHECK(fb.f[1] == doctest::Approx(10.0));
  CHECK(fb.f[2] == doctest::Approx(0.0));
  CHECK(fb.kr[2][0].value() == doctest::Approx(0.75));
  CHECK(fb.kr[2][1].value() == doctest::Approx(0.8));
  CHECK(fb.kr[2][2].value() == doctest::Approx(1.0));
}

TEST_CASE("zero diagonals surface as null ratios, not crashes") {
  AccuracyMatrix m(TaskLayout{2, 4, 2});
  m.set(1, 1, 0.0);
  m.set(2, 1, 0.0);
  m.set(2, 2, 0.0);
  ForgettingBlock fb = forgetting_block(m);
  CHECK_FALSE(fb.rpd[0].has_value());
  CHECK_FALSE(fb.kr[1][0].has_value());
  CHECK(hacc(m, 2) == 0.0);
}

TEST_CASE("report json carries the full schema") {
  AccuracyMatrix m = hand_matrix();
  MetricReport report = build_report(m, 4);
  nlohmann::json doc = nlohmann::json::parse(report_json(report));
  CHECK(doc["layout"]["n_tasks"] == 3);
  REQUIRE(doc["per_session"].size() == 3);
  CHECK(doc["per_session"][0]["i"] == 1);
  CHECK(doc["per_session"][0]["novel_only"].is_null());
  CHECK(doc["per_session"][0]["hacc"].is_null());
  CHECK(doc["per_session"][2]["aacc"].get<double>() == doctest::Approx(47.5));
  CHECK(doc["aggregate"]["lacc"].get<double>() == doctest::Approx(47.5));
  CHECK(doc["forgetting"]["pd"].size() == 3);
  CHECK(doc["forgetting"]["kr"][2].size() == 3);
}

TEST_CASE("curve csv shape matches the grid") {
  AccuracyMatrix m = hand_matrix();
  std::string csv = curve_csv(m, 4);
  CHECK(csv.rfind("alpha,session_1,session_2,session_3\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 grid points
}

TEST_CASE("metric keys parse and rank") {
  CHECK(parse_metric_key("gacc") == MetricKey::Gacc);
  CHECK_CODE(parse_metric_key("accuracy"), UnknownMetric);

  AccuracyMatrix good = hand_matrix();
  AccuracyMatrix bad = hand_matrix();
  bad.set(3, 1, 10.0);
  bad.set(3, 2, 10.0);
  bad.set(3, 3, 10.0);
  std::vector<std::pair<std::string, AccuracyMatrix>> named = {
      {"tied_b", good}, {"weak", bad}, {"tied_a", good}};
  auto ranked = compare(named, MetricKey::Lacc, std::nullopt, 4);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].name == "tied_a");  // ties alphabetical
  CHECK(ranked[1].name == "tied_b");
  CHECK(ranked[2].name == "weak");
  CHECK(ranked[0].value == doctest::Approx(47.5));

  AccuracyMatrix other(TaskLayout{2, 4, 2});
  other.set(1, 1, 1.0);
  other.set(2, 1, 1.0);
  other.set(2, 2, 1.0);
  named.emplace_back("alien", other);
  CHECK_CODE(compare(named, MetricKey::Lacc, std::nullopt, 4), LayoutMismatch);
}

TEST_CASE("metric_value honours the alpha override") {
  AccuracyMatrix m = hand_matrix();
  double at_one = metric_value(m, MetricKey::Gacc, 1.0, 4);
  double expected = (aacc_session(m, 1) + aacc_session(m, 2) + aacc_session(m, 3)) / 3.0;
  CHECK(at_one == doctest::Approx(expected));
  CHECK(metric_value(m, MetricKey::Hacc, std::nullopt, 4) == doctest::Approx(hacc(m, 3)));
  CHECK(metric_value(m, MetricKey::Novel, std::nullopt, 4) == doctest::Approx(35.0));
}

TEST_CASE("range guards") {
  AccuracyMatrix m = hand_matrix();
  CHECK_CODE(gacc_alpha(m, 2, -0.1), AlphaOutOfRange);
  CHECK_CODE(gacc_alpha(m, 2, 1.1), AlphaOutOfRange);
  CHECK_CODE(gacc_auc(m, 2, 1), GridTooSmall);
  CHECK_CODE(aacc_session(m, 0), SessionOutOfRange);
  CHECK_CODE(aacc_session(m, 4), SessionOutOfRange);
}

}  // TEST_SUITE
