#include <doctest.h>

#include <stdexcept>

#include "weeklyfc/metrics.hpp"

using namespace wfc;

TEST_CASE("smape is zero on perfect forecasts") {
  CHECK(smape({3, 4, 5}, {3, 4, 5}) == doctest::Approx(0.0));
}

TEST_CASE("smape single point hand value") {
  // 100 * (2*10/210) = 9.5238...
  CHECK(smape({110}, {100}) == doctest::Approx(100.0 * 20.0 / 210.0).epsilon(1e-12));
}

TEST_CASE("smape standard rejects the 0/0 case") {
  CHECK_THROWS_WITH_AS(smape({0.0}, {0.0}, SmapeVariant::standard),
                       doctest::Contains("suilin"), std::runtime_error);
}

TEST_CASE("smape suilin handles zeros") {
  // Numerator 0, denominator max(0 + 0.1, 0.6) = 0.6.
  CHECK(smape({0.0}, {0.0}, SmapeVariant::suilin, 0.1) == doctest::Approx(0.0));
  // F=1, Y=0: 100 * 2*1 / max(1.1, 0.6) = 200/1.1.
  CHECK(smape({1.0}, {0.0}, SmapeVariant::suilin, 0.1) ==
        doctest::Approx(200.0 / 1.1).epsilon(1e-12));
}

TEST_CASE("smape stays within [0, 200] on non-negative data") {
  CHECK(smape({0.0, 1000.0}, {500.0, 0.0}, SmapeVariant::suilin) <= 200.0);
  CHECK(smape({1e-6}, {1e6}) <= 200.0);
}

TEST_CASE("mase naive continuation hand fixture") {
  // Training [10,12,11,14,13,15], S=1: scale = (2/5)*(2+1+3+1+2) = 3.6.
  // Naive forecasts [15,15] vs actuals [16,13]: |e| sum = 3. MASE = 5/6.
  const std::vector<double> training{10, 12, 11, 14, 13, 15};
  const double value = mase({15, 15}, {16, 13}, training, 1);
  CHECK(value == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("mase degenerate periodic training errors out") {
  std::vector<double> training;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 52; ++i) training.push_back(static_cast<double>(i));
  CHECK_THROWS_WITH_AS(mase({1, 2}, {1, 2}, training, 52),
                       doctest::Contains("undefined"), std::runtime_error);
}

TEST_CASE("mase is scale invariant") {
  const std::vector<double> training{10, 12, 11, 14, 13, 15};
  const std::vector<double> f{14, 15}, y{16, 13};
  const double base = mase(f, y, training, 1);
  std::vector<double> f10, y10, t10;
  for (double v : f) f10.push_back(10 * v);
  for (double v : y) y10.push_back(10 * v);
  for (double v : training) t10.push_back(10 * v);
  CHECK(mase(f10, y10, t10, 1) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("mase benchmark selection") {
  CHECK(select_mase_benchmark("M4", true, 80) == 1);
  CHECK(select_mase_benchmark("Solar", true, 39) == 1);
  CHECK(select_mase_benchmark("NN5", true, 105) == 52);
  CHECK(select_mase_benchmark("Ausgrid", false, 148) == 1);
}

TEST_CASE("aggregate mean and median") {
  auto a = aggregate_errors({1, 2, 3});
  CHECK(a.mean == doctest::Approx(2.0));
  CHECK(a.median == doctest::Approx(2.0));
  auto b = aggregate_errors({1, 2, 3, 100});
  CHECK(b.mean == doctest::Approx(26.5));
  CHECK(b.median == doctest::Approx(2.5));
  auto c = aggregate_errors({7.5});
  CHECK(c.mean == doctest::Approx(7.5));
  CHECK(c.median == doctest::Approx(7.5));
}
