#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "weeklyfc/theta.hpp"

using namespace wfc;

TEST_CASE("theta on a constant series forecasts the constant") {
  std::vector<double> series(20, 5.0);
  auto fc = theta_fit_forecast(series, 3);
  REQUIRE(fc.size() == 3);
  for (double f : fc) CHECK(f == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("theta tracks a noiseless line within 2 percent") {
  std::vector<double> series;
  for (int t = 1; t <= 50; ++t) series.push_back(2.0 * t);
  auto fc = theta_fit_forecast(series, 2);
  CHECK(fc[0] == doctest::Approx(2.0 * 51).epsilon(0.02));
  CHECK(fc[1] == doctest::Approx(2.0 * 52).epsilon(0.02));
}

TEST_CASE("theta rejects too-short series") {
  CHECK_THROWS_WITH_AS(theta_fit_forecast({1.0, 2.0}, 1),
                       doctest::Contains("too short"), std::invalid_argument);
}

TEST_CASE("theta model decomposes into level plus linear drift") {
  std::vector<double> series{3, 5, 4, 6, 5, 7, 6, 8, 7, 9};
  auto model = theta_fit(series);
  auto fc = theta_forecast(model, 4);
  for (int j = 1; j <= 4; ++j)
    CHECK(fc[j - 1] == doctest::Approx(model.level + j * model.drift));
  CHECK(model.alpha >= 0.0);
  CHECK(model.alpha <= 1.0);
}

TEST_CASE("theta determinism") {
  std::vector<double> series{10, 12, 9, 14, 11, 16, 13, 18};
  auto a = theta_fit_forecast(series, 5);
  auto b = theta_fit_forecast(series, 5);
  CHECK(a == b);
}
