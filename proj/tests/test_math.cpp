#include <doctest.h>

#include <cmath>

#include "weeklyfc/common.hpp"
#include "weeklyfc/math.hpp"
#include "weeklyfc/optim.hpp"

using namespace wfc;

TEST_CASE("fourier terms at full and quarter period") {
  FourierSpec spec(52.0, 1);
  auto full = fourier_row(spec, 52);
  CHECK(std::fabs(full[0]) < 1e-12);
  CHECK(full[1] == doctest::Approx(1.0).epsilon(1e-12));
  auto quarter = fourier_row(spec, 13);
  CHECK(quarter[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(quarter[1]) < 1e-12);
}

TEST_CASE("fourier terms match an arbitrary-precision reference") {
  // Frozen from a 50-digit evaluation of sin/cos(2*pi*k*t/s), s=52.18, t=7.
  FourierSpec spec(52.18, 2);
  auto row = fourier_row(spec, 7);
  CHECK(row[0] == doctest::Approx(0.74657276136545043801).epsilon(1e-14));
  CHECK(row[1] == doctest::Approx(0.66530377421683562387).epsilon(1e-14));
  CHECK(row[2] == doctest::Approx(0.99339535172783828018).epsilon(1e-14));
  CHECK(row[3] == doctest::Approx(-0.11474177602566761232).epsilon(1e-14));
}

TEST_CASE("fourier sin^2 + cos^2 identity") {
  FourierSpec spec(52.18, 5);
  auto rows = fourier_terms(spec, -3, 40);
  for (const auto& row : rows) {
    for (int k = 0; k < spec.k_max; ++k) {
      const double s = row[2 * k], c = row[2 * k + 1];
      CHECK(s * s + c * c == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("fourier spec validation") {
  CHECK_THROWS_AS(FourierSpec(52.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(FourierSpec(10.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(fourier_terms(FourierSpec(52.0, 1), 0, 0), std::invalid_argument);
}

TEST_CASE("boxcox lambda=1 is a shift") {
  std::vector<double> y{0.5, 1.0, 100.0};
  auto z = boxcox(y, 1.0);
  for (std::size_t i = 0; i < y.size(); ++i)
    CHECK(z[i] == doctest::Approx(y[i] - 1.0));
}

TEST_CASE("boxcox lambda=0 is log") {
  CHECK(boxcox_scalar(std::exp(1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(boxcox_scalar(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(boxcox_scalar(-1.0, -0.5), std::invalid_argument);
}

TEST_CASE("boxcox round trip") {
  std::vector<double> y{0.5, 1.0, 100.0};
  for (double lambda : {0.0, 0.3, 1.0}) {
    auto back = inv_boxcox(boxcox(y, lambda), lambda);
    for (std::size_t i = 0; i < y.size(); ++i)
      CHECK(back[i] == doctest::Approx(y[i]).epsilon(1e-10));
  }
}

TEST_CASE("boxcox lambda grid picks log for exponential growth") {
  std::vector<double> y;
  for (int t = 0; t < 60; ++t) y.push_back(std::exp(0.1 * t) * (1.0 + 0.01 * ((t * 7) % 5)));
  const double lambda = boxcox_lambda(y);
  CHECK(lambda <= 0.15);
}

TEST_CASE("acf of an alternating sequence is negative at lag 1") {
  std::vector<double> v;
  for (int t = 0; t < 50; ++t) v.push_back(t % 2 == 0 ? 1.0 : -1.0);
  CHECK(acf(v, 1) < -0.9);
  CHECK(acf(v, 0) == doctest::Approx(1.0));
}

TEST_CASE("kpss flags a random walk but not noise") {
  Rng rng(42);
  std::vector<double> noise, walk;
  double cum = 0.0;
  for (int t = 0; t < 200; ++t) {
    const double e = rng.normal();
    noise.push_back(e);
    cum += e;
    walk.push_back(cum);
  }
  CHECK(kpss_statistic(noise) < 0.463);
  CHECK(kpss_statistic(walk) > 0.463);
}

TEST_CASE("least squares recovers exact coefficients") {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (int t = 0; t < 30; ++t) {
    X.push_back({1.0, static_cast<double>(t), static_cast<double>(t) * t});
    y.push_back(2.0 + 3.0 * t - 0.5 * t * t);
  }
  auto beta = least_squares(X, y);
  CHECK(beta[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(beta[1] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(beta[2] == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("least squares rejects rank deficiency") {
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (int t = 0; t < 10; ++t) {
    X.push_back({1.0, 2.0, static_cast<double>(t)});
    y.push_back(t);
  }
  CHECK_THROWS_AS(least_squares(X, y), std::runtime_error);
}

TEST_CASE("median handles even and odd counts") {
  CHECK(median_of({1.0, 2.0, 3.0}) == doctest::Approx(2.0));
  CHECK(median_of({1.0, 2.0, 3.0, 100.0}) == doctest::Approx(2.5));
  CHECK(median_of({7.0}) == doctest::Approx(7.0));
}

TEST_CASE("nelder mead minimizes a shifted quadratic") {
  auto fn = [](const std::vector<double>& x) {
    const double a = x[0] - 1.5, b = x[1] + 0.75;
    return a * a + 10.0 * b * b;
  };
  auto res = nelder_mead(fn, {0.0, 0.0}, {-5.0, -5.0}, {5.0, 5.0});
  CHECK(res.x[0] == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(res.x[1] == doctest::Approx(-0.75).epsilon(1e-4));
}

TEST_CASE("golden section finds a 1-d minimum") {
  const double m = golden_section([](double x) { return (x - 0.3) * (x - 0.3); },
                                  0.0, 1.0);
  CHECK(m == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("rng is deterministic per seed") {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 20; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(a.uniform() != c.uniform());
}
