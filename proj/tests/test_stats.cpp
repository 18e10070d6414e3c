#include <doctest.h>

#include <algorithm>

#include "weeklyfc/common.hpp"
#include "weeklyfc/stats.hpp"

using namespace wfc;

TEST_CASE("chi-square and normal tails match references") {
  // Frozen from an independent statistics library evaluation.
  CHECK(chi_square_upper_tail(7.5, 3) == doctest::Approx(0.0575584519726364).epsilon(1e-10));
  CHECK(chi_square_upper_tail(25.0, 12) == doctest::Approx(0.014822874597441575).epsilon(1e-10));
  CHECK(normal_two_sided_p(2.5) == doctest::Approx(0.012419330651552265).epsilon(1e-10));
  CHECK(normal_two_sided_p(-2.5) == doctest::Approx(0.012419330651552265).epsilon(1e-10));
}

TEST_CASE("friedman strictly dominant method has mean rank 1") {
  std::vector<std::vector<double>> errors;
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const double base = 5.0 + rng.uniform();
    errors.push_back({base - 1.0, base + rng.uniform(), base + 1.0 + rng.uniform()});
  }
  auto res = friedman_test(errors);
  CHECK(res.mean_ranks[0] == doctest::Approx(1.0));
  CHECK(res.mean_ranks[1] > 1.0);
}

TEST_CASE("friedman fixture matches a reference computation") {
  // 4 methods x 6 blocks, includes ties; frozen from an independent
  // rank-sum implementation.
  const std::vector<std::vector<double>> errors{
      {14.1, 12.3, 13.0, 11.8}, {9.8, 10.2, 9.5, 9.9},  {22.0, 21.5, 21.5, 20.0},
      {5.5, 6.0, 5.9, 5.1},     {17.2, 16.8, 17.9, 15.5}, {8.4, 8.4, 8.1, 7.7}};
  auto res = friedman_test(errors);
  CHECK(res.statistic == doctest::Approx(7.293103448275874).epsilon(1e-12));
  CHECK(res.p_value == doctest::Approx(0.06311973378743262).epsilon(1e-10));
  CHECK(res.mean_ranks[0] == doctest::Approx(37.0 / 12.0).epsilon(1e-12));
  CHECK(res.mean_ranks[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(res.mean_ranks[2] == doctest::Approx(31.0 / 12.0).epsilon(1e-12));
  CHECK(res.mean_ranks[3] == doctest::Approx(16.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("friedman is invariant to column permutation") {
  const std::vector<std::vector<double>> errors{
      {1.0, 2.0, 3.0}, {2.0, 1.0, 3.0}, {1.5, 2.5, 3.5}, {1.0, 3.0, 2.0}};
  std::vector<std::vector<double>> permuted;
  for (const auto& row : errors) permuted.push_back({row[2], row[0], row[1]});
  auto a = friedman_test(errors);
  auto b = friedman_test(permuted);
  CHECK(a.statistic == doctest::Approx(b.statistic));
  CHECK(a.mean_ranks[0] == doctest::Approx(b.mean_ranks[1]));
  CHECK(a.mean_ranks[1] == doctest::Approx(b.mean_ranks[2]));
  CHECK(a.mean_ranks[2] == doctest::Approx(b.mean_ranks[0]));
}

TEST_CASE("friedman depends only on ranks") {
  const std::vector<std::vector<double>> errors{
      {1.0, 2.0, 3.0}, {2.0, 1.0, 3.0}, {1.5, 2.5, 3.5}, {1.0, 3.0, 2.0}};
  std::vector<std::vector<double>> transformed;
  for (const auto& row : errors) {
    std::vector<double> r;
    for (double v : row) r.push_back(std::exp(v));  // strictly monotone
    transformed.push_back(r);
  }
  CHECK(friedman_test(errors).statistic ==
        doctest::Approx(friedman_test(transformed).statistic));
}

TEST_CASE("friedman all-identical rows degenerate to p = 1") {
  const std::vector<std::vector<double>> errors{{2.0, 2.0, 2.0}, {5.0, 5.0, 5.0}};
  auto res = friedman_test(errors);
  CHECK(res.statistic == doctest::Approx(0.0));
  CHECK(res.p_value == doctest::Approx(1.0));
}

TEST_CASE("hochberg excludes the control and is monotone") {
  const std::vector<double> mean_ranks{1.2, 2.4, 3.1, 3.3};
  auto entries = hochberg_posthoc(mean_ranks, 50);
  CHECK(entries.size() == 3);
  for (const auto& e : entries) CHECK(e.method_index != 0);
  for (std::size_t i = 1; i < entries.size(); ++i) {
    CHECK(entries[i - 1].adjusted_p <= entries[i].adjusted_p);
    CHECK(entries[i - 1].raw_p <= entries[i].raw_p);
  }
  for (const auto& e : entries) {
    CHECK(e.adjusted_p >= e.raw_p);
    CHECK(e.adjusted_p <= 1.0);
  }
}

TEST_CASE("hochberg two-method case equals the raw p") {
  const std::vector<double> mean_ranks{1.3, 1.7};
  auto entries = hochberg_posthoc(mean_ranks, 30);
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].adjusted_p == doctest::Approx(entries[0].raw_p));
  CHECK(entries[0].method_index == 1);
}
