#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "weeklyfc/series.hpp"

using namespace wfc;

namespace {

TimeSeries make_series(std::vector<double> values, Granularity g,
                       const std::string& id = "s1") {
  TimeSeries s;
  s.id = id;
  s.values = std::move(values);
  s.granularity = g;
  return s;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

TEST_CASE("aggregation of constant daily blocks") {
  auto weekly = aggregate_to_weekly(
      make_series(std::vector<double>(14, 1.0), Granularity::daily));
  REQUIRE(weekly.values.size() == 2);
  CHECK(weekly.values[0] == doctest::Approx(7.0));
  CHECK(weekly.values[1] == doctest::Approx(7.0));
  CHECK(weekly.granularity == Granularity::weekly);
}

TEST_CASE("aggregation drops the trailing partial block") {
  auto weekly = aggregate_to_weekly(
      make_series({1, 2, 3, 4, 5, 6, 7, 8}, Granularity::daily));
  REQUIRE(weekly.values.size() == 1);
  CHECK(weekly.values[0] == doctest::Approx(28.0));
}

TEST_CASE("daily length 791 becomes 113 weekly points, split 105/8") {
  std::vector<double> daily(791);
  for (std::size_t i = 0; i < daily.size(); ++i)
    daily[i] = 10.0 + (i % 7);
  auto weekly = aggregate_to_weekly(make_series(daily, Granularity::daily));
  REQUIRE(weekly.values.size() == 113);
  auto split = split_last_h(weekly, 8);
  CHECK(split.training.size() == 105);
  CHECK(split.validation.size() == 8);
}

TEST_CASE("aggregation preserves totals over complete blocks") {
  std::vector<double> daily;
  for (int i = 0; i < 70; ++i) daily.push_back(0.1 * i * i - 0.3 * i + 5.0);
  auto weekly = aggregate_to_weekly(make_series(daily, Granularity::daily));
  double raw_total = 0.0, weekly_total = 0.0;
  for (double v : daily) raw_total += v;
  for (double v : weekly.values) weekly_total += v;
  CHECK(weekly_total == doctest::Approx(raw_total).epsilon(1e-9));
}

TEST_CASE("aggregation errors") {
  CHECK_THROWS_WITH_AS(
      aggregate_to_weekly(make_series({1, 2, 3}, Granularity::daily)),
      doctest::Contains("too short"), std::runtime_error);
  CHECK_THROWS_AS(
      aggregate_to_weekly(make_series({1, 2, 3}, Granularity::weekly)),
      std::invalid_argument);
  CHECK_THROWS_AS(aggregate_to_weekly(
                      make_series({1, 2, 3, 4, 5, 6, 7, 8}, Granularity::daily),
                      /*drop_incomplete=*/false),
                  std::runtime_error);
}

TEST_CASE("block sizes per granularity") {
  CHECK(block_size(Granularity::daily) == 7);
  CHECK(block_size(Granularity::hourly) == 168);
  CHECK(block_size(Granularity::half_hourly) == 336);
  CHECK(block_size(Granularity::ten_minute) == 1008);
}

TEST_CASE("median imputation") {
  auto s = impute_missing(make_series({1.0, kNaN, 3.0}, Granularity::daily),
                          ImputePolicy::median);
  CHECK(s.values[1] == doctest::Approx(2.0));
  auto c = impute_missing(make_series({4.0, 4.0, kNaN, 4.0}, Granularity::daily),
                          ImputePolicy::median);
  CHECK(c.values[2] == doctest::Approx(4.0));
}

TEST_CASE("zero imputation") {
  auto s = impute_missing(make_series({kNaN, 5.0}, Granularity::daily),
                          ImputePolicy::zero);
  CHECK(s.values[0] == doctest::Approx(0.0));
  CHECK(s.values[1] == doctest::Approx(5.0));
}

TEST_CASE("imputation is idempotent and rejects all-missing") {
  auto once = impute_missing(make_series({1.0, kNaN, 3.0}, Granularity::daily),
                             ImputePolicy::median);
  auto twice = impute_missing(once, ImputePolicy::median);
  CHECK(once.values == twice.values);
  CHECK_THROWS_AS(impute_missing(make_series({kNaN, kNaN}, Granularity::daily),
                                 ImputePolicy::median),
                  std::runtime_error);
  CHECK_THROWS_AS(impute_missing(make_series({kNaN, kNaN}, Granularity::daily),
                                 ImputePolicy::zero),
                  std::runtime_error);
}

TEST_CASE("split keeps the final h points") {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto split = split_last_h(v, 3);
  CHECK(split.training == std::vector<double>{1, 2, 3, 4, 5, 6, 7});
  CHECK(split.validation == std::vector<double>{8, 9, 10});

  // Concatenation restores the original.
  std::vector<double> re = split.training;
  re.insert(re.end(), split.validation.begin(), split.validation.end());
  CHECK(re == v);

  CHECK_THROWS_AS(split_last_h(std::vector<double>{1, 2}, 2),
                  std::invalid_argument);
}

TEST_CASE("dataset file round trip with missing markers") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "wfc_test_dataset.csv";

  RawDataset ds;
  ds.name = "demo";
  ds.granularity = Granularity::daily;
  ds.start_timestamp = "2006-01-01";
  ds.series.push_back(make_series({1.5, kNaN, 3.25}, Granularity::daily, "T1"));
  ds.series.push_back(make_series({4, 5, 6, 7}, Granularity::daily, "T2"));
  write_dataset_file(path.string(), ds);

  auto back = read_dataset_file(path.string());
  CHECK(back.name == "demo");
  CHECK(back.granularity == Granularity::daily);
  REQUIRE(back.series.size() == 2);
  CHECK(back.series[0].id == "T1");
  CHECK(std::isnan(back.series[0].values[1]));
  CHECK(back.series[0].values[2] == doctest::Approx(3.25));
  CHECK(back.series[1].values.size() == 4);
  fs::remove(path);
}

TEST_CASE("load_weekly_dataset imputes, aggregates and validates") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "wfc_test_load.csv";
  {
    RawDataset ds;
    ds.name = "mini";
    ds.granularity = Granularity::daily;
    std::vector<double> v(35, 2.0);
    v[3] = kNaN;
    ds.series.push_back(make_series(v, Granularity::daily, "A"));
    write_dataset_file(path.string(), ds);
  }
  auto weekly = load_weekly_dataset(path.string(), 2, ImputePolicy::median);
  REQUIRE(weekly.series.size() == 1);
  CHECK(weekly.series[0].values.size() == 5);
  CHECK(weekly.series[0].values[0] == doctest::Approx(14.0));

  auto truncated = load_weekly_dataset(path.string(), 2, ImputePolicy::median, 4);
  CHECK(truncated.series[0].values.size() == 4);
  fs::remove(path);
}
