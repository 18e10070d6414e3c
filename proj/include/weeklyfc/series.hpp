#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weeklyfc/common.hpp"

namespace wfc {

enum class Granularity { ten_minute, half_hourly, hourly, daily, weekly };

Granularity granularity_from_string(const std::string& s);
std::string to_string(Granularity g);

// Observations per weekly block for a sub-weekly granularity.
int block_size(Granularity g);

// A univariate series. Missing observations are carried as NaN between
// parsing and imputation; all downstream consumers require finite values.
struct TimeSeries {
  std::string id;
  std::vector<double> values;
  std::optional<std::string> start_timestamp;
  Granularity granularity = Granularity::weekly;

  bool has_missing() const {
    for (double v : values)
      if (std::isnan(v)) return true;
    return false;
  }
};

struct WeeklyDataset {
  std::string name;
  std::vector<TimeSeries> series;
  int horizon = 0;
  int seasonal_period_integer = 52;
  double seasonal_period_real = 52.18;
  bool seasonal = true;

  void validate() const;
};

struct SplitSeries {
  std::vector<double> training;
  std::vector<double> validation;
};

enum class ImputePolicy { median, zero };

// Block-sum aggregation anchored at the first observation. A trailing block
// with fewer than block_size observations is dropped when drop_incomplete is
// set, and rejected otherwise.
TimeSeries aggregate_to_weekly(const TimeSeries& raw, bool drop_incomplete = true);

// Replaces NaN entries; median policy uses the median of the observed values
// of the same series. Runs before aggregation.
TimeSeries impute_missing(const TimeSeries& raw, ImputePolicy policy);

// Final h points become the validation part; the rest is training.
SplitSeries split_last_h(const std::vector<double>& values, int h);
SplitSeries split_last_h(const TimeSeries& series, int h);

// Dataset text format. First line: `name,granularity,start_timestamp`
// (timestamp may be empty). Each following line: `series_id: v1,v2,...`
// where `NA` or an empty field marks a missing observation.
struct RawDataset {
  std::string name;
  Granularity granularity = Granularity::weekly;
  std::optional<std::string> start_timestamp;
  std::vector<TimeSeries> series;
};

RawDataset read_dataset_file(const std::string& path);
void write_dataset_file(const std::string& path, const RawDataset& dataset);

// Full load pipeline: impute, aggregate when sub-weekly, optionally truncate
// every series to the first `truncate_to` weekly points.
WeeklyDataset load_weekly_dataset(const std::string& path, int horizon,
                                  ImputePolicy policy,
                                  std::optional<int> truncate_to = std::nullopt);

}  // namespace wfc
