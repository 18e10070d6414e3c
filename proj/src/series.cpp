#include "weeklyfc/series.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wfc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Granularity granularity_from_string(const std::string& s) {
  std::string k;
  for (char c : s) k += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (k == "ten-minute" || k == "ten_minute" || k == "10min") return Granularity::ten_minute;
  if (k == "half-hourly" || k == "half_hourly") return Granularity::half_hourly;
  if (k == "hourly") return Granularity::hourly;
  if (k == "daily") return Granularity::daily;
  if (k == "weekly") return Granularity::weekly;
  throw std::invalid_argument("unknown granularity: " + s);
}

std::string to_string(Granularity g) {
  switch (g) {
    case Granularity::ten_minute: return "ten-minute";
    case Granularity::half_hourly: return "half-hourly";
    case Granularity::hourly: return "hourly";
    case Granularity::daily: return "daily";
    case Granularity::weekly: return "weekly";
  }
  return "weekly";
}

int block_size(Granularity g) {
  switch (g) {
    case Granularity::daily: return 7;
    case Granularity::hourly: return 168;
    case Granularity::half_hourly: return 336;
    case Granularity::ten_minute: return 1008;
    case Granularity::weekly:
      throw std::invalid_argument("block_size: series is already weekly");
  }
  throw std::invalid_argument("block_size: unknown granularity");
}

void WeeklyDataset::validate() const {
  if (horizon < 1) throw std::invalid_argument("dataset horizon must be positive");
  if (series.empty()) throw std::invalid_argument("dataset has no series");
  for (const auto& s : series) {
    if (s.granularity != Granularity::weekly)
      throw std::invalid_argument("series " + s.id + " is not weekly");
    if (static_cast<int>(s.values.size()) < horizon + 1)
      throw std::invalid_argument("series " + s.id + " shorter than horizon + 1");
    for (double v : s.values) {
      if (!std::isfinite(v))
        throw std::invalid_argument("series " + s.id + " has non-finite values");
      if (v < 0.0)
        throw std::invalid_argument("series " + s.id + " has negative values");
    }
  }
}

TimeSeries aggregate_to_weekly(const TimeSeries& raw, bool drop_incomplete) {
  if (raw.granularity == Granularity::weekly)
    throw std::invalid_argument("aggregate_to_weekly: series is already weekly");
  if (raw.has_missing())
    throw std::invalid_argument("aggregate_to_weekly: impute missing values first");
  const int b = block_size(raw.granularity);
  const auto n = static_cast<int>(raw.values.size());
  if (n < b) throw std::runtime_error("series too short to aggregate: " + raw.id);
  if (!drop_incomplete && n % b != 0)
    throw std::runtime_error("series length is not a multiple of the block size: " +
                             raw.id);
  TimeSeries out;
  out.id = raw.id;
  out.start_timestamp = raw.start_timestamp;
  out.granularity = Granularity::weekly;
  const int blocks = n / b;
  out.values.reserve(blocks);
  for (int i = 0; i < blocks; ++i) {
    double s = 0.0;
    for (int j = 0; j < b; ++j) s += raw.values[static_cast<std::size_t>(i) * b + j];
    out.values.push_back(s);
  }
  return out;
}

TimeSeries impute_missing(const TimeSeries& raw, ImputePolicy policy) {
  TimeSeries out = raw;
  if (!raw.has_missing()) return out;

  double fill = 0.0;
  if (policy == ImputePolicy::median) {
    std::vector<double> observed;
    observed.reserve(raw.values.size());
    for (double v : raw.values)
      if (!std::isnan(v)) observed.push_back(v);
    if (observed.empty())
      throw std::runtime_error("impute_missing: all entries missing in " + raw.id);
    fill = median_of(observed);
  } else {
    bool any = false;
    for (double v : raw.values) any = any || !std::isnan(v);
    if (!any)
      throw std::runtime_error("impute_missing: all entries missing in " + raw.id);
  }
  for (double& v : out.values)
    if (std::isnan(v)) v = fill;
  return out;
}

SplitSeries split_last_h(const std::vector<double>& values, int h) {
  if (h < 1) throw std::invalid_argument("split_last_h: h must be positive");
  if (static_cast<int>(values.size()) <= h)
    throw std::invalid_argument("split_last_h: series length must exceed h");
  SplitSeries out;
  out.training.assign(values.begin(), values.end() - h);
  out.validation.assign(values.end() - h, values.end());
  return out;
}

SplitSeries split_last_h(const TimeSeries& series, int h) {
  return split_last_h(series.values, h);
}

RawDataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  RawDataset ds;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("dataset file is empty: " + path);
  {
    std::stringstream header(line);
    std::string name, gran, ts;
    std::getline(header, name, ',');
    std::getline(header, gran, ',');
    std::getline(header, ts);
    ds.name = trim(name);
    ds.granularity = granularity_from_string(trim(gran));
    const std::string t = trim(ts);
    if (!t.empty()) ds.start_timestamp = t;
  }

  while (std::getline(in, line)) {
    const std::string l = trim(line);
    if (l.empty()) continue;
    const auto colon = l.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("malformed series line (missing ':'): " + l);
    TimeSeries s;
    s.id = trim(l.substr(0, colon));
    s.granularity = ds.granularity;
    s.start_timestamp = ds.start_timestamp;
    std::stringstream vals(l.substr(colon + 1));
    std::string tok;
    while (std::getline(vals, tok, ',')) {
      const std::string v = trim(tok);
      if (v.empty() || v == "NA") {
        s.values.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        s.values.push_back(std::stod(v));
      }
    }
    if (s.values.empty())
      throw std::runtime_error("series has no values: " + s.id);
    ds.series.push_back(std::move(s));
  }
  if (ds.series.empty()) throw std::runtime_error("dataset has no series: " + path);
  return ds;
}

void write_dataset_file(const std::string& path, const RawDataset& dataset) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out << dataset.name << ',' << to_string(dataset.granularity) << ','
      << (dataset.start_timestamp ? *dataset.start_timestamp : "") << '\n';
  char buf[64];
  for (const auto& s : dataset.series) {
    out << s.id << ": ";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (i > 0) out << ',';
      if (std::isnan(s.values[i])) {
        out << "NA";
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", s.values[i]);
        out << buf;
      }
    }
    out << '\n';
  }
}

WeeklyDataset load_weekly_dataset(const std::string& path, int horizon,
                                  ImputePolicy policy,
                                  std::optional<int> truncate_to) {
  const RawDataset raw = read_dataset_file(path);
  WeeklyDataset ds;
  ds.name = raw.name;
  ds.horizon = horizon;
  for (const auto& s : raw.series) {
    TimeSeries clean = impute_missing(s, policy);
    if (clean.granularity != Granularity::weekly)
      clean = aggregate_to_weekly(clean, /*drop_incomplete=*/true);
    if (truncate_to && static_cast<int>(clean.values.size()) > *truncate_to)
      clean.values.resize(*truncate_to);
    ds.series.push_back(std::move(clean));
  }
  ds.validate();
  return ds;
}

}  // namespace wfc
