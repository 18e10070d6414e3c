#include "weeklyfc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wfc {

namespace {

// Regularized upper incomplete gamma Q(a, x) via the Lentz continued
// fraction (x >= a+1) or the series for P (x < a+1).
double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    // P(a,x) series.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - lg);
    return 1.0 - p;
  }
  // Q(a,x) continued fraction.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace

double chi_square_upper_tail(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_upper_tail: dof < 1");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

double normal_two_sided_p(double z) {
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

FriedmanResult friedman_test(const std::vector<std::vector<double>>& errors) {
  const auto n = static_cast<int>(errors.size());
  if (n < 2) throw std::invalid_argument("friedman_test: need >= 2 series");
  const auto k = static_cast<int>(errors[0].size());
  if (k < 2) throw std::invalid_argument("friedman_test: need >= 2 methods");
  for (const auto& row : errors)
    if (static_cast<int>(row.size()) != k)
      throw std::invalid_argument("friedman_test: ragged error matrix");

  std::vector<double> rank_sums(k, 0.0);
  double tie_term = 0.0;  // sum over rows of sum(t^3 - t)
  std::vector<int> order(k);
  for (const auto& row : errors) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return row[a] < row[b]; });
    int i = 0;
    while (i < k) {
      int j = i;
      while (j + 1 < k && row[order[j + 1]] == row[order[i]]) ++j;
      const double avg_rank = 0.5 * (i + j) + 1.0;  // average of ranks i+1..j+1
      for (int t = i; t <= j; ++t) rank_sums[order[t]] += avg_rank;
      const double ties = j - i + 1;
      tie_term += ties * ties * ties - ties;
      i = j + 1;
    }
  }

  FriedmanResult res;
  res.mean_ranks.resize(k);
  for (int j = 0; j < k; ++j) res.mean_ranks[j] = rank_sums[j] / n;

  const double centre = 0.5 * (k + 1);
  double ss = 0.0;
  for (int j = 0; j < k; ++j) {
    const double d = res.mean_ranks[j] - centre;
    ss += d * d;
  }
  double stat = 12.0 * n / (k * (k + 1.0)) * ss;
  const double correction =
      1.0 - tie_term / (static_cast<double>(n) * k * (static_cast<double>(k) * k - 1.0));
  if (correction <= 0.0) {
    // Every row fully tied: no evidence of any difference.
    res.statistic = 0.0;
    res.p_value = 1.0;
    return res;
  }
  stat /= correction;
  res.statistic = stat;
  res.p_value = chi_square_upper_tail(stat, k - 1);
  return res;
}

std::size_t control_method_index(const std::vector<double>& mean_ranks) {
  if (mean_ranks.empty())
    throw std::invalid_argument("control_method_index: empty ranks");
  return static_cast<std::size_t>(
      std::min_element(mean_ranks.begin(), mean_ranks.end()) - mean_ranks.begin());
}

std::vector<HochbergEntry> hochberg_posthoc(const std::vector<double>& mean_ranks,
                                            int n) {
  const auto k = static_cast<int>(mean_ranks.size());
  if (k < 2) throw std::invalid_argument("hochberg_posthoc: need >= 2 methods");
  if (n < 1) throw std::invalid_argument("hochberg_posthoc: n < 1");
  const std::size_t control = control_method_index(mean_ranks);
  const double se = std::sqrt(k * (k + 1.0) / (6.0 * n));

  std::vector<HochbergEntry> entries;
  entries.reserve(k - 1);
  for (std::size_t j = 0; j < mean_ranks.size(); ++j) {
    if (j == control) continue;
    HochbergEntry e;
    e.method_index = j;
    e.z = (mean_ranks[j] - mean_ranks[control]) / se;
    e.raw_p = normal_two_sided_p(e.z);
    entries.push_back(e);
  }

  // Step-up adjustment, computed from the largest raw p downwards.
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.raw_p < b.raw_p; });
  const auto m = static_cast<int>(entries.size());
  double running = 1.0;
  for (int i = m - 1; i >= 0; --i) {
    const double candidate = std::min(1.0, (m - i) * entries[i].raw_p);
    running = std::min(running, candidate);
    entries[i].adjusted_p = running;
  }
  return entries;
}

}  // namespace wfc
