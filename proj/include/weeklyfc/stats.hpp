#pragma once

#include <string>
#include <vector>

namespace wfc {

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<double> mean_ranks;  // one per method, input order
};

// Friedman rank-sum test over an errors matrix (rows = series, columns =
// methods). Ties get average ranks; the statistic carries the standard tie
// correction; p comes from chi-square with k-1 degrees of freedom.
FriedmanResult friedman_test(const std::vector<std::vector<double>>& errors);

struct HochbergEntry {
  std::size_t method_index = 0;  // column in the Friedman input
  double z = 0.0;
  double raw_p = 1.0;
  double adjusted_p = 1.0;
};

// Rank-based post-hoc comparison of every method against the control (the
// method with the best mean rank), with Hochberg step-up adjustment.
// n = number of series behind the mean ranks. The control is excluded from
// the output; entries come back sorted by adjusted p ascending.
std::vector<HochbergEntry> hochberg_posthoc(const std::vector<double>& mean_ranks,
                                            int n);

std::size_t control_method_index(const std::vector<double>& mean_ranks);

// Upper-tail probabilities used by the tests above.
double chi_square_upper_tail(double x, int dof);
double normal_two_sided_p(double z);

}  // namespace wfc
