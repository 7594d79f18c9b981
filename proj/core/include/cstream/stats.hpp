#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cstream::stats {

// One step point of an empirical CDF: (value, cumulative fraction).
using EcdfPoint = std::pair<double, double>;

// Right-continuous ECDF step points over distinct values; the last fraction
// is exactly 1. Throws std::invalid_argument on empty input.
std::vector<EcdfPoint> ecdf(std::span<const double> values);

struct KsResult {
  double statistic = 0.0;  // D = sup |F_a - F_b|
  double p_value = 1.0;
  bool reject = false;     // p_value < alpha
};

// Two-sample KS test. p-value from the asymptotic Kolmogorov distribution at
// lambda = sqrt(n*m/(n+m)) * D. Throws std::invalid_argument on an empty
// sample or alpha outside (0,1).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double alpha = 0.05);

// Survival function Q(lambda) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

// Linear-interpolation quantile over sorted data (the (n-1)p convention).
double quantile_sorted(std::span<const double> sorted, double p);

struct TukeySummary {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double lower_fence = 0.0;  // q1 - 1.5*iqr
  double upper_fence = 0.0;  // q3 + 1.5*iqr
  std::vector<double> outliers;
};

// 1.5*IQR outlier rule. Requires at least 4 values.
TukeySummary tukey_outliers(std::span<const double> values);

struct DistSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double max = 0.0;
};

DistSummary summarize(std::span<const double> values);

}  // namespace cstream::stats
