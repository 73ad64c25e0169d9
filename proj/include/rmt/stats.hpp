#pragma once

#include <utility>
#include <vector>

#include "rmt/deterministic.hpp"
#include "rmt/montecarlo.hpp"

namespace rmt {

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct MomentReport {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double se_mean = 0.0;
  double se_skewness = 0.0;        // sqrt(6/R)
  double se_excess_kurtosis = 0.0; // sqrt(24/R)
  bool degenerate = false;         // variance 0: skew/kurt are NaN
};

struct NormalityVerdict {
  double ks_statistic = 0.0;
  double ks_threshold = 0.0;
  double sample_skewness = 0.0;
  double sample_excess_kurtosis = 0.0;
  double variance_ratio = 0.0;  // var(N I_n) / theta
  bool ks_pass = false;
  bool variance_pass = false;
  bool pass = false;
};

// Standard normal CDF and its inverse (rational approximation polished
// by one Newton step; |error| well under 1e-8).
double normal_cdf(double x);
double normal_quantile(double p);

// One-sample Kolmogorov-Smirnov against N(0,1). alpha must be one of
// 0.10, 0.05, 0.01; threshold is c(alpha)/sqrt(R).
KsResult ks_test_standard_normal(const std::vector<double>& samples,
                                 double alpha);

MomentReport moment_report(const std::vector<double>& samples);

// Pairs (Phi^{-1}((i-0.5)/R), sorted sample i), both coordinates ascending.
std::vector<std::pair<double, double>> qq_points(
    const std::vector<double>& samples);

// KS on the mean-centered standardized samples plus the variance-ratio
// gate |var(N I_n)/theta - 1| < var_tol.
NormalityVerdict clt_verdict(const MCResult& mc,
                             const FluctuationReport& report, double alpha,
                             double var_tol);

}  // namespace rmt
