#pragma once

#include <vector>

namespace sevgae {

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-sided
  double df = 0.0;
};

/// Welch's unequal-variance two-sample t-test.
TTestResult two_group_ttest(const std::vector<double>& a,
                            const std::vector<double>& b);

struct AnovaResult {
  double F = 0.0;
  double p = 1.0;
  double df_between = 0.0, df_within = 0.0;
};

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

double mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);

}  // namespace sevgae
