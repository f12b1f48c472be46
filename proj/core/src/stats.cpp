#include "sevgae/stats.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <stdexcept>

namespace sevgae {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2)
    throw std::invalid_argument("sample_variance: need >= 2 values");
  double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / double(xs.size() - 1);
}

TTestResult two_group_ttest(const std::vector<double>& a,
                            const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("ttest: each group needs >= 2 values");
  double na = double(a.size()), nb = double(b.size());
  double va = sample_variance(a) / na, vb = sample_variance(b) / nb;
  if (va + vb == 0.0) {
    if (mean(a) == mean(b)) return {0.0, 1.0, na + nb - 2.0};
    throw std::invalid_argument("ttest: zero variance in both groups");
  }
  TTestResult r;
  r.t = (mean(a) - mean(b)) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) /
         (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(dist, -std::abs(r.t));
  return r;
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2)
    throw std::invalid_argument("anova: need >= 2 groups");
  double n_total = 0.0, grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2)
      throw std::invalid_argument("anova: each group needs >= 2 values");
    n_total += double(g.size());
    for (double x : g) grand_sum += x;
  }
  double grand_mean = grand_sum / n_total;
  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& g : groups) {
    double gm = mean(g);
    ss_between += double(g.size()) * (gm - grand_mean) * (gm - grand_mean);
    for (double x : g) ss_within += (x - gm) * (x - gm);
  }
  AnovaResult r;
  r.df_between = double(groups.size()) - 1.0;
  r.df_within = n_total - double(groups.size());
  if (ss_within == 0.0)
    throw std::invalid_argument("anova: zero within-group variance");
  r.F = (ss_between / r.df_between) / (ss_within / r.df_within);
  boost::math::fisher_f dist(r.df_between, r.df_within);
  r.p = 1.0 - boost::math::cdf(dist, r.F);
  return r;
}

}  // namespace sevgae
