#include "chemscore/stats.hpp"

#include <cmath>

namespace chemscore::diag {

ScsReport cohens_d(const MomentAccumulator& valid,
                   const MomentAccumulator& corrupt) {
  if (valid.n < 2 || corrupt.n < 2) {
    throw TooFewSamples("cohens_d needs at least 2 samples per group");
  }
  double var1 = valid.variance();
  double var2 = corrupt.variance();
  double n1 = static_cast<double>(valid.n);
  double n2 = static_cast<double>(corrupt.n);
  double pooled_var = ((n1 - 1.0) * var1 + (n2 - 1.0) * var2) / (n1 + n2 - 2.0);
  if (!(pooled_var > 0.0)) {
    throw DegeneratePooledVariance("pooled variance is zero");
  }
  ScsReport report;
  report.mean_valid = valid.mean;
  report.mean_corrupt = corrupt.mean;
  report.sd_valid = std::sqrt(var1);
  report.sd_corrupt = std::sqrt(var2);
  report.n_valid = valid.n;
  report.n_corrupt = corrupt.n;
  report.pooled_sd = std::sqrt(pooled_var);
  report.score = (valid.mean - corrupt.mean) / report.pooled_sd;
  report.rl_ready = report.score > kRlReadyThreshold;
  return report;
}

ScsReport cohens_d(std::span<const double> valid,
                   std::span<const double> corrupt) {
  MomentAccumulator a;
  MomentAccumulator b;
  for (double x : valid) a.add(x);
  for (double x : corrupt) b.add(x);
  return cohens_d(a, b);
}

}  // namespace chemscore::diag
