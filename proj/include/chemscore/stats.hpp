#ifndef CHEMSCORE_STATS_HPP
#define CHEMSCORE_STATS_HPP

#include <cstddef>
#include <span>
#include <stdexcept>

namespace chemscore::diag {

class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TooFewSamples : public StatsError {
 public:
  using StatsError::StatsError;
};

class DegeneratePooledVariance : public StatsError {
 public:
  using StatsError::StatsError;
};

// Streaming (count, mean, M2) moments; mergeable across shards.
struct MomentAccumulator {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }

  void merge(const MomentAccumulator& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    double delta = other.mean - mean;
    std::size_t total = n + other.n;
    mean += delta * static_cast<double>(other.n) / static_cast<double>(total);
    m2 += other.m2 + delta * delta * static_cast<double>(n) *
                         static_cast<double>(other.n) / static_cast<double>(total);
    n = total;
  }

  // Sample variance (n-1 denominator).
  double variance() const {
    if (n < 2) throw TooFewSamples("variance needs n >= 2");
    return m2 / static_cast<double>(n - 1);
  }
};

// Cohen's d between the two samples, using the pooled sample standard
// deviation with (n1-1), (n2-1) weights. The advisory rl_ready flag marks
// scores above 1.5.
struct ScsReport {
  double mean_valid = 0.0;
  double mean_corrupt = 0.0;
  double sd_valid = 0.0;
  double sd_corrupt = 0.0;
  std::size_t n_valid = 0;
  std::size_t n_corrupt = 0;
  double pooled_sd = 0.0;
  double score = 0.0;
  bool rl_ready = false;
};

inline constexpr double kRlReadyThreshold = 1.5;

ScsReport cohens_d(const MomentAccumulator& valid,
                   const MomentAccumulator& corrupt);
ScsReport cohens_d(std::span<const double> valid,
                   std::span<const double> corrupt);

}  // namespace chemscore::diag

#endif  // CHEMSCORE_STATS_HPP
