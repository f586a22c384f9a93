#include <doctest.h>

#include <cmath>
#include <vector>

#include "chemscore/rng.hpp"
#include "chemscore/stats.hpp"

using namespace chemscore::diag;
using chemscore::SplitMix64;

TEST_CASE("hand-computed effect size: {2,4} vs {1,3}") {
  std::vector<double> valid = {2, 4};
  std::vector<double> corrupt = {1, 3};
  ScsReport r = cohens_d(valid, corrupt);
  CHECK(r.mean_valid == 3.0);
  CHECK(r.mean_corrupt == 2.0);
  CHECK(r.sd_valid == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.pooled_sd == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.score == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK_FALSE(r.rl_ready);
}

TEST_CASE("synthetic gaussian oracle: d = 1.00 +- 0.02") {
  SplitMix64 rng(20240810);
  MomentAccumulator valid;
  MomentAccumulator corrupt;
  for (int i = 0; i < 100000; ++i) {
    valid.add(1.0 + rng.next_gaussian());
    corrupt.add(rng.next_gaussian());
  }
  ScsReport r = cohens_d(valid, corrupt);
  CHECK(std::abs(r.score - 1.0) < 0.02);
}

TEST_CASE("identical distributions give a near-zero score") {
  SplitMix64 rng(7);
  std::vector<double> a, b;
  for (int i = 0; i < 5000; ++i) {
    a.push_back(1.0 + 1e-3 * rng.next_gaussian());
    b.push_back(1.0 + 1e-3 * rng.next_gaussian());
  }
  ScsReport r = cohens_d(a, b);
  CHECK(std::abs(r.score) < 0.1);
}

TEST_CASE("antisymmetry, shift and scale invariance") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a, b;
    std::size_t na = 3 + rng.next_below(40);
    std::size_t nb = 3 + rng.next_below(40);
    for (std::size_t i = 0; i < na; ++i) a.push_back(rng.next_gaussian() * 2.0);
    for (std::size_t i = 0; i < nb; ++i) b.push_back(1.0 + rng.next_gaussian());

    double d = cohens_d(a, b).score;
    CHECK(cohens_d(b, a).score == doctest::Approx(-d).epsilon(1e-12));

    double shift = rng.next_gaussian() * 10.0;
    std::vector<double> as = a, bs = b;
    for (double& x : as) x += shift;
    for (double& x : bs) x += shift;
    CHECK(cohens_d(as, bs).score == doctest::Approx(d).epsilon(1e-9));

    double scale = 0.5 + rng.next_double() * 4.0;
    std::vector<double> am = a, bm = b;
    for (double& x : am) x *= scale;
    for (double& x : bm) x *= scale;
    CHECK(cohens_d(am, bm).score == doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("degenerate inputs raise") {
  std::vector<double> tiny = {1.0};
  std::vector<double> pair = {1.0, 2.0};
  CHECK_THROWS_AS(cohens_d(tiny, pair), TooFewSamples);
  CHECK_THROWS_AS(cohens_d(pair, tiny), TooFewSamples);
  std::vector<double> flat = {2.0, 2.0, 2.0};
  CHECK_THROWS_AS(cohens_d(flat, flat), DegeneratePooledVariance);
}

TEST_CASE("sharded accumulators merge to the single-pass result") {
  SplitMix64 rng(123);
  std::vector<double> values;
  for (int i = 0; i < 10000; ++i) values.push_back(rng.next_gaussian() * 3.0 - 1.0);

  MomentAccumulator whole;
  for (double v : values) whole.add(v);

  MomentAccumulator merged;
  std::size_t offset = 0;
  while (offset < values.size()) {
    std::size_t len = 1 + rng.next_below(997);
    len = std::min(len, values.size() - offset);
    MomentAccumulator shard;
    for (std::size_t i = 0; i < len; ++i) shard.add(values[offset + i]);
    merged.merge(shard);
    offset += len;
  }
  CHECK(merged.n == whole.n);
  CHECK(merged.mean == doctest::Approx(whole.mean).epsilon(1e-12));
  CHECK(merged.variance() == doctest::Approx(whole.variance()).epsilon(1e-12));
}
