#include <doctest.h>

#include <cmath>
#include <sstream>

#include "chemscore/diagnostics.hpp"
#include "chemscore/rng.hpp"
#include "helpers.hpp"

using namespace chemscore;
using namespace chemscore::diag;

TEST_CASE("mean_loglik averages over the payload span only") {
  ScoredString r;
  r.id = "a";
  r.token_logprobs = {-1, -3};
  r.span_begin = 0;
  r.span_end = 2;
  CHECK(mean_loglik(r) == -2.0);

  ScoredString with_context;
  with_context.token_logprobs = {-10, -1, -3};
  with_context.span_begin = 1;
  with_context.span_end = 3;
  CHECK(mean_loglik(with_context) == -2.0);

  ScoredString empty;
  empty.token_logprobs = {-1};
  empty.span_begin = 1;
  empty.span_end = 1;
  CHECK_THROWS_AS(mean_loglik(empty), EmptySpan);
}

TEST_CASE("mean_loglik agrees with naive re-summation") {
  SplitMix64 rng(4);
  for (int t = 0; t < 10000; ++t) {
    ScoredString r;
    std::size_t len = 1 + rng.next_below(40);
    for (std::size_t i = 0; i < len; ++i) {
      r.token_logprobs.push_back(-5.0 * rng.next_double());
    }
    r.span_begin = rng.next_below(len);
    r.span_end = r.span_begin + 1 + rng.next_below(len - r.span_begin);
    double sum = 0.0;
    for (std::size_t i = r.span_begin; i < r.span_end; ++i) {
      sum += r.token_logprobs[i];
    }
    CHECK(mean_loglik(r) ==
          doctest::Approx(sum / double(r.span_end - r.span_begin)).epsilon(1e-12));
  }
}

namespace {

ScoredString make_record(const std::string& id, Variant variant,
                         double level, std::uint64_t seed) {
  ScoredString r;
  r.id = id;
  r.variant = variant;
  SplitMix64 rng(seed);
  std::size_t len = 5 + rng.next_below(10);
  for (std::size_t i = 0; i < len; ++i) {
    r.token_logprobs.push_back(level + 0.05 * rng.next_gaussian());
  }
  r.span_begin = 0;
  r.span_end = len;
  return r;
}

}  // namespace

TEST_CASE("scs groups variants and matches the hand-computed case") {
  // Spans chosen so the means are exactly {2,4} vs {1,3}.
  auto flat = [](const std::string& id, Variant v, double value) {
    ScoredString r;
    r.id = id;
    r.variant = v;
    r.token_logprobs = {value, value};
    r.span_begin = 0;
    r.span_end = 2;
    return r;
  };
  std::vector<ScoredString> records = {
      flat("a", Variant::Canonical, 2), flat("b", Variant::Canonical, 4),
      flat("a", Variant::Corrupted, 1), flat("b", Variant::Corrupted, 3)};
  ScsReport r = scs(records);
  CHECK(r.score == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(ccs(records).score == r.score);
}

TEST_CASE("scs raises when a variant is missing") {
  std::vector<ScoredString> records = {
      make_record("a", Variant::Canonical, -1, 1),
      make_record("b", Variant::Canonical, -1, 2)};
  CHECK_THROWS_AS(scs(records), MissingVariant);
}

TEST_CASE("constructed separation gives a large positive score") {
  std::vector<ScoredString> records;
  for (int i = 0; i < 200; ++i) {
    records.push_back(make_record("m" + std::to_string(i), Variant::Canonical,
                                  -1.0, 1000 + i));
    records.push_back(make_record("m" + std::to_string(i), Variant::Corrupted,
                                  -6.0, 2000 + i));
  }
  ScsReport r = scs(records);
  CHECK(r.score > 10.0);
  CHECK(r.rl_ready);
}

TEST_CASE("prompt template matches the benchmark wording") {
  CHECK(make_scs_prompt("CCO") ==
        "The molecule represented with the SMILES [BEGIN_SMILES] CCO [END_SMILES]");
}

TEST_CASE("build_scs_prompts emits one pair per molecule") {
  corrupt::CorruptionConfig cfg;
  cfg.rate = 0.2;
  cfg.seed = 9;
  std::vector<std::string> molecules = {"CCO", "C1CCCCC1", "c1ccccc1"};
  auto prompts = build_scs_prompts(molecules, cfg);
  REQUIRE(prompts.size() == 6);
  for (std::size_t i = 0; i < prompts.size(); i += 2) {
    CHECK(prompts[i].variant == Variant::Canonical);
    CHECK(prompts[i + 1].variant == Variant::Corrupted);
    CHECK(prompts[i].id == prompts[i + 1].id);
    // The corrupted twin differs only inside the payload region.
    CHECK(prompts[i].prompt == make_scs_prompt(prompts[i].payload));
    CHECK(prompts[i + 1].prompt == make_scs_prompt(prompts[i + 1].payload));
  }
  CHECK(prompts[0].payload == "CCO");
  CHECK(prompts[1].payload == "CCO");  // no grammar characters to delete

  CHECK_THROWS_AS(build_scs_prompts({"not a smiles(("}, cfg), InvalidInputLine);
}

TEST_CASE("scored-string jsonl round trip") {
  std::vector<ScoredString> records = {
      make_record("x", Variant::Canonical, -1.5, 3),
      make_record("x", Variant::Corrupted, -4.0, 4)};
  std::stringstream buffer;
  write_scored_strings(buffer, records);
  auto loaded = read_scored_strings(buffer);
  REQUIRE(loaded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(loaded[i].id == records[i].id);
    CHECK(loaded[i].variant == records[i].variant);
    CHECK(loaded[i].token_logprobs == records[i].token_logprobs);
    CHECK(loaded[i].span_begin == records[i].span_begin);
    CHECK(loaded[i].span_end == records[i].span_end);
  }
}

namespace {

// Scripted scorer: -1 per payload token, minus delta when the payload is
// corrupted, with per-record jitter so variances are nonzero.
class AdditiveMock : public TokenScorer {
 public:
  explicit AdditiveMock(double delta) : delta_(delta) {}

  ScoredString score(const PromptRecord& record) override {
    ScoredString r;
    r.id = record.id;
    r.variant = record.variant;
    SplitMix64 rng(hash_text(record.prompt));
    double jitter = 0.1 * rng.next_gaussian();
    double level = record.variant == Variant::Corrupted ? -1.0 - delta_ : -1.0;
    for (int i = 0; i < 8; ++i) r.token_logprobs.push_back(level + jitter);
    r.span_begin = 0;
    r.span_end = 8;
    return r;
  }

 private:
  double delta_;
};

}  // namespace

TEST_CASE("scs_sweep is rate-independent under the additive mock") {
  auto mols = testutil::read_lines(testutil::data_path("sample_smiles.txt"));
  std::vector<std::string> subset(mols.begin(), mols.begin() + 80);
  AdditiveMock scorer(2.0);
  auto points = scs_sweep(subset, {0.1, 0.2, 0.5}, scorer, 21);
  REQUIRE(points.size() == 3);
  for (const auto& p : points) {
    CHECK(p.report.n_valid == subset.size());
    CHECK(p.report.n_corrupt == subset.size());
    CHECK(p.report.score > 5.0);
  }
  // The additive shift does not depend on the corruption rate.
  CHECK(points[0].report.score ==
        doctest::Approx(points[2].report.score).epsilon(0.3));
}

TEST_CASE("sweep is reproducible under the same seed") {
  auto mols = testutil::read_lines(testutil::data_path("sample_smiles.txt"));
  std::vector<std::string> subset(mols.begin(), mols.begin() + 40);
  AdditiveMock scorer(1.0);
  auto a = scs_sweep(subset, {0.2, 0.4}, scorer, 5);
  auto b = scs_sweep(subset, {0.2, 0.4}, scorer, 5);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].report.score == b[i].report.score);
  }
}
