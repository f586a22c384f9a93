#ifndef CHEMSCORE_HARNESS_HPP
#define CHEMSCORE_HARNESS_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chemscore/diagnostics.hpp"
#include "chemscore/endpoint.hpp"
#include "chemscore/taskgen.hpp"

namespace chemscore::harness {

class SpanResolutionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Plain, Direct, Reasoning };

std::optional<Mode> mode_from_string(std::string_view s);
const char* to_string(Mode mode);

inline constexpr std::string_view kAnswerTag = "<answer>";
inline constexpr std::string_view kDefaultReasoningTag = "<think>";

// Appends the answer tag (direct / System-1) or the reasoning-opening tag
// (reasoning / System-2); idempotent.
std::string set_mode(std::string prompt, Mode mode,
                     std::string_view reasoning_tag = kDefaultReasoningTag);

struct InjectionResult {
  std::string completion;  // includes the mode tag and any injected tags
  int retries = 0;
  bool has_answer = false;
};

inline constexpr int kDefaultMaxRetries = 3;

// Answer-tag injection: generate, and while the completion still lacks an
// <answer>...</answer> block and retries remain, regenerate from
// prompt + completion + "<answer>". mode_suffix is the tag set_mode
// appended; it counts as completion text for format purposes.
InjectionResult generate_with_answer_injection(ModelEndpoint& endpoint,
                                               const std::string& moded_prompt,
                                               int max_retries,
                                               std::string_view mode_suffix = "");

struct EvalOptions {
  Mode mode = Mode::Reasoning;
  int max_retries = kDefaultMaxRetries;
  std::string reasoning_tag = std::string(kDefaultReasoningTag);
  int parallelism = 1;
  std::string run_dir;  // empty = do not persist
};

struct InstanceOutcome {
  std::size_t index = 0;
  std::string prompt;
  std::string completion;
  int retries = 0;
  bool has_answer = false;
  std::string answer;
  std::map<std::string, double> scores;
  std::string error;
};

struct EvalReport {
  std::string task;
  std::string mode;
  std::size_t instances = 0;
  std::map<std::string, double> metrics;
  std::vector<InstanceOutcome> outcomes;

  std::string to_json() const;
  std::string to_table() const;
};

// Runs every instance through the endpoint (answer injection included) and
// aggregates task metrics; per-instance failures are recorded, never fatal.
// When options.run_dir is set, writes config.json, transcripts.jsonl and
// report.json there.
EvalReport evaluate(std::span<const taskgen::TaskInstance> instances,
                    ModelEndpoint& endpoint, const EvalOptions& options);

// Recomputes aggregate metrics from persisted outcomes (report integrity).
std::map<std::string, double> recompute_metrics(
    const std::string& task, std::span<const InstanceOutcome> outcomes);

EvalReport load_report(const std::string& run_dir);

// Scores each prompt and maps the sentinel-delimited payload to the
// smallest covering token window, sentinels excluded.
std::vector<diag::ScoredString> score_strings(
    ModelEndpoint& endpoint, std::span<const diag::PromptRecord> prompts);

// diag::TokenScorer backed by a live endpoint.
class EndpointScorer : public diag::TokenScorer {
 public:
  explicit EndpointScorer(ModelEndpoint& endpoint) : endpoint_(endpoint) {}
  diag::ScoredString score(const diag::PromptRecord& record) override;

 private:
  ModelEndpoint& endpoint_;
};

}  // namespace chemscore::harness

#endif  // CHEMSCORE_HARNESS_HPP
