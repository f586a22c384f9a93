#ifndef CHEMSCORE_DIAGNOSTICS_HPP
#define CHEMSCORE_DIAGNOSTICS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chemscore/corruption.hpp"
#include "chemscore/stats.hpp"

namespace chemscore::diag {

class DiagnosticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySpan : public DiagnosticsError {
 public:
  using DiagnosticsError::DiagnosticsError;
};

class MissingVariant : public DiagnosticsError {
 public:
  using DiagnosticsError::DiagnosticsError;
};

class InvalidInputLine : public DiagnosticsError {
 public:
  using DiagnosticsError::DiagnosticsError;
};

enum class Variant { Canonical, Corrupted };

const char* to_string(Variant v);
std::optional<Variant> variant_from_string(std::string_view s);

// Per-token log-probabilities for one scored prompt, with the token window
// of the payload (the SMILES / description region, context excluded).
struct ScoredString {
  std::string id;
  Variant variant = Variant::Canonical;
  std::vector<double> token_logprobs;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;  // exclusive
};

// Mean token log-likelihood over the payload span only.
double mean_loglik(const ScoredString& r);

ScsReport scs(std::span<const ScoredString> records);
// Identical pipeline over description records.
ScsReport ccs(std::span<const ScoredString> records);

inline constexpr std::string_view kPromptTemplatePrefix =
    "The molecule represented with the SMILES ";
inline constexpr std::string_view kBeginSentinel = "[BEGIN_SMILES]";
inline constexpr std::string_view kEndSentinel = "[END_SMILES]";

struct PromptRecord {
  std::string id;
  Variant variant = Variant::Canonical;
  std::string prompt;
  std::string payload;  // exact text between the sentinels
};

std::string make_scs_prompt(std::string_view payload);

// One canonical and one corrupted prompt per input molecule, in input
// order. Lines must be valid SMILES (InvalidInputLine otherwise).
std::vector<PromptRecord> build_scs_prompts(
    const std::vector<std::string>& smiles_lines,
    const corrupt::CorruptionConfig& cfg);

// Scoring backend interface; diagnostics never loads a model itself.
class TokenScorer {
 public:
  virtual ~TokenScorer() = default;
  virtual ScoredString score(const PromptRecord& record) = 0;
};

struct SweepPoint {
  double rate = 0.0;
  ScsReport report;
};

// One report per corruption rate over the same molecule set, with an
// independent corruption seed per rate.
std::vector<SweepPoint> scs_sweep(const std::vector<std::string>& smiles_lines,
                                  const std::vector<double>& rates,
                                  TokenScorer& scorer,
                                  std::uint64_t base_seed);

// JSON-lines records {id, variant, token_logprobs, payload_span}.
std::vector<ScoredString> read_scored_strings(std::istream& in);
void write_scored_strings(std::ostream& out,
                          std::span<const ScoredString> records);

std::vector<PromptRecord> read_prompt_records(std::istream& in);
void write_prompt_records(std::ostream& out,
                          std::span<const PromptRecord> records);

std::string report_to_json(const ScsReport& report);
std::string report_to_table(const ScsReport& report);
std::string sweep_to_table(std::span<const SweepPoint> points);

}  // namespace chemscore::diag

#endif  // CHEMSCORE_DIAGNOSTICS_HPP
