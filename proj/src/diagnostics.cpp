#include "chemscore/diagnostics.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "chemscore/rng.hpp"
#include "chemscore/smiles.hpp"

namespace chemscore::diag {

using nlohmann::json;

const char* to_string(Variant v) {
  return v == Variant::Canonical ? "canonical" : "corrupted";
}

std::optional<Variant> variant_from_string(std::string_view s) {
  if (s == "canonical") return Variant::Canonical;
  if (s == "corrupted") return Variant::Corrupted;
  return std::nullopt;
}

double mean_loglik(const ScoredString& r) {
  if (r.span_begin >= r.span_end || r.span_end > r.token_logprobs.size()) {
    throw EmptySpan("payload span [" + std::to_string(r.span_begin) + ", " +
                    std::to_string(r.span_end) + ") invalid for " +
                    std::to_string(r.token_logprobs.size()) + " tokens (id " +
                    r.id + ")");
  }
  double sum = 0.0;
  for (std::size_t i = r.span_begin; i < r.span_end; ++i) {
    sum += r.token_logprobs[i];
  }
  return sum / static_cast<double>(r.span_end - r.span_begin);
}

namespace {

ScsReport variant_effect_size(std::span<const ScoredString> records) {
  MomentAccumulator valid;
  MomentAccumulator corrupted;
  for (const ScoredString& r : records) {
    (r.variant == Variant::Canonical ? valid : corrupted).add(mean_loglik(r));
  }
  if (valid.n == 0 || corrupted.n == 0) {
    throw MissingVariant(std::string("no ") +
                         (valid.n == 0 ? "canonical" : "corrupted") +
                         " records in input");
  }
  return cohens_d(valid, corrupted);
}

}  // namespace

ScsReport scs(std::span<const ScoredString> records) {
  return variant_effect_size(records);
}

ScsReport ccs(std::span<const ScoredString> records) {
  return variant_effect_size(records);
}

std::string make_scs_prompt(std::string_view payload) {
  std::string prompt(kPromptTemplatePrefix);
  prompt += kBeginSentinel;
  prompt += ' ';
  prompt += payload;
  prompt += ' ';
  prompt += kEndSentinel;
  return prompt;
}

std::vector<PromptRecord> build_scs_prompts(
    const std::vector<std::string>& smiles_lines,
    const corrupt::CorruptionConfig& cfg) {
  cfg.validate();
  std::vector<PromptRecord> out;
  out.reserve(smiles_lines.size() * 2);
  for (std::size_t i = 0; i < smiles_lines.size(); ++i) {
    const std::string& smiles = smiles_lines[i];
    if (!chem::is_valid_smiles(smiles)) {
      throw InvalidInputLine("line " + std::to_string(i + 1) +
                             " is not a valid SMILES: " + smiles);
    }
    std::string id = "m" + std::to_string(i);
    corrupt::CorruptionConfig per_record = cfg;
    per_record.seed = derive_seed(cfg.seed, i);
    std::string corrupted = corrupt::corrupt_smiles(smiles, per_record);

    out.push_back(PromptRecord{id, Variant::Canonical, make_scs_prompt(smiles),
                               smiles});
    out.push_back(PromptRecord{id, Variant::Corrupted,
                               make_scs_prompt(corrupted), corrupted});
  }
  return out;
}

std::vector<SweepPoint> scs_sweep(const std::vector<std::string>& smiles_lines,
                                  const std::vector<double>& rates,
                                  TokenScorer& scorer,
                                  std::uint64_t base_seed) {
  std::vector<SweepPoint> out;
  out.reserve(rates.size());
  for (std::size_t k = 0; k < rates.size(); ++k) {
    corrupt::CorruptionConfig cfg;
    cfg.rate = rates[k];
    cfg.seed = derive_seed(base_seed, 0x5eedull + k);
    std::vector<PromptRecord> prompts = build_scs_prompts(smiles_lines, cfg);
    std::vector<ScoredString> scored;
    scored.reserve(prompts.size());
    for (const PromptRecord& p : prompts) scored.push_back(scorer.score(p));
    out.push_back(SweepPoint{rates[k], scs(scored)});
  }
  return out;
}

std::vector<ScoredString> read_scored_strings(std::istream& in) {
  std::vector<ScoredString> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line);
    ScoredString r;
    r.id = j.at("id").get<std::string>();
    auto variant = variant_from_string(j.at("variant").get<std::string>());
    if (!variant) {
      throw DiagnosticsError("line " + std::to_string(line_no) +
                             ": unknown variant");
    }
    r.variant = *variant;
    r.token_logprobs = j.at("token_logprobs").get<std::vector<double>>();
    for (double lp : r.token_logprobs) {
      if (!std::isfinite(lp)) {
        throw DiagnosticsError("line " + std::to_string(line_no) +
                               ": non-finite logprob");
      }
    }
    r.span_begin = j.at("payload_span").at(0).get<std::size_t>();
    r.span_end = j.at("payload_span").at(1).get<std::size_t>();
    out.push_back(std::move(r));
  }
  return out;
}

void write_scored_strings(std::ostream& out,
                          std::span<const ScoredString> records) {
  for (const ScoredString& r : records) {
    json j{{"id", r.id},
           {"variant", to_string(r.variant)},
           {"token_logprobs", r.token_logprobs},
           {"payload_span", {r.span_begin, r.span_end}}};
    out << j.dump() << '\n';
  }
}

std::vector<PromptRecord> read_prompt_records(std::istream& in) {
  std::vector<PromptRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    PromptRecord r;
    r.id = j.at("id").get<std::string>();
    auto variant = variant_from_string(j.at("variant").get<std::string>());
    if (!variant) throw DiagnosticsError("unknown variant in prompt record");
    r.variant = *variant;
    r.prompt = j.at("prompt").get<std::string>();
    r.payload = j.at("payload").get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

void write_prompt_records(std::ostream& out,
                          std::span<const PromptRecord> records) {
  for (const PromptRecord& r : records) {
    json j{{"id", r.id},
           {"variant", to_string(r.variant)},
           {"prompt", r.prompt},
           {"payload", r.payload}};
    out << j.dump() << '\n';
  }
}

std::string report_to_json(const ScsReport& report) {
  json j{{"mean_valid", report.mean_valid},
         {"mean_corrupt", report.mean_corrupt},
         {"sd_valid", report.sd_valid},
         {"sd_corrupt", report.sd_corrupt},
         {"n_valid", report.n_valid},
         {"n_corrupt", report.n_corrupt},
         {"pooled_sd", report.pooled_sd},
         {"score", report.score},
         {"rl_ready", report.rl_ready}};
  return j.dump(2);
}

std::string report_to_table(const ScsReport& report) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "group      n        mean      sd\n";
  os << "valid      " << report.n_valid << "  " << report.mean_valid << "  "
     << report.sd_valid << "\n";
  os << "corrupted  " << report.n_corrupt << "  " << report.mean_corrupt
     << "  " << report.sd_corrupt << "\n";
  os << "pooled sd  " << report.pooled_sd << "\n";
  os << "score      " << report.score
     << (report.rl_ready ? "  (RL-ready: score > 1.5)" : "") << "\n";
  return os.str();
}

std::string sweep_to_table(std::span<const SweepPoint> points) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "rate    score\n";
  for (const SweepPoint& p : points) {
    os << p.rate << "  " << p.report.score << "\n";
  }
  return os.str();
}

}  // namespace chemscore::diag
