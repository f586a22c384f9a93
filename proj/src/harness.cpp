#include "chemscore/harness.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "chemscore/canonical.hpp"
#include "chemscore/fingerprint.hpp"
#include "chemscore/rewards.hpp"
#include "chemscore/text.hpp"

namespace chemscore::harness {

using nlohmann::json;

std::optional<Mode> mode_from_string(std::string_view s) {
  if (s == "plain") return Mode::Plain;
  if (s == "direct") return Mode::Direct;
  if (s == "reasoning") return Mode::Reasoning;
  return std::nullopt;
}

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Plain: return "plain";
    case Mode::Direct: return "direct";
    case Mode::Reasoning: return "reasoning";
  }
  return "?";
}

namespace {

std::string_view mode_tag(Mode mode, std::string_view reasoning_tag) {
  switch (mode) {
    case Mode::Plain: return "";
    case Mode::Direct: return kAnswerTag;
    case Mode::Reasoning: return reasoning_tag;
  }
  return "";
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string set_mode(std::string prompt, Mode mode,
                     std::string_view reasoning_tag) {
  std::string_view tag = mode_tag(mode, reasoning_tag);
  if (tag.empty() || ends_with(prompt, tag)) return prompt;
  prompt += tag;
  return prompt;
}

InjectionResult generate_with_answer_injection(ModelEndpoint& endpoint,
                                               const std::string& moded_prompt,
                                               int max_retries,
                                               std::string_view mode_suffix) {
  InjectionResult result;
  std::string raw = endpoint.generate(moded_prompt).text;
  result.completion = std::string(mode_suffix) + raw;
  while (!rewards::match_answer_block(result.completion).matched &&
         result.retries < max_retries) {
    ++result.retries;
    raw += kAnswerTag;
    raw += endpoint.generate(moded_prompt + raw).text;
    result.completion = std::string(mode_suffix) + raw;
  }
  result.has_answer = rewards::match_answer_block(result.completion).matched;
  return result;
}

namespace {

std::map<std::string, double> score_instance(
    const taskgen::TaskInstance& inst, const std::string& completion,
    rewards::CmgSession& session) {
  std::map<std::string, double> scores;
  std::optional<std::string> answer = rewards::extract_answer(completion);
  std::optional<rewards::TaskKind> task = rewards::task_from_string(inst.task);
  if (!task) return scores;

  switch (*task) {
    case rewards::TaskKind::Rxp:
      scores["correct"] =
          answer && chem::same_molecule(*answer, inst.truth) ? 1.0 : 0.0;
      scores["valid_smiles"] =
          answer && chem::is_valid_smiles(*answer) ? 1.0 : 0.0;
      break;
    case rewards::TaskKind::I2s: {
      scores["correct"] =
          answer && chem::same_molecule(*answer, inst.truth) ? 1.0 : 0.0;
      double tau = 0.0;
      if (answer && chem::is_valid_smiles(*answer) &&
          chem::is_valid_smiles(inst.truth)) {
        tau = chem::tanimoto(
            chem::morgan_fingerprint(chem::parse_smiles(*answer)),
            chem::morgan_fingerprint(chem::parse_smiles(inst.truth)));
      }
      scores["tanimoto"] = tau;
      break;
    }
    case rewards::TaskKind::Rxn:
      scores["correct"] = rewards::mcq_accuracy(completion, inst.truth,
                                                rewards::reaction_classes());
      break;
    case rewards::TaskKind::Rxr:
    case rewards::TaskKind::Rxi: {
      static const std::vector<std::string> kChoices = {"A", "B", "C", "D"};
      scores["correct"] = rewards::mcq_accuracy(completion, inst.truth, kChoices);
      break;
    }
    case rewards::TaskKind::Rxtf: {
      static const std::vector<std::string> kBinary = {"True", "False"};
      scores["correct"] = rewards::mcq_accuracy(completion, inst.truth, kBinary);
      break;
    }
    case rewards::TaskKind::Ceb:
      scores["correct"] = rewards::accuracy_percentage(completion, inst.truth,
                                                       rewards::TaskKind::Ceb);
      break;
    case rewards::TaskKind::Cmg: {
      rewards::ScoreContext ctx;
      for (const std::string& e : split_ws(inst.truth)) {
        ctx.prompt_elements.insert(e);
      }
      static const std::set<std::string> kNoReference;
      rewards::RewardResult r = rewards::cmg_reward(completion, ctx.prompt_elements,
                                                    kNoReference, session);
      scores["validity"] = std::stod(r.diagnostics.at("validity_raw"));
      scores["precision"] = std::stod(r.diagnostics.at("precision_raw"));
      scores["novelty"] = std::stod(r.diagnostics.at("novelty_raw"));
      scores["well_formed"] = std::stod(r.diagnostics.at("format_raw"));
      break;
    }
    case rewards::TaskKind::Crr:
      scores["mat2seq_valid"] =
          rewards::crr_format_reward(completion, 0.0, std::nullopt) >= -5.0 ? 1.0
                                                                            : 0.0;
      break;
  }
  return scores;
}

json outcome_to_json(const InstanceOutcome& o, const std::string& task) {
  json scores = json::object();
  for (const auto& [k, v] : o.scores) scores[k] = v;
  return json{{"index", o.index},     {"task", task},
              {"prompt", o.prompt},   {"completion", o.completion},
              {"retries", o.retries}, {"has_answer", o.has_answer},
              {"answer", o.answer},   {"scores", scores},
              {"error", o.error}};
}

}  // namespace

std::map<std::string, double> recompute_metrics(
    const std::string& task, std::span<const InstanceOutcome> outcomes) {
  (void)task;
  std::map<std::string, std::pair<double, std::size_t>> sums;
  double retries_total = 0.0;
  double injected = 0.0;
  double fallback = 0.0;
  double errors = 0.0;
  for (const InstanceOutcome& o : outcomes) {
    if (!o.error.empty()) {
      errors += 1.0;
      continue;
    }
    for (const auto& [k, v] : o.scores) {
      auto& slot = sums[k];
      slot.first += v;
      slot.second += 1;
    }
    retries_total += o.retries;
    if (o.retries > 0) injected += 1.0;
    if (!o.has_answer) fallback += 1.0;
  }
  std::map<std::string, double> metrics;
  for (const auto& [k, sum] : sums) {
    metrics[k] = sum.second == 0 ? 0.0 : sum.first / static_cast<double>(sum.second);
  }
  // "correct" means accuracy for every task that defines it.
  if (metrics.count("correct")) {
    metrics["accuracy"] = metrics["correct"];
    metrics.erase("correct");
  }
  metrics["retries_total"] = retries_total;
  metrics["injection_fraction"] =
      outcomes.empty() ? 0.0 : injected / static_cast<double>(outcomes.size());
  metrics["fallback_count"] = fallback;
  metrics["error_count"] = errors;
  return metrics;
}

EvalReport evaluate(std::span<const taskgen::TaskInstance> instances,
                    ModelEndpoint& endpoint, const EvalOptions& options) {
  EvalReport report;
  report.task = instances.empty() ? "none" : std::string(instances[0].task);
  for (const taskgen::TaskInstance& inst : instances) {
    if (inst.task != report.task) report.task = "mixed";
  }
  report.mode = to_string(options.mode);
  report.instances = instances.size();
  report.outcomes.resize(instances.size());

  rewards::CmgSession session;
  std::string_view suffix = mode_tag(options.mode, options.reasoning_tag);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= instances.size()) return;
      const taskgen::TaskInstance& inst = instances[i];
      InstanceOutcome& outcome = report.outcomes[i];
      outcome.index = i;
      outcome.prompt = set_mode(inst.prompt, options.mode, options.reasoning_tag);
      try {
        InjectionResult gen = generate_with_answer_injection(
            endpoint, outcome.prompt, options.max_retries, suffix);
        outcome.completion = gen.completion;
        outcome.retries = gen.retries;
        outcome.has_answer = gen.has_answer;
        if (auto answer = rewards::extract_answer(gen.completion)) {
          outcome.answer = *answer;
        }
        outcome.scores = score_instance(inst, gen.completion, session);
      } catch (const std::exception& e) {
        outcome.error = e.what();
      }
    }
  };

  int workers = std::max(1, options.parallelism);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // CMG novelty depends on scoring order; re-score serially so parallel runs
  // match sequential ones.
  if (workers > 1) {
    rewards::CmgSession replay;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (instances[i].task == "cmg" && report.outcomes[i].error.empty()) {
        report.outcomes[i].scores =
            score_instance(instances[i], report.outcomes[i].completion, replay);
      }
    }
  }

  report.metrics = recompute_metrics(report.task, report.outcomes);

  if (!options.run_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(options.run_dir);
    {
      std::ofstream config(options.run_dir + "/config.json");
      json j{{"task", report.task},
             {"mode", report.mode},
             {"max_retries", options.max_retries},
             {"reasoning_tag", options.reasoning_tag},
             {"parallelism", options.parallelism},
             {"instances", report.instances}};
      config << j.dump(2) << '\n';
    }
    {
      std::ofstream transcripts(options.run_dir + "/transcripts.jsonl");
      for (std::size_t i = 0; i < instances.size(); ++i) {
        transcripts << outcome_to_json(report.outcomes[i],
                                       std::string(instances[i].task))
                        .dump()
                    << '\n';
      }
    }
    {
      std::ofstream out(options.run_dir + "/report.json");
      out << report.to_json() << '\n';
    }
    {
      std::ofstream out(options.run_dir + "/report.txt");
      out << report.to_table();
    }
  }
  return report;
}

std::string EvalReport::to_json() const {
  json metrics_json = json::object();
  for (const auto& [k, v] : metrics) metrics_json[k] = v;
  json j{{"task", task},
         {"mode", mode},
         {"instances", instances},
         {"metrics", metrics_json}};
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  os << "task: " << task << "  mode: " << mode << "  instances: " << instances
     << "\n";
  os.setf(std::ios::fixed);
  os.precision(4);
  for (const auto& [k, v] : metrics) {
    os << "  " << k;
    for (std::size_t pad = k.size(); pad < 24; ++pad) os << ' ';
    os << v << "\n";
  }
  return os.str();
}

EvalReport load_report(const std::string& run_dir) {
  EvalReport report;
  std::ifstream in(run_dir + "/report.json");
  if (!in) throw std::runtime_error("no report.json under " + run_dir);
  json j = json::parse(in);
  report.task = j.at("task").get<std::string>();
  report.mode = j.at("mode").get<std::string>();
  report.instances = j.at("instances").get<std::size_t>();
  for (const auto& [k, v] : j.at("metrics").items()) {
    report.metrics[k] = v.get<double>();
  }
  std::ifstream transcripts(run_dir + "/transcripts.jsonl");
  std::string line;
  while (std::getline(transcripts, line)) {
    if (trim(line).empty()) continue;
    json o = json::parse(line);
    InstanceOutcome outcome;
    outcome.index = o.at("index").get<std::size_t>();
    outcome.prompt = o.at("prompt").get<std::string>();
    outcome.completion = o.at("completion").get<std::string>();
    outcome.retries = o.at("retries").get<int>();
    outcome.has_answer = o.at("has_answer").get<bool>();
    outcome.answer = o.at("answer").get<std::string>();
    outcome.error = o.at("error").get<std::string>();
    for (const auto& [k, v] : o.at("scores").items()) {
      outcome.scores[k] = v.get<double>();
    }
    report.outcomes.push_back(std::move(outcome));
  }
  return report;
}

std::vector<diag::ScoredString> score_strings(
    ModelEndpoint& endpoint, std::span<const diag::PromptRecord> prompts) {
  std::vector<diag::ScoredString> out;
  out.reserve(prompts.size());
  for (const diag::PromptRecord& record : prompts) {
    ScoreResult scored = endpoint.score_tokens(record.prompt);

    std::string joined;
    for (const std::string& t : scored.token_texts) joined += t;
    if (joined != record.prompt) {
      throw SpanResolutionFailure("token texts do not reassemble the prompt (id " +
                                  record.id + ")");
    }

    std::size_t marker = record.prompt.find(diag::kBeginSentinel);
    if (marker == std::string::npos) {
      throw SpanResolutionFailure("prompt lacks " +
                                  std::string(diag::kBeginSentinel) + " (id " +
                                  record.id + ")");
    }
    std::size_t payload_begin = record.prompt.find(
        record.payload, marker + diag::kBeginSentinel.size());
    if (record.payload.empty() || payload_begin == std::string::npos) {
      throw SpanResolutionFailure("payload not found in prompt (id " +
                                  record.id + ")");
    }
    std::size_t payload_end = payload_begin + record.payload.size();

    // Smallest token window overlapping the payload characters.
    diag::ScoredString rec;
    rec.id = record.id;
    rec.variant = record.variant;
    rec.token_logprobs = std::move(scored.token_logprobs);
    std::size_t offset = 0;
    std::size_t begin = rec.token_logprobs.size();
    std::size_t end = 0;
    for (std::size_t t = 0; t < scored.token_texts.size(); ++t) {
      std::size_t tok_begin = offset;
      std::size_t tok_end = offset + scored.token_texts[t].size();
      offset = tok_end;
      if (tok_end <= payload_begin || tok_begin >= payload_end) continue;
      begin = std::min(begin, t);
      end = std::max(end, t + 1);
    }
    if (begin >= end) {
      throw SpanResolutionFailure("no tokens cover the payload (id " +
                                  record.id + ")");
    }
    rec.span_begin = begin;
    rec.span_end = end;
    out.push_back(std::move(rec));
  }
  return out;
}

diag::ScoredString EndpointScorer::score(const diag::PromptRecord& record) {
  std::vector<diag::PromptRecord> one{record};
  return score_strings(endpoint_, one)[0];
}

}  // namespace chemscore::harness
