// Scripted NDJSON model endpoint for harness tests and offline dry runs.
// Speaks the wire protocol on stdin/stdout: one JSON request per line,
// one JSON response per line.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemscore/diagnostics.hpp"
#include "chemscore/rng.hpp"
#include "chemscore/smiles.hpp"
#include "chemscore/taskgen.hpp"

using nlohmann::json;
namespace cs = chemscore;

namespace {

struct MockConfig {
  std::string behavior = "immediate";
  std::string answer = "42";
  double delta = 1.0;
  double noise_sd = 0.5;
  std::uint64_t seed = 0;
  std::vector<cs::taskgen::TaskInstance> instances;
};

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string think_block(const std::string& prompt, const std::string& answer) {
  // Continue an already-opened reasoning block instead of re-opening it.
  if (ends_with(prompt, "<think>") || ends_with(prompt, "<reasoning>")) {
    return "recalling</think>\n<answer>" + answer + "</answer>";
  }
  return "<think>recalling</think>\n<answer>" + answer + "</answer>";
}

std::string echo_answer(const MockConfig& cfg, const std::string& prompt) {
  // Instances' prompts are prefixes of the harness prompt (mode tags and
  // injected completions get appended); take the longest match.
  const cs::taskgen::TaskInstance* best = nullptr;
  for (const auto& inst : cfg.instances) {
    if (prompt.rfind(inst.prompt, 0) == 0 &&
        (best == nullptr || inst.prompt.size() > best->prompt.size())) {
      best = &inst;
    }
  }
  return best != nullptr ? best->echo : cfg.answer;
}

std::string generate_reply(const MockConfig& cfg, const std::string& prompt) {
  if (cfg.behavior == "immediate" || cfg.behavior == "fixed") {
    if (ends_with(prompt, "<answer>")) return cfg.answer + "</answer>";
    return think_block(prompt, cfg.answer);
  }
  if (cfg.behavior == "inject-once") {
    if (ends_with(prompt, "<answer>")) return cfg.answer + "</answer>";
    return "let me think about this at length and never conclude";
  }
  if (cfg.behavior == "never") {
    return "rambling with no tags at all";
  }
  if (cfg.behavior == "echo") {
    std::string answer = echo_answer(cfg, prompt);
    if (ends_with(prompt, "<answer>")) return answer + "</answer>";
    return think_block(prompt, answer);
  }
  return "unsupported behavior";
}

// Tokens are maximal non-space runs plus their trailing spaces, so that the
// concatenation reassembles the prompt exactly.
std::vector<std::string> tokenize(const std::string& prompt) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < prompt.size()) {
    std::size_t j = i;
    while (j < prompt.size() && prompt[j] != ' ') ++j;
    while (j < prompt.size() && prompt[j] == ' ') ++j;
    tokens.push_back(prompt.substr(i, j - i));
    i = j;
  }
  return tokens;
}

json score_reply(const MockConfig& cfg, const std::string& prompt) {
  std::vector<std::string> tokens = tokenize(prompt);

  std::size_t payload_begin = std::string::npos;
  std::size_t payload_end = std::string::npos;
  bool payload_invalid = false;
  std::size_t begin_tag = prompt.find("[BEGIN_SMILES]");
  std::size_t end_tag = prompt.find("[END_SMILES]");
  if (begin_tag != std::string::npos && end_tag != std::string::npos) {
    payload_begin = begin_tag + std::string("[BEGIN_SMILES]").size() + 1;
    payload_end = end_tag > payload_begin ? end_tag - 1 : payload_begin;
    std::string payload = prompt.substr(payload_begin, payload_end - payload_begin);
    payload_invalid = !cs::chem::is_valid_smiles(payload);
  }

  std::vector<double> logprobs;
  logprobs.reserve(tokens.size());
  if (cfg.behavior == "score-noise") {
    std::uint64_t base = cs::hash_text(prompt) ^ cfg.seed;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      cs::SplitMix64 rng(cs::derive_seed(base, t));
      logprobs.push_back(-2.0 + cfg.noise_sd * rng.next_gaussian());
    }
  } else {
    // score-penalize: flat -1 with a per-prompt jitter; payload tokens of
    // invalid payloads get an extra -delta.
    cs::SplitMix64 rng(cs::derive_seed(cfg.seed, cs::hash_text(prompt)));
    double jitter = (rng.next_double() - 0.5) * 0.4;
    std::size_t offset = 0;
    for (const std::string& tok : tokens) {
      std::size_t tok_begin = offset;
      std::size_t tok_end = offset + tok.size();
      offset = tok_end;
      double lp = -1.0 + jitter;
      bool in_payload = payload_begin != std::string::npos &&
                        tok_begin < payload_end && tok_end > payload_begin;
      if (in_payload && payload_invalid) lp -= cfg.delta;
      logprobs.push_back(lp);
    }
  }
  return json{{"token_logprobs", logprobs}, {"token_texts", tokens}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scripted mock model endpoint (NDJSON on stdin/stdout)"};
  MockConfig cfg;
  std::string instances_path;
  app.add_option("--behavior", cfg.behavior,
                 "immediate|fixed|inject-once|never|echo|score-penalize|score-noise");
  app.add_option("--answer", cfg.answer, "fixed answer text");
  app.add_option("--instances", instances_path, "task instances jsonl (echo)");
  app.add_option("--delta", cfg.delta, "per-token penalty on invalid payloads");
  app.add_option("--noise-sd", cfg.noise_sd, "noise stddev (score-noise)");
  app.add_option("--seed", cfg.seed, "rng seed");
  CLI11_PARSE(app, argc, argv);

  if (!instances_path.empty()) {
    std::ifstream in(instances_path);
    if (!in) {
      std::cerr << "cannot open " << instances_path << "\n";
      return 1;
    }
    cfg.instances = cs::taskgen::read_task_instances(in);
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    json response;
    try {
      json request = json::parse(line);
      std::string op = request.at("op").get<std::string>();
      std::string prompt = request.at("prompt").get<std::string>();
      if (op == "generate") {
        response = json{{"text", generate_reply(cfg, prompt)}};
      } else if (op == "score") {
        response = score_reply(cfg, prompt);
      } else {
        response = json{{"error", "unknown op: " + op}};
      }
    } catch (const std::exception& e) {
      response = json{{"error", e.what()}};
    }
    std::cout << response.dump() << "\n" << std::flush;
  }
  return 0;
}
