// chemscore command line: corruption operators, reward scoring, corpus
// filtering, task generation, diagnostics, and the benchmark runner.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemscore/canonical.hpp"
#include "chemscore/corruption.hpp"
#include "chemscore/diagnostics.hpp"
#include "chemscore/harness.hpp"
#include "chemscore/rewards.hpp"
#include "chemscore/rng.hpp"
#include "chemscore/taskgen.hpp"
#include "chemscore/tcs.hpp"
#include "chemscore/text.hpp"

using nlohmann::json;
namespace cs = chemscore;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!cs::trim(line).empty()) lines.emplace_back(cs::trim(line));
  }
  return lines;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::vector<double> parse_rate_list(const std::string& csv) {
  std::vector<double> rates;
  for (const std::string& tok : cs::split_on(csv, ',')) {
    if (!cs::trim(tok).empty()) rates.push_back(std::stod(std::string(cs::trim(tok))));
  }
  return rates;
}

// --- corrupt ---

int run_corrupt(const std::string& kind, double rate, std::uint64_t seed,
                const std::string& in_path, const std::string& out_path) {
  std::vector<std::string> lines = read_lines(in_path);
  std::ofstream out = open_out(out_path);
  cs::corrupt::CorruptionConfig cfg;
  cfg.rate = rate;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    cfg.seed = cs::derive_seed(seed, i);
    std::string corrupted;
    if (kind == "smiles") {
      corrupted = cs::corrupt::corrupt_smiles(lines[i], cfg);
    } else if (kind == "composition") {
      corrupted = cs::corrupt::corrupt_composition(lines[i], cfg);
    } else if (kind == "description") {
      corrupted = cs::corrupt::corrupt_description(lines, i, cfg.seed);
    } else {
      throw std::runtime_error("unknown kind: " + kind);
    }
    out << lines[i] << '\t' << corrupted << '\n';
  }
  return 0;
}

// --- score ---

json result_to_json(const cs::rewards::RewardResult& r) {
  json components = json::object();
  for (const auto& [name, value] : r.components) components[name] = value;
  json diagnostics = json::object();
  for (const auto& [k, v] : r.diagnostics) diagnostics[k] = v;
  return json{{"components", components}, {"total", r.total},
              {"diagnostics", diagnostics}};
}

int run_score(const std::string& task_name, const std::string& in_path,
              const std::string& truth_path, const std::string& out_path) {
  auto task = cs::rewards::task_from_string(task_name);
  if (!task) throw std::runtime_error("unknown task: " + task_name);

  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::ostream* out = &std::cout;
  std::ofstream out_file;
  if (!out_path.empty()) {
    out_file = open_out(out_path);
    out = &out_file;
  }

  cs::rewards::CmgSession session;
  std::set<std::string> empty_reference;

  if (!truth_path.empty()) {
    // Paired mode: one JSON-encoded completion per line, one truth per line.
    std::vector<std::string> truths = read_lines(truth_path);
    std::string line;
    std::size_t i = 0;
    while (std::getline(in, line)) {
      if (cs::trim(line).empty()) continue;
      if (i >= truths.size()) throw std::runtime_error("more completions than truths");
      std::string completion = json::parse(line).get<std::string>();
      cs::rewards::ScoreContext ctx;
      ctx.reference_keys = &empty_reference;
      ctx.session = &session;
      if (*task == cs::rewards::TaskKind::Cmg) {
        for (const std::string& e : cs::split_ws(truths[i])) {
          ctx.prompt_elements.insert(e);
        }
      }
      cs::rewards::RewardResult r =
          cs::rewards::score_completion(*task, completion, truths[i], ctx);
      *out << result_to_json(r).dump() << '\n';
      ++i;
    }
    return 0;
  }

  // Wire mode: {task?, completions[], ground_truth, prompt_meta?, session?}
  // -> {per_completion: [{components, total}]}.
  std::string line;
  while (std::getline(in, line)) {
    if (cs::trim(line).empty()) continue;
    json request = json::parse(line);
    auto line_task = task;
    if (request.contains("task")) {
      line_task = cs::rewards::task_from_string(request.at("task").get<std::string>());
      if (!line_task) throw std::runtime_error("unknown task in request");
    }
    std::vector<std::string> completions =
        request.at("completions").get<std::vector<std::string>>();
    std::string truth = request.at("ground_truth").get<std::string>();

    cs::rewards::ScoreContext ctx;
    ctx.reference_keys = &empty_reference;
    ctx.session = &session;
    if (request.contains("prompt_meta")) {
      const json& meta = request.at("prompt_meta");
      if (meta.contains("elements")) {
        for (const auto& e : meta.at("elements")) {
          ctx.prompt_elements.insert(e.get<std::string>());
        }
      }
      if (meta.contains("input_energy")) {
        ctx.input_energy = meta.at("input_energy").get<double>();
      }
      if (meta.contains("output_energy") && !meta.at("output_energy").is_null()) {
        ctx.output_energy = meta.at("output_energy").get<double>();
      }
    }
    if (*line_task == cs::rewards::TaskKind::Cmg && ctx.prompt_elements.empty()) {
      for (const std::string& e : cs::split_ws(truth)) ctx.prompt_elements.insert(e);
    }

    std::vector<cs::rewards::RewardResult> results =
        cs::rewards::score_group(*line_task, completions, truth, ctx);
    json per_completion = json::array();
    for (const auto& r : results) per_completion.push_back(result_to_json(r));
    *out << json{{"per_completion", per_completion}}.dump() << '\n';
  }
  return 0;
}

// --- tcs ---

cs::corpus::FrequencyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model " + path);
  return cs::corpus::FrequencyModel::load(in);
}

int run_tcs_fit(const std::string& in_path, const std::string& model_path,
                double smoothing) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::vector<cs::corpus::CorpusDoc> docs = cs::corpus::read_docs(in);
  cs::corpus::FrequencyModel model = cs::corpus::FrequencyModel::fit(docs, smoothing);
  std::ofstream out = open_out(model_path);
  model.save(out);
  std::cerr << "fitted " << model.vocab_size() << " lemmas from " << docs.size()
            << " docs\n";
  return 0;
}

int run_tcs_score(const std::string& model_path, const std::string& in_path,
                  const std::string& out_path, bool per_type) {
  cs::corpus::FrequencyModel model = load_model(model_path);
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::ofstream out = open_out(out_path);
  std::string line;
  while (std::getline(in, line)) {
    auto doc = cs::corpus::read_doc_line(line);
    if (!doc) continue;
    doc->tcs = model.tcs(doc->text, per_type);
    out << cs::corpus::doc_to_json(*doc) << '\n';
  }
  return 0;
}

int run_tcs_filter(const std::string& model_path, const std::string& in_path,
                   double threshold, const std::string& out_path,
                   const std::string& stats_path) {
  cs::corpus::FrequencyModel model = load_model(model_path);
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::ofstream out = open_out(out_path);
  cs::corpus::FilterStats stats =
      cs::corpus::filter_stream(model, in, threshold, out);
  std::string stats_json = stats.to_json();
  if (!stats_path.empty()) {
    open_out(stats_path) << stats_json << '\n';
  }
  std::cerr << "retained " << stats.retained_docs << "/" << stats.total_docs
            << " docs at tcs > " << threshold << "\n";
  return 0;
}

int run_tcs_pr(const std::string& model_path, const std::string& in_path,
               const std::string& thresholds_csv) {
  cs::corpus::FrequencyModel model = load_model(model_path);
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::vector<cs::corpus::CorpusDoc> docs = cs::corpus::read_docs(in);
  std::vector<double> thresholds = parse_rate_list(thresholds_csv);
  auto points = cs::corpus::pr_curve(model, docs, thresholds);
  std::cout << "threshold\tprecision\trecall\n";
  for (const auto& p : points) {
    std::cout << p.threshold << '\t' << p.precision << '\t' << p.recall << '\n';
  }
  return 0;
}

// --- gen ---

int run_gen(const std::string& task, std::uint64_t seed,
            const std::string& in_path, const std::string& out_path,
            const std::string& candidates_path, std::size_t count) {
  std::ofstream out = open_out(out_path);
  std::vector<cs::taskgen::TaskInstance> instances;

  std::vector<std::string> candidates;
  if (!candidates_path.empty()) candidates = read_lines(candidates_path);

  if (task == "rxr" || task == "rxi" || task == "rxtf" || task == "rxp" ||
      task == "rxn") {
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot open " + in_path);
    std::vector<cs::taskgen::ReactionRecord> records =
        cs::taskgen::read_reaction_records(in);
    if (count > 0 && records.size() > count) records.resize(count);
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& rec = records[i];
      std::uint64_t rec_seed = cs::taskgen::record_seed(seed, rec.id);
      if (task == "rxr") {
        instances.push_back(cs::taskgen::gen_rxr(rec, candidates, rec_seed));
      } else if (task == "rxi") {
        instances.push_back(cs::taskgen::gen_rxi(rec, rec_seed));
      } else if (task == "rxtf") {
        instances.push_back(
            cs::taskgen::gen_rxtf(rec, i % 2 == 1, candidates, rec_seed));
      } else if (task == "rxp") {
        instances.push_back(cs::taskgen::gen_rxp(rec));
      } else {
        instances.push_back(cs::taskgen::gen_rxn(rec));
      }
    }
  } else if (task == "cmg") {
    for (const std::string& line : read_lines(in_path)) {
      cs::chem::CompositionSequence comp =
          line.find("<material>") != std::string::npos
              ? cs::chem::parse_composition(line)
              : cs::chem::parse_composition_sequence(line);
      instances.push_back(cs::taskgen::gen_cmg(comp, ""));
      if (count > 0 && instances.size() >= count) break;
    }
  } else if (task == "ceb") {
    std::vector<std::string> lines = read_lines(in_path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      instances.push_back(cs::taskgen::gen_ceb(
          lines[i], cs::derive_seed(seed, i), "eq" + std::to_string(i)));
      if (count > 0 && instances.size() >= count) break;
    }
  } else {
    throw std::runtime_error("unknown task: " + task);
  }

  cs::taskgen::write_task_instances(out, instances);
  std::cerr << "generated " << instances.size() << " instances\n";
  return 0;
}

// --- diag ---

int run_diag_prompts(const std::string& molecules_path, double rate,
                     std::uint64_t seed, const std::string& out_path) {
  cs::corrupt::CorruptionConfig cfg;
  cfg.rate = rate;
  cfg.seed = seed;
  auto prompts = cs::diag::build_scs_prompts(read_lines(molecules_path), cfg);
  std::ofstream out = open_out(out_path);
  cs::diag::write_prompt_records(out, prompts);
  return 0;
}

int run_diag_scs(const std::string& endpoint_spec,
                 const std::string& molecules_path, double rate,
                 const std::string& rates_csv, std::uint64_t seed,
                 const std::string& scores_path, bool as_json) {
  if (!scores_path.empty()) {
    std::ifstream in(scores_path);
    if (!in) throw std::runtime_error("cannot open " + scores_path);
    auto records = cs::diag::read_scored_strings(in);
    cs::diag::ScsReport report = cs::diag::scs(records);
    std::cout << (as_json ? cs::diag::report_to_json(report)
                          : cs::diag::report_to_table(report));
    std::cout << '\n';
    return 0;
  }

  if (endpoint_spec.empty() || molecules_path.empty()) {
    throw std::runtime_error("need --endpoint and --molecules (or --scores)");
  }
  auto endpoint = cs::harness::ModelEndpoint::open(endpoint_spec);
  cs::harness::EndpointScorer scorer(endpoint);
  std::vector<std::string> molecules = read_lines(molecules_path);

  if (!rates_csv.empty()) {
    auto points = cs::diag::scs_sweep(molecules, parse_rate_list(rates_csv),
                                      scorer, seed);
    std::cout << cs::diag::sweep_to_table(points);
    return 0;
  }

  cs::corrupt::CorruptionConfig cfg;
  cfg.rate = rate;
  cfg.seed = seed;
  auto prompts = cs::diag::build_scs_prompts(molecules, cfg);
  auto scored = cs::harness::score_strings(endpoint, prompts);
  cs::diag::ScsReport report = cs::diag::scs(scored);
  std::cout << (as_json ? cs::diag::report_to_json(report)
                        : cs::diag::report_to_table(report));
  std::cout << '\n';
  return 0;
}

// --- bench ---

int run_bench(const std::string& instances_path, const std::string& endpoint_spec,
              const std::string& mode_name, int max_retries,
              const std::string& out_dir, int parallel, std::size_t limit) {
  auto mode = cs::harness::mode_from_string(mode_name);
  if (!mode) throw std::runtime_error("unknown mode: " + mode_name);
  std::ifstream in(instances_path);
  if (!in) throw std::runtime_error("cannot open " + instances_path);
  auto instances = cs::taskgen::read_task_instances(in);
  if (limit > 0 && instances.size() > limit) instances.resize(limit);

  auto endpoint = cs::harness::ModelEndpoint::open(endpoint_spec);
  cs::harness::EvalOptions options;
  options.mode = *mode;
  options.max_retries = max_retries;
  options.parallelism = parallel;
  options.run_dir = out_dir;
  cs::harness::EvalReport report =
      cs::harness::evaluate(instances, endpoint, options);
  std::cout << report.to_table();
  return 0;
}

int run_bench_report(const std::string& run_dir) {
  cs::harness::EvalReport report = cs::harness::load_report(run_dir);
  std::cout << report.to_table();
  auto recomputed = cs::harness::recompute_metrics(report.task, report.outcomes);
  bool consistent = recomputed == report.metrics;
  std::cout << "transcripts: " << report.outcomes.size()
            << (consistent ? " (metrics verified against transcripts)"
                           : " (WARNING: metrics do not match transcripts)")
            << "\n";
  return consistent ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chemscore: diagnostics, rewards and benchmarks for chemistry LLM work"};
  app.require_subcommand(1);

  // corrupt
  auto* corrupt_cmd = app.add_subcommand("corrupt", "corruption operators");
  std::string corrupt_kind = "smiles";
  double corrupt_rate = 0.2;
  std::uint64_t corrupt_seed = 0;
  std::string corrupt_in;
  std::string corrupt_out;
  corrupt_cmd->add_option("--kind", corrupt_kind, "smiles|composition|description");
  corrupt_cmd->add_option("--rate", corrupt_rate, "corruption rate in (0,1]");
  corrupt_cmd->add_option("--seed", corrupt_seed, "rng seed");
  corrupt_cmd->add_option("--in", corrupt_in, "input file (one record per line)")
      ->required();
  corrupt_cmd->add_option("--out", corrupt_out, "two-column TSV output")->required();

  // score
  auto* score_cmd = app.add_subcommand("score", "rule-based reward scoring");
  std::string score_task;
  std::string score_in;
  std::string score_truth;
  std::string score_out;
  score_cmd->add_option("--task", score_task, "rxp|i2s|rxn|rxr|rxi|rxtf|ceb|cmg|crr")
      ->required();
  score_cmd->add_option("--in", score_in,
                        "completions (JSON string per line) or wire requests")
      ->required();
  score_cmd->add_option("--truth", score_truth, "ground truths, one per line");
  score_cmd->add_option("--out", score_out, "output path (default stdout)");

  // tcs
  auto* tcs_cmd = app.add_subcommand("tcs", "corpus chemistry filtering");
  tcs_cmd->require_subcommand(1);
  std::string tcs_in;
  std::string tcs_model;
  std::string tcs_out;
  std::string tcs_stats;
  std::string tcs_thresholds = "1,2,4,8";
  double tcs_threshold = 4.0;
  double tcs_smoothing = 1.0;
  bool tcs_per_type = false;
  auto* tcs_fit = tcs_cmd->add_subcommand("fit", "fit frequency model");
  tcs_fit->add_option("--in", tcs_in, "labeled docs jsonl")->required();
  tcs_fit->add_option("--model", tcs_model, "model output path")->required();
  tcs_fit->add_option("--smoothing", tcs_smoothing, "additive smoothing");
  auto* tcs_score = tcs_cmd->add_subcommand("score", "score docs");
  tcs_score->add_option("--model", tcs_model)->required();
  tcs_score->add_option("--in", tcs_in)->required();
  tcs_score->add_option("--out", tcs_out)->required();
  tcs_score->add_flag("--per-type", tcs_per_type, "average over distinct lemmas");
  auto* tcs_filter = tcs_cmd->add_subcommand("filter", "stream filter by tcs");
  tcs_filter->add_option("--model", tcs_model)->required();
  tcs_filter->add_option("--in", tcs_in)->required();
  tcs_filter->add_option("--threshold", tcs_threshold);
  tcs_filter->add_option("--out", tcs_out)->required();
  tcs_filter->add_option("--stats", tcs_stats, "bucket stats json");
  auto* tcs_pr = tcs_cmd->add_subcommand("pr", "precision/recall table");
  tcs_pr->add_option("--model", tcs_model)->required();
  tcs_pr->add_option("--in", tcs_in)->required();
  tcs_pr->add_option("--thresholds", tcs_thresholds);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "task dataset generation");
  std::string gen_task;
  std::uint64_t gen_seed = 0;
  std::string gen_in;
  std::string gen_out;
  std::string gen_candidates;
  std::size_t gen_count = 0;
  gen_cmd->add_option("--task", gen_task, "rxr|rxi|rxtf|cmg|ceb|rxp|rxn")->required();
  gen_cmd->add_option("--seed", gen_seed);
  gen_cmd->add_option("--in", gen_in, "source records")->required();
  gen_cmd->add_option("--out", gen_out, "instances jsonl")->required();
  gen_cmd->add_option("--candidates", gen_candidates, "candidate SMILES pool");
  gen_cmd->add_option("--count", gen_count, "cap on generated instances");

  // diag
  auto* diag_cmd = app.add_subcommand("diag", "latent-solvability diagnostics");
  diag_cmd->require_subcommand(1);
  std::string diag_molecules;
  std::string diag_endpoint;
  std::string diag_scores;
  std::string diag_rates;
  std::string diag_out;
  double diag_rate = 0.2;
  std::uint64_t diag_seed = 0;
  bool diag_json = false;
  auto* diag_prompts = diag_cmd->add_subcommand("prompts", "emit scoring prompts");
  diag_prompts->add_option("--molecules", diag_molecules)->required();
  diag_prompts->add_option("--rate", diag_rate);
  diag_prompts->add_option("--seed", diag_seed);
  diag_prompts->add_option("--out", diag_out)->required();
  auto* diag_scs = diag_cmd->add_subcommand("scs", "symbolic competence score");
  diag_scs->add_option("--endpoint", diag_endpoint, "cmd:... or tcp:host:port");
  diag_scs->add_option("--molecules", diag_molecules);
  diag_scs->add_option("--rate", diag_rate);
  diag_scs->add_option("--rates", diag_rates, "comma list: corruption-rate sweep");
  diag_scs->add_option("--seed", diag_seed);
  diag_scs->add_option("--scores", diag_scores, "precomputed ScoredString jsonl");
  diag_scs->add_flag("--json", diag_json);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "model benchmark runner");
  bench_cmd->require_subcommand(1);
  std::string bench_instances;
  std::string bench_endpoint;
  std::string bench_mode = "reasoning";
  std::string bench_out;
  std::string bench_dir;
  int bench_retries = cs::harness::kDefaultMaxRetries;
  int bench_parallel = 1;
  std::size_t bench_limit = 0;
  auto* bench_run = bench_cmd->add_subcommand("run", "run a benchmark");
  bench_run->add_option("--instances", bench_instances, "task instances jsonl")
      ->required();
  bench_run->add_option("--endpoint", bench_endpoint, "cmd:... or tcp:host:port")
      ->required();
  bench_run->add_option("--mode", bench_mode, "direct|reasoning|plain");
  bench_run->add_option("--max-retries", bench_retries);
  bench_run->add_option("--out", bench_out, "run directory")->required();
  bench_run->add_option("--parallel", bench_parallel, "in-flight instances");
  bench_run->add_option("--limit", bench_limit, "cap instance count");
  auto* bench_report = bench_cmd->add_subcommand("report", "re-print a run report");
  bench_report->add_option("dir", bench_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (corrupt_cmd->parsed()) {
      return run_corrupt(corrupt_kind, corrupt_rate, corrupt_seed, corrupt_in,
                         corrupt_out);
    }
    if (score_cmd->parsed()) {
      return run_score(score_task, score_in, score_truth, score_out);
    }
    if (tcs_cmd->parsed()) {
      if (tcs_fit->parsed()) return run_tcs_fit(tcs_in, tcs_model, tcs_smoothing);
      if (tcs_score->parsed()) {
        return run_tcs_score(tcs_model, tcs_in, tcs_out, tcs_per_type);
      }
      if (tcs_filter->parsed()) {
        return run_tcs_filter(tcs_model, tcs_in, tcs_threshold, tcs_out, tcs_stats);
      }
      if (tcs_pr->parsed()) return run_tcs_pr(tcs_model, tcs_in, tcs_thresholds);
    }
    if (gen_cmd->parsed()) {
      return run_gen(gen_task, gen_seed, gen_in, gen_out, gen_candidates,
                     gen_count);
    }
    if (diag_cmd->parsed()) {
      if (diag_prompts->parsed()) {
        return run_diag_prompts(diag_molecules, diag_rate, diag_seed, diag_out);
      }
      if (diag_scs->parsed()) {
        return run_diag_scs(diag_endpoint, diag_molecules, diag_rate, diag_rates,
                            diag_seed, diag_scores, diag_json);
      }
    }
    if (bench_cmd->parsed()) {
      if (bench_run->parsed()) {
        return run_bench(bench_instances, bench_endpoint, bench_mode,
                         bench_retries, bench_out, bench_parallel, bench_limit);
      }
      if (bench_report->parsed()) return run_bench_report(bench_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
