#include "chemscore/rewards.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "chemscore/canonical.hpp"
#include "chemscore/text.hpp"

namespace chemscore::rewards {

std::optional<TaskKind> task_from_string(std::string_view s) {
  std::string k = to_lower(s);
  if (k == "rxp") return TaskKind::Rxp;
  if (k == "i2s") return TaskKind::I2s;
  if (k == "rxn") return TaskKind::Rxn;
  if (k == "rxr") return TaskKind::Rxr;
  if (k == "rxi") return TaskKind::Rxi;
  if (k == "rxtf") return TaskKind::Rxtf;
  if (k == "ceb") return TaskKind::Ceb;
  if (k == "cmg") return TaskKind::Cmg;
  if (k == "crr") return TaskKind::Crr;
  return std::nullopt;
}

const char* to_string(TaskKind task) {
  switch (task) {
    case TaskKind::Rxp: return "rxp";
    case TaskKind::I2s: return "i2s";
    case TaskKind::Rxn: return "rxn";
    case TaskKind::Rxr: return "rxr";
    case TaskKind::Rxi: return "rxi";
    case TaskKind::Rxtf: return "rxtf";
    case TaskKind::Ceb: return "ceb";
    case TaskKind::Cmg: return "cmg";
    case TaskKind::Crr: return "crr";
  }
  return "?";
}

const std::vector<std::string>& reaction_classes() {
  static const std::vector<std::string> classes = {
      "Acylation",
      "Aromatic Heterocycle Formation",
      "C-C Coupling",
      "Deprotection",
      "Functional Group Addition",
      "Functional Group Interconversion",
      "Heteroatom Alkylation and Arylation",
      "Miscellaneous",
      "Protection",
      "Reduction",
  };
  return classes;
}

double rxp_accuracy(std::string_view o, std::string_view truth_smiles) {
  std::optional<std::string> answer = extract_answer(o);
  if (!answer || !chem::is_valid_smiles(*answer)) return -1.0;
  return chem::same_molecule(*answer, truth_smiles) ? 1.0 : -0.5;
}

double tanimoto_scaled(double tau) {
  if (tau == 1.0) return 1.0;
  if (tau >= 0.3) return tau - 0.3;
  return -0.5;
}

double i2s_tanimoto_reward(std::string_view o, std::string_view truth_smiles,
                           const FingerprintConfig& fp) {
  std::optional<std::string> answer = extract_answer(o);
  double tau = 0.0;
  if (answer && chem::is_valid_smiles(*answer)) {
    chem::Fingerprint fa =
        chem::morgan_fingerprint(chem::parse_smiles(*answer), fp.radius, fp.width);
    chem::Fingerprint ft = chem::morgan_fingerprint(
        chem::parse_smiles(truth_smiles), fp.radius, fp.width);
    tau = chem::tanimoto(fa, ft);
  }
  return tanimoto_scaled(tau);
}

std::string normalize_choice(std::string_view s) {
  std::string t(trim(s));
  while (!t.empty() && (t.back() == '.' || t.back() == '!' || t.back() == '?' ||
                        t.back() == ',' || t.back() == ';' || t.back() == ':')) {
    t.pop_back();
  }
  return to_lower(trim(t));
}

int mcq_accuracy(std::string_view o, std::string_view truth,
                 std::span<const std::string> labels) {
  std::optional<std::string> answer = extract_answer(o);
  if (!answer) return 0;
  std::string norm = normalize_choice(*answer);
  bool allowed = std::any_of(labels.begin(), labels.end(), [&](const auto& l) {
    return normalize_choice(l) == norm;
  });
  return allowed && norm == normalize_choice(truth) ? 1 : 0;
}

std::vector<double> rxn_accuracy(std::span<const std::string> completions,
                                 std::string_view truth,
                                 std::span<const std::string> classes) {
  std::string truth_norm = normalize_choice(truth);
  std::vector<std::string> extracted(completions.size());
  std::vector<double> rewards(completions.size(), 0.0);
  for (std::size_t i = 0; i < completions.size(); ++i) {
    std::optional<std::string> answer = extract_answer(completions[i]);
    if (!answer) continue;
    std::string norm = normalize_choice(*answer);
    bool named = std::any_of(classes.begin(), classes.end(), [&](const auto& c) {
      return normalize_choice(c) == norm;
    });
    if (!named) continue;
    extracted[i] = norm;
    rewards[i] = norm == truth_norm ? 1.0 : 0.1;
  }
  bool all_same_wrong =
      !completions.empty() && !extracted[0].empty() && extracted[0] != truth_norm;
  for (const std::string& e : extracted) {
    if (e != extracted[0] || e.empty()) all_same_wrong = false;
  }
  if (all_same_wrong) {
    for (double& r : rewards) r -= 0.2;
  }
  return rewards;
}

// --- equations ---

namespace {

std::optional<EquationTerm> parse_term(std::string_view raw) {
  std::vector<std::string> parts = split_ws(raw);
  if (parts.size() != 2) return std::nullopt;
  EquationTerm term;
  auto [ptr, ec] = std::from_chars(parts[0].data(),
                                   parts[0].data() + parts[0].size(),
                                   term.coefficient);
  if (ec != std::errc() || ptr != parts[0].data() + parts[0].size() ||
      term.coefficient <= 0) {
    return std::nullopt;
  }
  term.formula = parts[1];
  return term;
}

std::optional<std::vector<EquationTerm>> parse_side(std::string_view side) {
  std::vector<EquationTerm> terms;
  for (const std::string& chunk : split_on(side, '+')) {
    std::optional<EquationTerm> term = parse_term(chunk);
    if (!term) return std::nullopt;
    terms.push_back(std::move(*term));
  }
  if (terms.empty()) return std::nullopt;
  return terms;
}

std::multiset<std::string> term_multiset(const std::vector<EquationTerm>& terms) {
  std::multiset<std::string> out;
  for (const EquationTerm& t : terms) {
    out.insert(std::to_string(t.coefficient) + " " + t.formula);
  }
  return out;
}

std::string side_to_string(const std::vector<EquationTerm>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) out += " + ";
    out += std::to_string(terms[i].coefficient) + " " + terms[i].formula;
  }
  return out;
}

}  // namespace

std::optional<Equation> parse_equation(std::string_view s) {
  std::size_t sep = s.find("==");
  std::size_t sep_len = 2;
  if (sep == std::string_view::npos) {
    sep = s.find('=');
    sep_len = 1;
  }
  if (sep == std::string_view::npos) return std::nullopt;
  auto lhs = parse_side(s.substr(0, sep));
  auto rhs = parse_side(s.substr(sep + sep_len));
  if (!lhs || !rhs) return std::nullopt;
  return Equation{std::move(*lhs), std::move(*rhs)};
}

std::string equation_to_string(const Equation& eq) {
  return side_to_string(eq.lhs) + " = " + side_to_string(eq.rhs);
}

RewardResult ceb_reward(std::string_view o, std::string_view truth_equation) {
  RewardResult result;
  std::optional<Equation> truth = parse_equation(truth_equation);
  if (!truth) {
    result.add("format", 0.0);
    result.add("similarity", 0.0);
    result.diagnostics["error"] = "truth equation unparsable";
    return result;
  }

  std::optional<std::string> answer = extract_answer(o);
  std::string answer_text = answer ? *answer : std::string(o);
  result.diagnostics["answer"] = answer_text;

  std::optional<Equation> generated = parse_equation(answer_text);
  if (!generated) {
    // Degrade to raw-string similarity against the full truth equation.
    result.add("format", 0.0);
    result.add("similarity",
               levenshtein_similarity(normalize_ws(answer_text),
                                      equation_to_string(*truth)));
    result.diagnostics["malformed"] = "1";
    return result;
  }

  double format = 0.0;
  if (term_multiset(generated->lhs) == term_multiset(truth->lhs)) {
    format += 0.3;
  }
  result.add("format", format);
  result.add("similarity", levenshtein_similarity(side_to_string(generated->rhs),
                                                  side_to_string(truth->rhs)));
  return result;
}

// --- conditional material generation ---

bool CmgSession::record(const std::string& key) {
  std::lock_guard<std::mutex> lock(mutex_);
  return seen_.insert(key).second;
}

namespace {

std::optional<chem::CompositionSequence> extract_material(std::string_view o) {
  // The final <material> block is the one scored.
  constexpr std::string_view kOpen = "<material>";
  std::size_t open = o.rfind(kOpen);
  if (open == std::string_view::npos) return std::nullopt;
  try {
    return chem::parse_composition(o.substr(open));
  } catch (const chem::CompositionError&) {
    return std::nullopt;
  }
}

std::string format_double(double v) {
  std::string s = std::to_string(v);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

RewardResult cmg_reward(std::string_view o,
                        const std::set<std::string>& prompt_elements,
                        const std::set<std::string>& reference_keys,
                        CmgSession& session, const CmgWeights& weights) {
  RewardResult result;
  std::optional<chem::CompositionSequence> comp = extract_material(o);

  double format = comp ? 1.0 : 0.0;
  double validity = 0.0;
  double precision = 0.0;
  double novelty = 0.0;
  if (comp) {
    validity = chem::charge_neutral_valid(*comp) ? 1.0 : 0.0;
    if (!prompt_elements.empty()) {
      std::set<std::string> generated(comp->elements.begin(),
                                      comp->elements.end());
      std::size_t hit = 0;
      for (const std::string& e : prompt_elements) hit += generated.count(e);
      precision = static_cast<double>(hit) /
                  static_cast<double>(prompt_elements.size());
    }
    std::string key = comp->normalized_key();
    bool fresh = reference_keys.count(key) == 0 && session.record(key);
    novelty = fresh ? 1.0 : 0.0;
    result.diagnostics["composition"] = key;
  }

  result.add("validity", weights.validity * validity);
  result.add("precision", weights.precision * precision);
  result.add("novelty", weights.novelty * novelty);
  result.add("format", weights.format * format);
  result.diagnostics["validity_raw"] = format_double(validity);
  result.diagnostics["precision_raw"] = format_double(precision);
  result.diagnostics["novelty_raw"] = format_double(novelty);
  result.diagnostics["format_raw"] = format_double(format);
  return result;
}

// --- crystal relaxation ---

namespace {

bool parse_count_token(std::string_view tok, int& out) {
  constexpr std::string_view kSuffix = "_int";
  if (tok.size() <= kSuffix.size() ||
      tok.substr(tok.size() - kSuffix.size()) != kSuffix) {
    return false;
  }
  std::string_view digits = tok.substr(0, tok.size() - kSuffix.size());
  int value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value <= 0) {
    return false;
  }
  out = value;
  return true;
}

bool parse_float_token(const std::string& tok, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(tok, &used);
    return used == tok.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

std::optional<Mat2SeqBlock> parse_mat2seq(std::string_view s) {
  std::vector<std::string> tok = split_ws(s);
  std::size_t i = 0;
  auto next_is = [&](std::string_view word) {
    return i < tok.size() && tok[i] == word;
  };
  if (!next_is("formula")) return std::nullopt;
  ++i;

  Mat2SeqBlock block;
  const chem::PeriodicTable& table = chem::PeriodicTable::bundled();
  while (i + 1 < tok.size() && table.contains(tok[i])) {
    int count = 0;
    if (!parse_count_token(tok[i + 1], count)) return std::nullopt;
    block.formula.emplace_back(tok[i], count);
    i += 2;
  }
  if (block.formula.empty()) return std::nullopt;

  if (!next_is("space_group_symbol")) return std::nullopt;
  ++i;
  if (i >= tok.size() || tok[i].size() < 3 || tok[i].front() != '\'' ||
      tok[i].back() != '\'') {
    return std::nullopt;
  }
  block.space_group_symbol = tok[i].substr(1, tok[i].size() - 2);
  ++i;

  if (!next_is("lattice_parameters")) return std::nullopt;
  ++i;
  static const std::array<std::string_view, 6> kParams = {"a", "b", "c",
                                                          "alpha", "beta", "gamma"};
  for (std::size_t p = 0; p < kParams.size(); ++p) {
    if (!next_is(kParams[p])) return std::nullopt;
    ++i;
    if (i >= tok.size() || !parse_float_token(tok[i], block.lattice[p])) {
      return std::nullopt;
    }
    ++i;
  }

  while (i < tok.size()) {
    Mat2SeqBlock::Site site;
    if (!table.contains(tok[i])) return std::nullopt;
    site.element = tok[i++];
    if (i >= tok.size() || !parse_count_token(tok[i], site.count)) {
      return std::nullopt;
    }
    ++i;
    for (double& f : site.frac) {
      if (i >= tok.size() || !parse_float_token(tok[i], f)) return std::nullopt;
      ++i;
    }
    block.sites.push_back(std::move(site));
  }
  if (block.sites.empty()) return std::nullopt;
  return block;
}

double crr_format_reward(std::string_view o, double input_energy,
                         std::optional<double> output_energy) {
  std::optional<std::string> answer = extract_answer(o);
  std::string_view body = answer ? std::string_view(*answer) : o;
  // Drop a stray closing tag when the opening one was injected upstream.
  std::string cleaned(body);
  std::size_t tag = cleaned.find("</answer>");
  if (tag != std::string::npos) cleaned.resize(tag);

  if (!parse_mat2seq(cleaned)) return -10.0;
  if (output_energy && *output_energy < input_energy) return -1.0;
  return -5.0;
}

// --- aggregate helpers ---

int accuracy_percentage(std::string_view o, std::string_view truth,
                        TaskKind task) {
  std::optional<std::string> answer = extract_answer(o);
  switch (task) {
    case TaskKind::Rxp:
    case TaskKind::I2s:
      return answer && chem::same_molecule(*answer, truth) ? 1 : 0;
    case TaskKind::Rxn:
      return mcq_accuracy(o, truth, reaction_classes());
    case TaskKind::Rxr:
    case TaskKind::Rxi: {
      static const std::vector<std::string> kChoices = {"A", "B", "C", "D"};
      return mcq_accuracy(o, truth, kChoices);
    }
    case TaskKind::Rxtf: {
      static const std::vector<std::string> kBinary = {"True", "False"};
      return mcq_accuracy(o, truth, kBinary);
    }
    case TaskKind::Ceb: {
      if (!answer) return 0;
      auto generated = parse_equation(*answer);
      auto expected = parse_equation(truth);
      return generated && expected &&
                     equation_to_string(*generated) == equation_to_string(*expected)
                 ? 1
                 : 0;
    }
    case TaskKind::Cmg: {
      // Full credit: well-formed, charge neutral, all prompt elements used.
      std::optional<chem::CompositionSequence> comp = extract_material(o);
      if (!comp || !chem::charge_neutral_valid(*comp)) return 0;
      std::set<std::string> want;
      for (const std::string& e : split_ws(truth)) want.insert(e);
      std::set<std::string> got(comp->elements.begin(), comp->elements.end());
      for (const std::string& e : want) {
        if (got.count(e) == 0) return 0;
      }
      return 1;
    }
    case TaskKind::Crr:
      return 0;  // needs an external energy oracle
  }
  return 0;
}

RewardResult score_completion(TaskKind task, std::string_view completion,
                              std::string_view truth, ScoreContext& ctx) {
  static const std::vector<std::string> kChoices = {"A", "B", "C", "D"};
  static const std::vector<std::string> kBinary = {"True", "False"};

  if (task == TaskKind::Cmg) {
    static const std::set<std::string> kEmpty;
    static CmgSession fallback_session;
    return cmg_reward(completion, ctx.prompt_elements,
                      ctx.reference_keys ? *ctx.reference_keys : kEmpty,
                      ctx.session ? *ctx.session : fallback_session);
  }

  RewardResult result;
  std::optional<std::string> answer = extract_answer(completion);
  if (answer) result.diagnostics["answer"] = *answer;

  switch (task) {
    case TaskKind::Rxp:
      result.add("format", format_reward(completion));
      result.add("accuracy", rxp_accuracy(completion, truth));
      break;
    case TaskKind::I2s:
      result.add("format", format_reward(completion));
      result.add("accuracy", i2s_tanimoto_reward(completion, truth, ctx.fp));
      break;
    case TaskKind::Rxn:
      // Group penalty handled in score_group.
      result.add("format", format_reward(completion));
      result.add("accuracy",
                 rxn_accuracy(std::vector<std::string>{std::string(completion)},
                              truth, reaction_classes())[0]);
      break;
    case TaskKind::Rxr:
    case TaskKind::Rxi:
      result.add("format", format_reward(completion));
      result.add("accuracy",
                 static_cast<double>(mcq_accuracy(completion, truth, kChoices)));
      break;
    case TaskKind::Rxtf:
      result.add("format", format_reward(completion));
      result.add("accuracy",
                 static_cast<double>(mcq_accuracy(completion, truth, kBinary)));
      break;
    case TaskKind::Ceb: {
      RewardResult ceb = ceb_reward(completion, truth);
      return ceb;
    }
    case TaskKind::Crr:
      result.add("format", crr_format_reward(completion, ctx.input_energy,
                                             ctx.output_energy));
      break;
    case TaskKind::Cmg:
      break;  // handled above
  }
  return result;
}

std::vector<RewardResult> score_group(TaskKind task,
                                      std::span<const std::string> completions,
                                      std::string_view truth,
                                      ScoreContext& ctx) {
  std::vector<RewardResult> out;
  out.reserve(completions.size());
  if (task == TaskKind::Rxn) {
    std::vector<double> acc = rxn_accuracy(completions, truth, reaction_classes());
    for (std::size_t i = 0; i < completions.size(); ++i) {
      RewardResult r;
      r.add("format", format_reward(completions[i]));
      r.add("accuracy", acc[i]);
      std::optional<std::string> answer = extract_answer(completions[i]);
      if (answer) r.diagnostics["answer"] = *answer;
      out.push_back(std::move(r));
    }
    return out;
  }
  for (const std::string& completion : completions) {
    out.push_back(score_completion(task, completion, truth, ctx));
  }
  return out;
}

}  // namespace chemscore::rewards
