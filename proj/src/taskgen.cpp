#include "chemscore/taskgen.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "chemscore/canonical.hpp"
#include "chemscore/rng.hpp"
#include "chemscore/text.hpp"

namespace chemscore::taskgen {

using nlohmann::json;

std::vector<ReactionRecord> read_reaction_records(std::istream& in) {
  std::vector<ReactionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j = json::parse(line);
    ReactionRecord rec;
    rec.id = j.value("id", "r" + std::to_string(line_no));
    rec.reactants = j.at("reactants").get<std::vector<std::string>>();
    if (j.contains("conditions")) {
      rec.conditions = j.at("conditions").get<std::vector<std::string>>();
    }
    rec.products = j.at("products").get<std::vector<std::string>>();
    if (j.contains("class") && !j.at("class").is_null()) {
      rec.class_label = j.at("class").get<std::string>();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_reaction_records(std::ostream& out,
                            std::span<const ReactionRecord> records) {
  for (const ReactionRecord& rec : records) {
    json j{{"id", rec.id},
           {"reactants", rec.reactants},
           {"conditions", rec.conditions},
           {"products", rec.products}};
    if (rec.class_label) j["class"] = *rec.class_label;
    out << j.dump() << '\n';
  }
}

std::vector<TaskInstance> read_task_instances(std::istream& in) {
  std::vector<TaskInstance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line);
    TaskInstance inst;
    inst.task = j.at("task").get<std::string>();
    inst.prompt = j.at("prompt").get<std::string>();
    inst.truth = j.at("truth").get<std::string>();
    if (j.contains("options")) {
      for (const auto& opt : j.at("options")) {
        inst.options.emplace_back(opt.at(0).get<std::string>(),
                                  opt.at(1).get<std::string>());
      }
    }
    if (j.contains("provenance")) {
      inst.provenance_id = j.at("provenance").value("id", "");
      inst.seed = j.at("provenance").value("seed", std::uint64_t{0});
    }
    inst.echo = j.value("echo", inst.truth);
    out.push_back(std::move(inst));
  }
  return out;
}

void write_task_instances(std::ostream& out,
                          std::span<const TaskInstance> instances) {
  for (const TaskInstance& inst : instances) {
    json options = json::array();
    for (const auto& [label, text] : inst.options) {
      options.push_back(json::array({label, text}));
    }
    json j{{"task", inst.task},
           {"prompt", inst.prompt},
           {"truth", inst.truth},
           {"options", options},
           {"provenance", {{"id", inst.provenance_id}, {"seed", inst.seed}}},
           {"echo", inst.echo}};
    out << j.dump() << '\n';
  }
}

namespace {

std::string join(std::span<const std::string> items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

std::string reaction_clause(const ReactionRecord& rec) {
  std::string out = "In the following reaction, ";
  out += rec.reactants.size() == 1 ? "the reagent is: " : "the reagents are: ";
  out += join(rec.reactants, ", ");
  if (!rec.conditions.empty()) {
    out += rec.conditions.size() == 1 ? ", the condition is: "
                                      : ", the conditions are: ";
    out += join(rec.conditions, ", ");
    out += ", and the product is: ";
  } else {
    out += " and the product is: ";
  }
  out += join(rec.products, ", ");
  out += ".";
  return out;
}

// One RxR-style corruption: a uniformly chosen reactant/reagent replaced by
// the most Tanimoto-similar molecule from a freshly drawn candidate batch.
ReactionRecord replace_one_molecule(const ReactionRecord& rec,
                                    std::span<const std::string> candidates,
                                    SplitMix64& rng) {
  if (candidates.empty()) throw NoCandidates("empty candidate pool");
  std::size_t pool_size = rec.reactants.size() + rec.conditions.size();
  if (pool_size == 0) throw DegenerateReaction("no replaceable molecules");

  std::size_t slot = static_cast<std::size_t>(rng.next_below(pool_size));
  const std::string& removed = slot < rec.reactants.size()
                                   ? rec.reactants[slot]
                                   : rec.conditions[slot - rec.reactants.size()];

  std::size_t batch_size = std::min(kCandidateBatch, candidates.size());
  std::vector<std::size_t> batch =
      rng.sample_indices(candidates.size(), batch_size);
  std::sort(batch.begin(), batch.end());  // lowest-index tie break

  chem::Fingerprint removed_fp;
  bool removed_ok = chem::is_valid_smiles(removed);
  if (removed_ok) {
    removed_fp = chem::morgan_fingerprint(chem::parse_smiles(removed));
  }

  double best_tau = -1.0;
  std::size_t best_index = candidates.size();
  for (std::size_t ci : batch) {
    const std::string& cand = candidates[ci];
    if (chem::same_molecule(cand, removed)) continue;
    double tau = 0.0;
    if (removed_ok && chem::is_valid_smiles(cand)) {
      tau = chem::tanimoto(removed_fp,
                           chem::morgan_fingerprint(chem::parse_smiles(cand)));
    }
    if (tau > best_tau) {
      best_tau = tau;
      best_index = ci;
    }
  }
  if (best_index == candidates.size()) {
    throw NoCandidates("all batch candidates equal the removed molecule");
  }

  ReactionRecord corrupted = rec;
  if (slot < rec.reactants.size()) {
    corrupted.reactants[slot] = candidates[best_index];
  } else {
    corrupted.conditions[slot - rec.reactants.size()] = candidates[best_index];
  }
  return corrupted;
}

const std::array<std::string, 4> kChoiceLabels = {"A", "B", "C", "D"};

TaskInstance four_option_instance(const std::string& task,
                                  const ReactionRecord& rec,
                                  std::vector<ReactionRecord> options,
                                  std::size_t original_index, SplitMix64& rng,
                                  std::uint64_t seed) {
  std::vector<std::size_t> order(options.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  TaskInstance inst;
  inst.task = task;
  inst.provenance_id = rec.id;
  inst.seed = seed;
  std::string body;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::string& label = kChoiceLabels[k];
    std::string text = reaction_clause(options[order[k]]);
    if (order[k] == original_index) inst.truth = label;
    body += "\n\n" + label + ". " + text;
    inst.options.emplace_back(label, std::move(text));
  }
  inst.prompt =
      "Question: Which chemical reaction is correct? Choose from the "
      "following options:" +
      body +
      "\n\nMake sure to give your choice A, B, C, or D inside the "
      "<answer>...</answer> tags.";
  inst.echo = inst.truth;
  return inst;
}

}  // namespace

TaskInstance gen_rxr(const ReactionRecord& rec,
                     std::span<const std::string> candidates,
                     std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<ReactionRecord> options;
  options.push_back(rec);
  for (int copy = 0; copy < 3; ++copy) {
    options.push_back(replace_one_molecule(rec, candidates, rng));
  }
  return four_option_instance("rxr", rec, std::move(options), 0, rng, seed);
}

TaskInstance gen_rxi(const ReactionRecord& rec, std::uint64_t seed) {
  std::size_t pool_size = rec.reactants.size() + rec.conditions.size();
  if (pool_size == 0 || rec.products.empty()) {
    throw DegenerateReaction("inversion needs at least one reagent and one product");
  }
  // Longest product SMILES, lowest index on ties.
  std::size_t longest = 0;
  for (std::size_t i = 1; i < rec.products.size(); ++i) {
    if (rec.products[i].size() > rec.products[longest].size()) longest = i;
  }

  SplitMix64 rng(seed);
  std::vector<ReactionRecord> options;
  options.push_back(rec);
  for (int copy = 0; copy < 3; ++copy) {
    ReactionRecord corrupted = rec;
    std::size_t slot = static_cast<std::size_t>(rng.next_below(pool_size));
    bool swapped = false;
    for (std::size_t attempt = 0; attempt < pool_size && !swapped; ++attempt) {
      std::size_t cur = (slot + attempt) % pool_size;
      std::string& reagent = cur < rec.reactants.size()
                                 ? corrupted.reactants[cur]
                                 : corrupted.conditions[cur - rec.reactants.size()];
      if (reagent == rec.products[longest]) continue;
      std::swap(reagent, corrupted.products[longest]);
      swapped = true;
    }
    if (!swapped) {
      throw DegenerateReaction("every reagent equals the longest product");
    }
    options.push_back(std::move(corrupted));
  }
  return four_option_instance("rxi", rec, std::move(options), 0, rng, seed);
}

TaskInstance gen_rxtf(const ReactionRecord& rec, bool corrupted,
                      std::span<const std::string> candidates,
                      std::uint64_t seed) {
  SplitMix64 rng(seed);
  ReactionRecord shown = rec;
  if (corrupted) shown = replace_one_molecule(rec, candidates, rng);

  TaskInstance inst;
  inst.task = "rxtf";
  inst.provenance_id = rec.id;
  inst.seed = seed;
  inst.truth = corrupted ? "False" : "True";
  inst.echo = inst.truth;
  inst.prompt = "Question: Is this chemical reaction correct? " +
                reaction_clause(shown) +
                " Make sure to give your answer True or False inside the "
                "<answer>...</answer> tags.";
  return inst;
}

TaskInstance gen_cmg(const chem::CompositionSequence& composition,
                     std::string_view source_id) {
  std::set<std::string> distinct(composition.elements.begin(),
                                 composition.elements.end());
  std::vector<std::string> elements(distinct.begin(), distinct.end());

  TaskInstance inst;
  inst.task = "cmg";
  inst.provenance_id = std::string(source_id);
  inst.truth = join(elements, " ");
  inst.prompt =
      "Build a material that has " + join(elements, ", ") +
      ". Please keep your reasoning as concise as possible. For example "
      "<material> A A B B B <sg12></material> where A, B refer to elements "
      "and <sg12> denotes the space group for example: "
      "<material> Pa In Tc Tc <sg225></material>.";
  inst.echo = "<material> " + join(composition.elements, " ") + " <sg" +
              std::to_string(composition.space_group) + "></material>";
  return inst;
}

TaskInstance gen_ceb(std::string_view equation, std::uint64_t seed,
                     std::string_view source_id) {
  std::optional<rewards::Equation> parsed = rewards::parse_equation(equation);
  if (!parsed) {
    throw UnparsableEquation("cannot parse equation: " + std::string(equation));
  }
  SplitMix64 rng(seed);
  std::size_t m = parsed->rhs.size();
  std::size_t pick = static_cast<std::size_t>(rng.next_below(2 * m));

  std::string masked;
  for (std::size_t i = 0; i < parsed->lhs.size(); ++i) {
    if (i > 0) masked += " + ";
    masked += std::to_string(parsed->lhs[i].coefficient) + " " +
              parsed->lhs[i].formula;
  }
  masked += " == ";
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0) masked += " + ";
    const rewards::EquationTerm& term = parsed->rhs[i];
    if (pick < m && pick == i) {
      masked += "[MASK] " + term.formula;
    } else if (pick >= m && pick - m == i) {
      masked += std::to_string(term.coefficient) + " [MASK]";
    } else {
      masked += std::to_string(term.coefficient) + " " + term.formula;
    }
  }

  TaskInstance inst;
  inst.task = "ceb";
  inst.provenance_id = std::string(source_id);
  inst.seed = seed;
  inst.truth = rewards::equation_to_string(*parsed);
  inst.echo = inst.truth;
  inst.prompt =
      "You are now acting as a skilled chemistry expert. Your goal is to "
      "identify and complete the missing compound(s) represented by [MASK] "
      "in the given chemical reaction. Reaction: " +
      masked +
      ". Analyze the equation carefully, considering the law of conservation "
      "of mass and stoichiometry. Ensure the total number of atoms of each "
      "element on both sides of the equation remains balanced.";
  return inst;
}

TaskInstance gen_rxp(const ReactionRecord& rec) {
  std::vector<std::string> inputs = rec.reactants;
  inputs.insert(inputs.end(), rec.conditions.begin(), rec.conditions.end());

  TaskInstance inst;
  inst.task = "rxp";
  inst.provenance_id = rec.id;
  inst.truth = rec.products.empty() ? "" : rec.products.front();
  inst.echo = inst.truth;
  inst.prompt =
      "Reason and predict the correct product in SMILES notation from the "
      "following reaction: " +
      join(inputs, ".");
  return inst;
}

TaskInstance gen_i2s(std::string_view iupac_name, std::string_view truth_smiles,
                     std::string_view source_id) {
  TaskInstance inst;
  inst.task = "i2s";
  inst.provenance_id = std::string(source_id);
  inst.truth = std::string(truth_smiles);
  inst.echo = inst.truth;
  inst.prompt =
      "Question: You are an expert in Cheminformatics, who is very familiar "
      "with Simplified Molecular Input Line Entry System (SMILES) notation, "
      "and here's a task for you: Given a molecule with the IUPAC name as "
      "below, please provide the corresponding SMILES notation. Here is the "
      "IUPAC name: \"" +
      std::string(iupac_name) + "\".";
  return inst;
}

TaskInstance gen_rxn(const ReactionRecord& rec) {
  if (!rec.class_label) {
    throw TaskGenError("reaction naming needs a pre-assigned class label");
  }
  std::vector<std::string> reagents = rec.reactants;
  reagents.insert(reagents.end(), rec.conditions.begin(), rec.conditions.end());

  std::string class_list;
  const auto& classes = rewards::reaction_classes();
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (i > 0) class_list += ", ";
    class_list += "\"" + classes[i] + "\"";
  }

  TaskInstance inst;
  inst.task = "rxn";
  inst.provenance_id = rec.id;
  inst.truth = *rec.class_label;
  inst.echo = inst.truth;
  inst.prompt = "What is the name of this chemical reaction? The reagents are " +
                join(reagents, " and ") + " and the product " +
                join(rec.products, " and ") +
                ". Choose ONLY from the following options and write your "
                "response choice inside <answer>...</answer>: " +
                class_list +
                ". Do not provide final answer different than what is "
                "provided in this list.";
  return inst;
}

std::vector<ReactionRecord> balance_by_class(
    std::span<const ReactionRecord> records, std::size_t target_total,
    std::uint64_t seed) {
  std::map<std::string, std::vector<const ReactionRecord*>> by_class;
  for (const ReactionRecord& rec : records) {
    if (rec.class_label) by_class[*rec.class_label].push_back(&rec);
  }
  if (by_class.empty()) return {};
  std::size_t per_class = target_total / by_class.size();
  for (auto& [label, group] : by_class) {
    per_class = std::min(per_class, group.size());
  }

  std::vector<ReactionRecord> out;
  for (auto& [label, group] : by_class) {
    SplitMix64 rng(derive_seed(seed, hash_text(label)));
    std::vector<std::size_t> order(group.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t k = 0; k < per_class; ++k) {
      out.push_back(*group[order[k]]);
    }
  }
  SplitMix64 rng(derive_seed(seed, 0xba1a9ce));
  rng.shuffle(out);
  return out;
}

std::uint64_t record_seed(std::uint64_t base_seed, std::string_view record_id) {
  return derive_seed(base_seed, hash_text(record_id));
}

}  // namespace chemscore::taskgen
