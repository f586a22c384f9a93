#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "chemscore/canonical.hpp"
#include "chemscore/fingerprint.hpp"
#include "chemscore/rng.hpp"
#include "chemscore/taskgen.hpp"
#include "chemscore/text.hpp"
#include "helpers.hpp"

using namespace chemscore;
using namespace chemscore::taskgen;

namespace {

std::vector<ReactionRecord> sample_records() {
  std::ifstream in(testutil::data_path("sample_reactions.jsonl"));
  return read_reaction_records(in);
}

std::vector<std::string> sample_candidates() {
  return testutil::read_lines(testutil::data_path("sample_candidates.txt"));
}

std::string reaction_key(const ReactionRecord& rec) {
  std::string key;
  for (const auto& part : {rec.reactants, rec.conditions, rec.products}) {
    for (const std::string& s : part) {
      key += chem::is_valid_smiles(s) ? chem::canonical_form(chem::parse_smiles(s))
                                      : s;
      key += '|';
    }
    key += '#';
  }
  return key;
}

}  // namespace

TEST_CASE("rxr options: one original, three single-replacement corruptions") {
  auto records = sample_records();
  auto candidates = sample_candidates();
  for (std::size_t i = 0; i < 20; ++i) {
    const ReactionRecord& rec = records[i];
    TaskInstance inst = gen_rxr(rec, candidates, record_seed(7, rec.id));
    REQUIRE(inst.options.size() == 4);
    CHECK(inst.task == "rxr");

    std::set<std::string> labels;
    for (const auto& [label, text] : inst.options) labels.insert(label);
    CHECK(labels == std::set<std::string>{"A", "B", "C", "D"});

    // The prompt embeds all four options and the instruction.
    for (const auto& [label, text] : inst.options) {
      CHECK(inst.prompt.find(label + ". " + text) != std::string::npos);
    }
    CHECK(inst.prompt.find("Which chemical reaction is correct?") !=
          std::string::npos);
    CHECK(inst.prompt.find("<answer>...</answer>") != std::string::npos);
    CHECK(inst.echo == inst.truth);
  }
}

TEST_CASE("rxr replacement equals the brute-force Tanimoto argmax") {
  auto records = sample_records();
  auto candidates = sample_candidates();
  int verified = 0;
  for (std::size_t i = 0; i < records.size() && verified < 60; ++i) {
    const ReactionRecord& rec = records[i];
    std::uint64_t seed = record_seed(11, rec.id);
    TaskInstance inst = gen_rxr(rec, candidates, seed);

    // Replay the generator's draws to recover slot and batch, then verify
    // the replacement with a linear scan.
    SplitMix64 rng(seed);
    std::size_t pool = rec.reactants.size() + rec.conditions.size();
    for (int copy = 0; copy < 3; ++copy) {
      std::size_t slot = std::size_t(rng.next_below(pool));
      const std::string& removed = slot < rec.reactants.size()
                                       ? rec.reactants[slot]
                                       : rec.conditions[slot - rec.reactants.size()];
      std::size_t batch_size = std::min(kCandidateBatch, candidates.size());
      auto batch = rng.sample_indices(candidates.size(), batch_size);
      std::sort(batch.begin(), batch.end());

      // Linear-scan oracle.
      chem::Fingerprint removed_fp =
          chem::morgan_fingerprint(chem::parse_smiles(removed));
      double best_tau = -1.0;
      std::size_t best = candidates.size();
      for (std::size_t ci : batch) {
        if (chem::same_molecule(candidates[ci], removed)) continue;
        double tau = chem::tanimoto(
            removed_fp, chem::morgan_fingerprint(chem::parse_smiles(candidates[ci])));
        if (tau > best_tau) {
          best_tau = tau;
          best = ci;
        }
      }
      REQUIRE(best < candidates.size());
      // The corrupted copy must contain the oracle's replacement.
      bool found = false;
      for (const auto& [label, text] : inst.options) {
        if (label != inst.truth && text.find(candidates[best]) != std::string::npos) {
          found = true;
        }
      }
      CHECK(found);
      ++verified;
    }
  }
  CHECK(verified >= 60);
}

TEST_CASE("exactly one rxr option round-trips to the source record") {
  auto records = sample_records();
  auto candidates = sample_candidates();
  for (std::size_t i = 0; i < 25; ++i) {
    const ReactionRecord& rec = records[i];
    TaskInstance inst = gen_rxr(rec, candidates, record_seed(3, rec.id));
    std::string original_clause;
    for (const auto& [label, text] : inst.options) {
      if (label == inst.truth) original_clause = text;
    }
    int matches = 0;
    for (const auto& [label, text] : inst.options) {
      matches += text == original_clause;
    }
    CHECK(matches == 1);
  }
}

TEST_CASE("rxr without candidates fails") {
  auto records = sample_records();
  std::vector<std::string> empty;
  CHECK_THROWS_AS(gen_rxr(records[0], empty, 1), NoCandidates);
}

TEST_CASE("rxi swaps a reagent against the longest product") {
  auto records = sample_records();
  for (std::size_t i = 0; i < 25; ++i) {
    ReactionRecord rec = records[i];
    // Give the record a second product so the length argmax is meaningful.
    rec.products.push_back("CC");
    std::size_t longest = 0;  // length-scan oracle
    for (std::size_t p = 1; p < rec.products.size(); ++p) {
      if (rec.products[p].size() > rec.products[longest].size()) longest = p;
    }
    TaskInstance inst = gen_rxi(rec, record_seed(13, rec.id));
    REQUIRE(inst.options.size() == 4);

    std::string original_clause;
    for (const auto& [label, text] : inst.options) {
      if (label == inst.truth) original_clause = text;
    }
    int originals = 0;
    for (const auto& [label, text] : inst.options) {
      originals += text == original_clause;
      if (text == original_clause) continue;
      // Corrupted options put a former reagent in the product slot and the
      // longest product among the reagents.
      CHECK(text.find(rec.products[longest]) != std::string::npos);
    }
    CHECK(originals == 1);
  }
}

TEST_CASE("rxi needs both sides") {
  ReactionRecord no_products;
  no_products.reactants = {"CCO"};
  CHECK_THROWS_AS(gen_rxi(no_products, 1), DegenerateReaction);
  ReactionRecord no_reagents;
  no_reagents.products = {"CCO"};
  CHECK_THROWS_AS(gen_rxi(no_reagents, 1), DegenerateReaction);
}

TEST_CASE("rxtf truth follows the corruption flag and balances 50/50") {
  auto records = sample_records();
  auto candidates = sample_candidates();
  int true_count = 0;
  for (std::size_t i = 0; i < 40; ++i) {
    const ReactionRecord& rec = records[i % records.size()];
    bool corrupted = i % 2 == 1;
    TaskInstance inst = gen_rxtf(rec, corrupted, candidates, record_seed(5, rec.id));
    CHECK(inst.truth == (corrupted ? "False" : "True"));
    CHECK(inst.prompt.find("Is this chemical reaction correct?") !=
          std::string::npos);
    true_count += inst.truth == "True";
  }
  CHECK(true_count == 20);
}

TEST_CASE("cmg prompt lists the distinct elements and the worked example") {
  chem::CompositionSequence comp =
      chem::parse_composition_sequence("O O Te Tm Tm Te <sg127>");
  TaskInstance inst = gen_cmg(comp, "mp-1");
  CHECK(inst.truth == "O Te Tm");
  CHECK(inst.prompt.rfind("Build a material that has O, Te, Tm.", 0) == 0);
  CHECK(inst.prompt.find("<material> Pa In Tc Tc <sg225></material>") !=
        std::string::npos);
  CHECK(inst.echo == "<material> O O Te Tm Tm Te <sg127></material>");

  // TeO2 decomposes into its two constituent elements.
  chem::CompositionSequence teo2 = chem::parse_composition_sequence("Te O O <sg136>");
  CHECK(gen_cmg(teo2, "mp-2").truth == "O Te");

  chem::CompositionSequence single = chem::parse_composition_sequence("Si <sg227>");
  TaskInstance solo = gen_cmg(single, "mp-3");
  CHECK(solo.truth == "Si");
  CHECK(solo.prompt.rfind("Build a material that has Si.", 0) == 0);
}

TEST_CASE("ceb masks one product coefficient or compound") {
  const std::string equation =
      "6 BaCO3 + 1 Na2CO3 + 4 SiO2 = 1 Na2Ba6(Si2O9)(SiO3)2 + 7 CO2";
  bool saw_coefficient_mask = false;
  bool saw_compound_mask = false;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    TaskInstance inst = gen_ceb(equation, seed, "eq0");
    CHECK(inst.truth == equation);
    REQUIRE(inst.prompt.find("[MASK]") != std::string::npos);

    // The masked reaction sits between "Reaction: " and the next period.
    std::size_t begin = inst.prompt.find("Reaction: ");
    REQUIRE(begin != std::string::npos);
    begin += std::string("Reaction: ").size();
    std::size_t end = inst.prompt.find(". Analyze", begin);
    std::string masked = inst.prompt.substr(begin, end - begin);

    // Exactly one mask, never on the reactant side.
    CHECK(chemscore::count_occurrences(masked, "[MASK]") == 1);
    std::size_t eq_pos = masked.find("==");
    CHECK(masked.find("[MASK]") > eq_pos);

    // Re-substituting the truth's token reproduces the original equation.
    std::string lhs = masked.substr(0, eq_pos);
    CHECK(lhs.find("6 BaCO3") != std::string::npos);
    if (masked.find("[MASK] Na2Ba6(Si2O9)(SiO3)2") != std::string::npos ||
        masked.find("[MASK] CO2") != std::string::npos) {
      saw_coefficient_mask = true;
    }
    if (masked.find("1 [MASK]") != std::string::npos ||
        masked.find("7 [MASK]") != std::string::npos) {
      saw_compound_mask = true;
    }
  }
  CHECK(saw_coefficient_mask);
  CHECK(saw_compound_mask);

  CHECK_THROWS_AS(gen_ceb("not an equation", 1, ""), UnparsableEquation);
}

TEST_CASE("rxp and rxn prompts follow their templates") {
  ReactionRecord rec;
  rec.id = "r1";
  rec.reactants = {"CCN(CC)CC", "COc1ccc(O)cc1"};
  rec.conditions = {"ClCCl"};
  rec.products = {"COc1ccc(OC(=O)c2ccccc2)cc1"};
  rec.class_label = "Acylation";

  TaskInstance rxp = gen_rxp(rec);
  CHECK(rxp.prompt ==
        "Reason and predict the correct product in SMILES notation from the "
        "following reaction: CCN(CC)CC.COc1ccc(O)cc1.ClCCl");
  CHECK(rxp.truth == rec.products[0]);

  TaskInstance rxn = gen_rxn(rec);
  CHECK(rxn.truth == "Acylation");
  CHECK(rxn.prompt.find("What is the name of this chemical reaction?") == 0);
  CHECK(rxn.prompt.find("\"Protection\", \"Reduction\"") != std::string::npos);
  CHECK(rxn.prompt.find("Choose ONLY from the following options") !=
        std::string::npos);

  ReactionRecord unlabeled = rec;
  unlabeled.class_label.reset();
  CHECK_THROWS_AS(gen_rxn(unlabeled), TaskGenError);
}

TEST_CASE("i2s prompt embeds the name") {
  TaskInstance inst = gen_i2s("ethanol", "CCO", "cid-702");
  CHECK(inst.prompt.find("Here is the IUPAC name: \"ethanol\".") !=
        std::string::npos);
  CHECK(inst.truth == "CCO");
}

TEST_CASE("balance_by_class downsamples evenly") {
  auto records = sample_records();  // 60 records, 6 per class
  auto balanced = balance_by_class(records, 40, 17);
  CHECK(balanced.size() == 40);
  std::map<std::string, int> per_class;
  for (const auto& rec : balanced) ++per_class[*rec.class_label];
  for (const auto& [label, count] : per_class) CHECK(count == 4);

  // Capped by the smallest class.
  auto capped = balance_by_class(records, 1000, 17);
  CHECK(capped.size() == 60);
}

TEST_CASE("instances are reproducible from (record, seed) and serialize") {
  auto records = sample_records();
  auto candidates = sample_candidates();
  TaskInstance a = gen_rxr(records[2], candidates, record_seed(21, records[2].id));
  TaskInstance b = gen_rxr(records[2], candidates, record_seed(21, records[2].id));
  CHECK(a.prompt == b.prompt);
  CHECK(a.truth == b.truth);

  std::stringstream buffer;
  std::vector<TaskInstance> instances = {a};
  write_task_instances(buffer, instances);
  auto loaded = read_task_instances(buffer);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].prompt == a.prompt);
  CHECK(loaded[0].truth == a.truth);
  CHECK(loaded[0].options == a.options);
  CHECK(loaded[0].echo == a.echo);
}
